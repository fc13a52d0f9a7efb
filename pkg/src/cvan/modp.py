"""Reduction of cyclotomic data modulo primes that split completely.

For a prime l = 1 mod N the map zeta_N -> h, h a primitive N-th root of
unity in F_l, is a ring map Z[zeta_N] -> F_l. Nonzero images certify
nonzero values; zero images are combined with size bounds or exact checks.
"""

from __future__ import annotations

import math
from functools import lru_cache
from fractions import Fraction

import numpy as np

from .cyclo import Cyclotomic

LIMIT = 1 << 26


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def iter_split_primes(N: int, lower: int = 1 << 24, upper: int = LIMIT):
    """Primes l = 1 mod N with lower <= l < upper, increasing."""
    t = max(1, (lower - 1) // N)
    while True:
        ell = 1 + N * t
        if ell >= upper:
            raise ArithmeticError(f"not enough primes = 1 mod {N} below {upper}")
        if ell >= lower and is_prime(ell):
            yield ell
        t += 1


@lru_cache(maxsize=None)
def split_primes(N: int, count: int, lower: int = 1 << 24, upper: int = LIMIT) -> tuple[int, ...]:
    """The first ``count`` primes l = 1 mod N with lower <= l < upper."""
    gen = iter_split_primes(N, lower, upper)
    return tuple(next(gen) for _ in range(count))


@lru_cache(maxsize=None)
def primitive_root(ell: int) -> int:
    fs = _prime_factors(ell - 1)
    g = 2
    while any(pow(g, (ell - 1) // f, ell) == 1 for f in fs):
        g += 1
    return g


@lru_cache(maxsize=None)
def power_table(N: int, ell: int, a: int = 1) -> np.ndarray:
    """pw[e] = h^(a e) mod l, with h = g^((l-1)/N)."""
    h = pow(primitive_root(ell), (ell - 1) // N, ell)
    h = pow(h, a, ell)
    pw = np.empty(N, dtype=np.int64)
    x = 1
    for e in range(N):
        pw[e] = x
        x = x * h % ell
    pw.setflags(write=False)
    return pw


def embed(v, N: int, ell: int, pw: np.ndarray, scale: int = 1) -> int:
    """Image of scale*v in F_l; v is a Fraction or a Cyclotomic whose conductor divides N."""
    if not isinstance(v, Cyclotomic):
        v = Fraction(v) * scale
        return v.numerator * pow(v.denominator, -1, ell) % ell
    k = N // v.n
    total = 0
    for e, c in v.c.items():
        c = Fraction(c) * scale
        cm = c.numerator * pow(c.denominator, -1, ell) if c.denominator != 1 else c.numerator
        total += cm * int(pw[(e * k) % N])
    return total % ell


def matmul_mod(A: np.ndarray, B: np.ndarray, ell: int) -> np.ndarray:
    """A @ B mod l for entries in [0, l) with l < 2^26, exact in int64."""
    if ell >= LIMIT:
        raise ValueError("modulus too large for int64 matmul")
    lo = B & 0x1FFF
    hi = B >> 13
    k = A.shape[1] if A.ndim > 1 else A.shape[0]
    chunk = max(1, (1 << 62) // ((ell - 1) * 0x1FFF + 1))
    if k <= chunk:
        r_hi = (A @ hi) % ell
        r_lo = (A @ lo) % ell
    else:
        r_hi = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        r_lo = np.zeros_like(r_hi)
        for s in range(0, k, chunk):
            r_hi = (r_hi + A[:, s:s + chunk] @ hi[s:s + chunk]) % ell
            r_lo = (r_lo + A[:, s:s + chunk] @ lo[s:s + chunk]) % ell
    return (r_hi * 0x2000 + r_lo) % ell


def conductor_lcm(values) -> int:
    N = 1
    for v in values:
        if isinstance(v, Cyclotomic):
            N = N * v.n // math.gcd(N, v.n)
    return N


def denominator_lcm(values) -> int:
    D = 1
    for v in values:
        d = v.denominator() if isinstance(v, Cyclotomic) else Fraction(v).denominator
        D = D * d // math.gcd(D, d)
    return D


def abs_bound(v) -> Fraction:
    if isinstance(v, Cyclotomic):
        return v.abs_bound()
    return abs(Fraction(v))


def unit_generators(N: int) -> list[int]:
    """A small generating set of (Z/N)^*."""
    units = [a for a in range(1, N) if math.gcd(a, N) == 1]
    group = {1}
    gens = []
    for a in units:
        if len(group) == len(units):
            break
        if a in group:
            continue
        gens.append(a)
        # abelian group: the new subgroup is the union of the cosets x<a>
        new = set(group)
        y = a
        while y != 1:
            new |= {x * y % N for x in group}
            y = y * a % N
        group = new
    return gens


class FlatTable:
    """A matrix of cyclotomic values flattened to parallel integer arrays.

    Entry (r, c) is sum over its terms of num/D * zeta_N^exp, with D the
    common denominator, so every embedding is a couple of numpy gathers.
    """

    def __init__(self, rows: list[list]):
        self.shape = (len(rows), len(rows[0]) if rows else 0)
        flat = [v for row in rows for v in row]
        self.N = conductor_lcm(flat)
        self.D = denominator_lcm(flat)
        r_idx, c_idx, exps, nums = [], [], [], []
        N, D = self.N, self.D
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if isinstance(v, Cyclotomic):
                    k = N // v.n
                    for e, c in v.c.items():
                        c = Fraction(c) * D
                        r_idx.append(i)
                        c_idx.append(j)
                        exps.append((e * k) % N)
                        nums.append(int(c))
                elif v:
                    r_idx.append(i)
                    c_idx.append(j)
                    exps.append(0)
                    nums.append(int(Fraction(v) * D))
        self.r = np.array(r_idx, dtype=np.int64)
        self.c = np.array(c_idx, dtype=np.int64)
        self.e = np.array(exps, dtype=np.int64)
        self.big = any(abs(x) >= (1 << 62) for x in nums)
        self.num = np.array(nums, dtype=object if self.big else np.int64)
        self.cell = self.r * self.shape[1] + self.c
        self.bounds = self._bounds()

    def _bounds(self) -> np.ndarray:
        """Sum of absolute numerators per cell (D times a bound on every conjugate)."""
        out = np.zeros(self.shape[0] * self.shape[1], dtype=object)
        for idx, n in zip(self.cell.tolist(), self.num.tolist()):
            out[idx] += abs(n)
        return out.reshape(self.shape)

    def embed(self, ell: int, a: int = 1, conj: bool = False) -> np.ndarray:
        """Residues of D*value under zeta_N -> h^(a) (or its conjugate) modulo l."""
        pw = power_table(self.N, ell)
        e = (self.e * a) % self.N
        if conj:
            e = (-e) % self.N
        nm = np.array([x % ell for x in self.num.tolist()], dtype=np.int64) if self.big else self.num % ell
        terms = (nm * pw[e]) % ell
        total = np.bincount(self.cell, weights=terms.astype(np.float64),
                            minlength=self.shape[0] * self.shape[1])
        return (total.astype(np.int64) % ell).reshape(self.shape)

    def row_terms(self, i: int):
        if not hasattr(self, "_starts"):
            self._starts = np.searchsorted(self.r, np.arange(self.shape[0] + 1))
        s, t = self._starts[i], self._starts[i + 1]
        return self.c[s:t], self.e[s:t], self.num[s:t]
