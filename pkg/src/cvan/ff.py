"""Small finite fields GF(p^f) with table arithmetic.

Elements are the integers 0..q-1; the base-p digits of an element are its
coefficients in the polynomial basis 1, x, ..., x^(f-1). The defining
modulus is the monic irreducible of degree f whose coefficient vector,
read as a base-p integer, is smallest.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, f) with q = p**f, or raise ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    f, r = 0, q
    while r % p == 0:
        r //= p
        f += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, f


def is_prime_power(q: int) -> bool:
    try:
        factor_prime_power(q)
    except ValueError:
        return False
    return True


def _digits(x: int, p: int, f: int) -> list[int]:
    out = []
    for _ in range(f):
        out.append(x % p)
        x //= p
    return out


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    # mod is monic of degree f, given as its f low coefficients
    f = len(mod)
    prod = [0] * (2 * f - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for d in range(2 * f - 2, f - 1, -1):
        c = prod[d]
        if c:
            prod[d] = 0
            for i in range(f):
                prod[d - f + i] = (prod[d - f + i] - c * mod[i]) % p
    return prod[:f]


def _is_irreducible(mod: list[int], p: int) -> bool:
    # brute force: no root of any monic factor of degree <= f/2
    f = len(mod)
    full = mod + [1]
    for d in range(1, f // 2 + 1):
        for n in range(p ** d):
            g = _digits(n, p, d) + [1]
            r = list(full)
            for i in range(len(r) - 1, d - 1, -1):
                c = r[i]
                if c:
                    for j in range(d + 1):
                        r[i - d + j] = (r[i - d + j] - c * g[j]) % p
            if not any(r[:d]):
                return False
    return True


@lru_cache(maxsize=None)
def least_irreducible(p: int, f: int) -> tuple[int, ...]:
    """Low coefficients (c_0..c_{f-1}) of the chosen monic modulus."""
    if f == 1:
        return (0,)
    for n in range(p ** f):
        mod = _digits(n, p, f)
        if mod[0] and _is_irreducible(mod, p):
            return tuple(mod)
    raise ArithmeticError("no irreducible polynomial found")


class GF:
    """The field with q elements, q a prime power."""

    def __init__(self, q: int):
        p, f = factor_prime_power(q)
        self.q, self.p, self.f = q, p, f
        self.modulus = least_irreducible(p, f)
        digs = [_digits(x, p, f) for x in range(q)]
        weights = [p ** i for i in range(f)]
        add = np.zeros((q, q), dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(a, q):
                s = sum(((x + y) % p) * w for x, y, w in zip(digs[a], digs[b], weights))
                m = sum(c * w for c, w in zip(_poly_mulmod(digs[a], digs[b], list(self.modulus), p), weights))
                add[a, b] = add[b, a] = s
                mul[a, b] = mul[b, a] = m
        self.add_t, self.mul_t = add, mul
        self.neg_t = np.array([int(np.nonzero(add[a] == 0)[0][0]) for a in range(q)], dtype=np.int64)
        self.inv_t = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            self.inv_t[a] = int(np.nonzero(mul[a] == 1)[0][0])
        self.gen = self._find_generator()
        self.log = {}
        self.exp = []
        x = 1
        for i in range(q - 1):
            self.exp.append(x)
            self.log[x] = i
            x = int(mul[x, self.gen])

    def _find_generator(self) -> int:
        for g in range(2, self.q) if self.q > 2 else [1]:
            x, order = g, 1
            while x != 1:
                x = int(self.mul_t[x, g])
                order += 1
            if order == self.q - 1:
                return g
        return 1

    def add(self, a: int, b: int) -> int:
        return int(self.add_t[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_t[a, self.neg_t[b]])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_t[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_t[a])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return int(self.inv_t[a])

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            return 0 if n > 0 else 1
        return self.exp[(self.log[a] * n) % (self.q - 1)]

    def frob(self, a: int, k: int = 1) -> int:
        """a -> a^(p^k)."""
        return self.pow(a, self.p ** k)

    def trace(self, a: int) -> int:
        """Absolute trace to F_p, returned as an integer in [0, p)."""
        t, x = 0, a
        for _ in range(self.f):
            t = self.add(t, x)
            x = self.frob(x)
        return t

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime field."""
        return n % self.p

    def elements(self) -> range:
        return range(self.q)

    def __repr__(self) -> str:
        return f"GF({self.q})"


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)
