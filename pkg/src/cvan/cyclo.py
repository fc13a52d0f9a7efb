"""Exact arithmetic in cyclotomic fields and in polynomials of q.

A ``Cyclotomic`` stores a conductor n and a sparse map exponent -> rational,
read as sum c_e * zeta_n^e. Arithmetic works on this raw group-ring form and
never reduces; equality, hashing and serialization go through the canonical
form, which is the expansion in the Zumbroich basis of the smallest field
Q(zeta_m) containing the element.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping, Union

from . import expr as _expr
from .ff import factor_prime_power, field

Number = Union[int, Fraction]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@lru_cache(maxsize=None)
def _factorize(n: int) -> tuple[tuple[int, int], ...]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            a = 0
            while n % d == 0:
                n //= d
                a += 1
            out.append((d, a))
        d += 1
    if n > 1:
        out.append((n, 1))
    return tuple(out)


@lru_cache(maxsize=None)
def _basis_data(n: int):
    # per prime power p^a || n: (p, a, p^a, p^(a-1), inverse of n/p^a mod p^a, n/p)
    data = []
    for p, a in _factorize(n):
        pa = p ** a
        data.append((p, a, pa, pa // p, pow(n // pa, -1, pa), n // p))
    return tuple(data)


def _top_digit(e: int, pa: int, low: int, inv: int) -> int:
    return ((e * inv) % pa) // low


def _zumbroich(n: int, coeffs: dict) -> dict:
    """Rewrite sum c_e zeta_n^e in the Zumbroich basis of Q(zeta_n)."""
    cur = {e % n: c for e, c in coeffs.items() if c}
    for p, a, pa, low, inv, step in _basis_data(n):
        nxt: dict = {}
        for e, c in cur.items():
            digit = _top_digit(e, pa, low, inv)
            if p == 2:
                if digit == 0:
                    nxt[e] = nxt.get(e, 0) + c
                else:
                    e2 = (e + step) % n
                    nxt[e2] = nxt.get(e2, 0) - c
            else:
                if digit != 0:
                    nxt[e] = nxt.get(e, 0) + c
                else:
                    for t in range(1, p):
                        e2 = (e + t * step) % n
                        nxt[e2] = nxt.get(e2, 0) - c
        cur = {e: c for e, c in nxt.items() if c}
    return cur


def _halve_conductor(n: int, coeffs: dict) -> tuple[int, dict]:
    # n = 2m with m odd: zeta_n^e = (-1)^e zeta_m^(e(m+1)/2)
    m = n // 2
    h = (m + 1) // 2
    out: dict = {}
    for e, c in coeffs.items():
        e2 = (e * h) % m
        out[e2] = out.get(e2, 0) + (c if e % 2 == 0 else -c)
    return m, {e: c for e, c in out.items() if c}


def _canonical(n: int, coeffs: dict) -> tuple[int, dict]:
    if n % 4 == 2:
        n, coeffs = _halve_conductor(n, coeffs)
    cur = _zumbroich(n, coeffs)
    if not cur:
        return 1, {}
    changed = True
    while changed and n > 1:
        changed = False
        for p, a, pa, low, inv, step in _basis_data(n):
            if a >= 2:
                if all(e % p == 0 for e in cur):
                    n2 = n // p
                    cur = {e // p: c for e, c in cur.items()}
                    if n2 % 4 == 2:
                        n2, cur = _halve_conductor(n2, cur)
                        cur = _zumbroich(n2, cur)
                    n = n2
                    changed = True
                    break
            elif p != 2:
                # p || n, p odd: each coset {e + t n/p} must be full with equal coefficients
                groups: dict = {}
                for e, c in cur.items():
                    base = e % step
                    groups.setdefault(base, []).append(c)
                ok = all(len(cs) == p - 1 and all(x == cs[0] for x in cs) for cs in groups.values())
                if ok:
                    n2 = n // p
                    new: dict = {}
                    for e, c in cur.items():
                        # find the representative with p-component 0
                        d = _top_digit(e, pa, low, inv)
                        if d != 1:
                            continue
                        e0 = (e - step) % n  # shifts the p-digit from 1 to 0
                        new[(e0 // p) % n2] = new.get((e0 // p) % n2, 0) - c
                    n = n2
                    cur = _zumbroich(n, new) if n > 1 else {0: sum(new.values())}
                    cur = {e: c for e, c in cur.items() if c}
                    if n % 4 == 2:
                        n, cur = _halve_conductor(n, cur)
                        cur = _zumbroich(n, cur)
                    changed = True
                    break
    if n == 1:
        total = sum(cur.values())
        return 1, ({0: total} if total else {})
    return n, cur


class Cyclotomic:
    """An element of a cyclotomic field, immutable."""

    __slots__ = ("n", "c", "_canon", "_hash")

    def __init__(self, n: int, coeffs: Mapping[int, Number] | None = None):
        if n < 1:
            raise ValueError("conductor must be positive")
        self.n = n
        self.c = {e % n: v for e, v in (coeffs or {}).items() if v} if coeffs else {}
        self._canon = None
        self._hash = None

    @classmethod
    def _raw(cls, n: int, coeffs: dict) -> "Cyclotomic":
        obj = cls.__new__(cls)
        obj.n = n
        obj.c = coeffs
        obj._canon = None
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, x: Number) -> "Cyclotomic":
        return cls._raw(1, {0: x} if x else {})

    # canonical form

    def canonical(self) -> tuple[int, tuple[tuple[int, Fraction], ...]]:
        if self._canon is None:
            n, cur = _canonical(self.n, self.c)
            self._canon = (n, tuple(sorted((e, _frac(c)) for e, c in cur.items())))
        return self._canon

    @property
    def conductor(self) -> int:
        return self.canonical()[0]

    @property
    def coefficients(self) -> dict[int, Fraction]:
        return dict(self.canonical()[1])

    def reduced(self) -> "Cyclotomic":
        n, terms = self.canonical()
        out = Cyclotomic._raw(n, dict(terms))
        out._canon = (n, terms)
        return out

    def is_zero(self) -> bool:
        if not self.c:
            return True
        return not self.canonical()[1]

    def is_rational(self) -> bool:
        n, terms = self.canonical()
        return n == 1

    def to_fraction(self) -> Fraction:
        n, terms = self.canonical()
        if n != 1:
            raise ValueError(f"{self} is not rational")
        return terms[0][1] if terms else Fraction(0)

    def is_real(self) -> bool:
        return self == self.conj()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.rational(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        if self.n == other.n and self.c == other.c:
            return True
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.canonical())
        return self._hash

    # arithmetic on raw forms

    def _lift(self, m: int) -> dict:
        if m == self.n:
            return self.c
        k = m // self.n
        return {e * k: c for e, c in self.c.items()}

    @staticmethod
    def _coerce(x) -> "Cyclotomic":
        if isinstance(x, Cyclotomic):
            return x
        if isinstance(x, (int, Fraction)):
            return Cyclotomic.rational(x)
        if isinstance(x, Rational):
            return Cyclotomic.rational(Fraction(x))
        raise TypeError(f"cannot coerce {type(x).__name__} to Cyclotomic")

    def __add__(self, other) -> "Cyclotomic":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not other.c:
            return self
        if not self.c:
            return other
        m = self.n * other.n // math.gcd(self.n, other.n)
        out = dict(self._lift(m))
        for e, c in other._lift(m).items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Cyclotomic._raw(m, out)

    __radd__ = __add__

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic._raw(self.n, {e: -c for e, c in self.c.items()})

    def __sub__(self, other) -> "Cyclotomic":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Cyclotomic":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "Cyclotomic":
        if isinstance(other, (int, Fraction)):
            if not other:
                return Cyclotomic._raw(1, {})
            return Cyclotomic._raw(self.n, {e: c * other for e, c in self.c.items()})
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not self.c or not other.c:
            return Cyclotomic._raw(1, {})
        m = self.n * other.n // math.gcd(self.n, other.n)
        a, b = self._lift(m), other._lift(m)
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = (e1 + e2) % m
                out[e] = out.get(e, 0) + c1 * c2
        return Cyclotomic._raw(m, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            if not other.is_rational():
                return self * other.inverse()
            other = other.to_fraction()
        other = _frac(other)
        if not other:
            raise ZeroDivisionError("division by zero")
        return Cyclotomic._raw(self.n, {e: _frac(c) / other for e, c in self.c.items()})

    def __pow__(self, k: int) -> "Cyclotomic":
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic.rational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def galois(self, a: int) -> "Cyclotomic":
        """Apply zeta_n -> zeta_n^a (a coprime to n)."""
        if math.gcd(a, self.n) != 1:
            raise ValueError(f"{a} is not a unit mod {self.n}")
        return Cyclotomic._raw(self.n, {(e * a) % self.n: c for e, c in self.c.items()})

    def conj(self) -> "Cyclotomic":
        return Cyclotomic._raw(self.n, {(-e) % self.n: c for e, c in self.c.items()})

    def inverse(self) -> "Cyclotomic":
        # product of the nontrivial Galois conjugates over the norm
        n, terms = self.canonical()
        if not terms:
            raise ZeroDivisionError("inverse of zero")
        x = self.reduced()
        others = Cyclotomic.rational(1)
        for a in range(2, n):
            if math.gcd(a, n) == 1:
                others = others * x.galois(a)
        norm = (x * others).to_fraction()
        return others / norm

    def abs_bound(self) -> Fraction:
        """Sum of absolute raw coefficients, an upper bound for every |embedding|."""
        return sum((abs(_frac(c)) for c in self.c.values()), Fraction(0))

    def denominator(self) -> int:
        d = 1
        for c in self.c.values():
            if isinstance(c, Fraction):
                d = d * c.denominator // math.gcd(d, c.denominator)
        return d

    def approx(self) -> complex:
        """Floating point value, for display only."""
        return sum(complex(float(c)) * complex(math.cos(2 * math.pi * e / self.n), math.sin(2 * math.pi * e / self.n))
                   for e, c in self.c.items())

    # serialization

    def to_json(self) -> dict:
        n, terms = self.canonical()
        return {"conductor": n, "coeffs": [[e, c.numerator, c.denominator] for e, c in terms]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Cyclotomic":
        return cls(int(obj["conductor"]), {int(e): Fraction(int(a), int(b)) for e, a, b in obj["coeffs"]})

    def __str__(self) -> str:
        n, terms = self.canonical()
        if not terms:
            return "0"
        parts = []
        for e, c in terms:
            if n == 1:
                parts.append(str(c))
            elif c == 1:
                parts.append(f"z{n}^{e}")
            elif c == -1:
                parts.append(f"-z{n}^{e}")
            else:
                parts.append(f"{c}*z{n}^{e}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Cyclotomic({self})"


ZERO = Cyclotomic.rational(0)
ONE = Cyclotomic.rational(1)


def zeta(n: int, k: int = 1) -> Cyclotomic:
    """The root of unity exp(2 pi i k / n)."""
    if n < 1:
        raise ValueError("zeta: n must be positive")
    return Cyclotomic._raw(n, {k % n: 1})


def conj(z: Cyclotomic) -> Cyclotomic:
    return z.conj()


def real_part(z: Cyclotomic) -> Cyclotomic:
    return (z + z.conj()) * Fraction(1, 2)


def imag_is_zero(z: Cyclotomic) -> bool:
    return z == z.conj()


def cyclo_sum(items: Iterable[Cyclotomic]) -> Cyclotomic:
    """Sum many values with a single lift to the common conductor."""
    items = [x for x in items if x.c]
    if not items:
        return ZERO
    m = 1
    for x in items:
        m = m * x.n // math.gcd(m, x.n)
    out: dict = {}
    for x in items:
        for e, c in x._lift(m).items():
            out[e] = out.get(e, 0) + c
    return Cyclotomic._raw(m, {e: c for e, c in out.items() if c})


def coordinates(x: Cyclotomic, N: int) -> dict[int, Fraction]:
    """Rational coordinates of x in the Zumbroich basis of Q(zeta_N).

    For N = 2 mod 4 the field equals Q(zeta_{N/2}) and that basis is used.
    """
    if N % 4 == 2:
        N //= 2
    n, terms = x.canonical()
    if N % n:
        raise ValueError(f"{x} does not lie in Q(zeta_{N})")
    k = N // n
    if N == 1:
        return {0: terms[0][1]} if terms else {}
    return {e: _frac(c) for e, c in _zumbroich(N, {e * k: c for e, c in terms}).items()}


def check_q7_identity() -> bool:
    """C^3 + C^2/2 - C/2 - 1/8 vanishes at C = Re(zeta_7^t), t = 1, 2, 3, but not at C = 1."""
    def cubic(c: Cyclotomic) -> Cyclotomic:
        return c * c * c + c * c * Fraction(1, 2) - c * Fraction(1, 2) - Fraction(1, 8)

    roots_ok = all(cubic(real_part(zeta(7, t))).is_zero() for t in (1, 2, 3))
    return roots_ok and not cubic(ONE).is_zero()


@lru_cache(maxsize=None)
def gauss_sum(q: int) -> Cyclotomic:
    """sum over x in F_q of zeta_p^Tr(x^2), q odd."""
    p, f = factor_prime_power(q)
    if p == 2:
        raise ValueError("gauss_sum needs odd characteristic")
    F = field(q)
    counts = [0] * p
    for x in F.elements():
        counts[F.trace(F.mul(x, x))] += 1
    return Cyclotomic(p, {t: counts[t] for t in range(p)}).reduced()


# polynomials in q with an adjoined square root

_SQRT = {2: Cyclotomic(8, {1: 1, 7: 1}), 3: Cyclotomic(12, {1: 1, 11: 1})}


def sqrt_cyclo(d: int) -> Cyclotomic:
    if d == 1:
        return ONE
    return _SQRT[d]


class QPoly:
    """Polynomial in q with coefficients a + b*sqrt(d), d in {1, 2, 3}."""

    __slots__ = ("base", "coeffs")

    def __init__(self, coeffs: Mapping[int, tuple[Number, Number]] | None = None, base: int = 1):
        if base not in (1, 2, 3):
            raise ValueError("QPoly base must be 1, 2 or 3")
        clean = {}
        for k, (a, b) in (coeffs or {}).items():
            a, b = _frac(a), _frac(b)
            if base == 1 and b:
                raise ValueError("sqrt term in a base-1 polynomial")
            if a or b:
                clean[int(k)] = (a, b)
        self.base = base if any(b for _, b in clean.values()) else 1
        self.coeffs = clean

    @classmethod
    def const(cls, a: Number) -> "QPoly":
        return cls({0: (a, 0)})

    @classmethod
    def q(cls) -> "QPoly":
        return cls({1: (1, 0)})

    @classmethod
    def sqrt(cls, d: int) -> "QPoly":
        return cls({0: (0, 1)}, base=d) if d != 1 else cls.const(1)

    @classmethod
    def parse(cls, text) -> "QPoly":
        return qpoly_from_ast(_expr.parse(str(text)))

    def _base_with(self, other: "QPoly") -> int:
        if self.base != 1 and other.base != 1 and self.base != other.base:
            raise ValueError("cannot mix sqrt2 and sqrt3")
        return max(self.base, other.base)

    def __add__(self, other) -> "QPoly":
        other = _as_qpoly(other)
        base = self._base_with(other)
        out = dict(self.coeffs)
        for k, (a, b) in other.coeffs.items():
            a0, b0 = out.get(k, (0, 0))
            out[k] = (a0 + a, b0 + b)
        return QPoly(out, base)

    __radd__ = __add__

    def __neg__(self) -> "QPoly":
        return QPoly({k: (-a, -b) for k, (a, b) in self.coeffs.items()}, self.base)

    def __sub__(self, other) -> "QPoly":
        return self + (-_as_qpoly(other))

    def __rsub__(self, other) -> "QPoly":
        return _as_qpoly(other) - self

    def __mul__(self, other) -> "QPoly":
        other = _as_qpoly(other)
        base = self._base_with(other)
        out: dict = {}
        for k1, (a1, b1) in self.coeffs.items():
            for k2, (a2, b2) in other.coeffs.items():
                a0, b0 = out.get(k1 + k2, (0, 0))
                out[k1 + k2] = (a0 + a1 * a2 + base * b1 * b2, b0 + a1 * b2 + a2 * b1)
        return QPoly(out, base)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QPoly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = QPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, x: Number) -> "QPoly":
        x = _frac(x)
        return QPoly({k: (a * x, b * x) for k, (a, b) in self.coeffs.items()}, self.base)

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def __eq__(self, other) -> bool:
        try:
            other = _as_qpoly(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.coeffs.items())))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        rt = f"sqrt{self.base}"
        for k in sorted(self.coeffs, reverse=True):
            a, b = self.coeffs[k]
            mono = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
            if b == 0:
                coef = str(a)
            elif a == 0:
                coef = rt if b == 1 else f"{b}*{rt}"
            else:
                coef = f"({a}+{b}*{rt})"
            if mono and coef == "1":
                parts.append(mono)
            elif mono and coef == "-1":
                parts.append("-" + mono)
            elif mono:
                parts.append(f"{coef}*{mono}")
            else:
                parts.append(coef)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"QPoly({self})"


def _as_qpoly(x) -> QPoly:
    if isinstance(x, QPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return QPoly.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to QPoly")


def qpoly_from_ast(node) -> QPoly:
    kind = node[0]
    if kind == "num":
        return QPoly.const(node[1])
    if kind == "var":
        name = node[1]
        if name == "q":
            return QPoly.q()
        if name in ("sqrt2", "sqrt3"):
            return QPoly.sqrt(int(name[-1]))
        raise _expr.ExprError(f"unknown symbol {name!r} in polynomial")
    if kind == "call" and node[1] == "sqrt" and len(node[2]) == 1 and node[2][0][0] == "num":
        return QPoly.sqrt(int(node[2][0][1]))
    if kind == "add":
        return qpoly_from_ast(node[1]) + qpoly_from_ast(node[2])
    if kind == "sub":
        return qpoly_from_ast(node[1]) - qpoly_from_ast(node[2])
    if kind == "mul":
        return qpoly_from_ast(node[1]) * qpoly_from_ast(node[2])
    if kind == "neg":
        return -qpoly_from_ast(node[1])
    if kind == "div":
        den = qpoly_from_ast(node[2])
        if den.degree() != 0 or den.coeffs[0][1]:
            raise _expr.ExprError("polynomial division only by rational constants")
        return qpoly_from_ast(node[1]).scale(1 / den.coeffs[0][0])
    if kind == "pow":
        e = qpoly_from_ast(node[2])
        if e.degree() > 0 or (e.coeffs and (e.coeffs[0][1] or e.coeffs[0][0].denominator != 1)):
            raise _expr.ExprError("polynomial exponent must be a nonnegative integer")
        return qpoly_from_ast(node[1]) ** int(e.coeffs[0][0] if e.coeffs else 0)
    raise _expr.ExprError(f"not a polynomial: {node[0]}")


class QContext:
    """A concrete value of q: q = c * sqrt(d), with d = 1 for untwisted groups.

    For twisted families the integer parameter is Q = q^2 = c^2 d.
    """

    __slots__ = ("c", "d", "p")

    def __init__(self, c: int, d: int = 1):
        if d not in (1, 2, 3):
            raise ValueError("d must be 1, 2 or 3")
        self.c, self.d = int(c), d
        p, _ = factor_prime_power(self.c * self.c * d if d != 1 else self.c)
        self.p = p

    @classmethod
    def untwisted(cls, q: int) -> "QContext":
        factor_prime_power(q)
        return cls(q, 1)

    @classmethod
    def twisted(cls, q2: int, d: int) -> "QContext":
        """From Q = q^2 = d^(2m+1): q = d^m sqrt(d)."""
        p, f = factor_prime_power(q2)
        if p != d or f % 2 == 0:
            raise ValueError(f"q^2 = {q2} is not an odd power of {d}")
        return cls(d ** (f // 2), d)

    @property
    def twisted_flag(self) -> bool:
        return self.d != 1

    @property
    def q(self) -> int:
        if self.d != 1:
            raise ValueError("q is irrational in a twisted context")
        return self.c

    @property
    def q2(self) -> int:
        return self.c * self.c * self.d

    @property
    def label(self) -> str:
        return f"q^2={self.q2}" if self.d != 1 else f"q={self.c}"

    def key(self) -> tuple[int, int]:
        return (self.c, self.d)

    def __eq__(self, other) -> bool:
        return isinstance(other, QContext) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"QContext({self.label})"


def qpoly_eval_pair(poly: QPoly, ctx: QContext) -> tuple[Fraction, Fraction]:
    """Evaluate to x + y*sqrt(ctx.d) exactly."""
    d = ctx.d
    if poly.base != 1 and poly.base != d:
        raise ValueError(f"sqrt{poly.base} term is irrational at {ctx.label}")
    x = Fraction(0)
    y = Fraction(0)
    for k, (a, b) in poly.coeffs.items():
        # q^k = c^k * d^(k//2) * sqrt(d)^(k%2)
        mag = Fraction(ctx.c ** k * d ** (k // 2))
        if k % 2 == 0 or d == 1:
            x += a * mag
            y += b * mag
        else:
            # (a + b sqrt d) sqrt d = b d + a sqrt d
            x += b * d * mag
            y += a * mag
    if d == 1 and y:
        raise ValueError("irrational evaluation")
    return x, y


def qpoly_eval(poly: QPoly, ctx: QContext | int) -> Fraction:
    """Exact rational value of poly at q; raises if the value is irrational."""
    if isinstance(ctx, int):
        ctx = QContext.untwisted(ctx)
    x, y = qpoly_eval_pair(poly, ctx)
    if y:
        raise ValueError(f"{poly} is irrational at {ctx.label}")
    return x


def qpoly_eval_cyclo(poly: QPoly, ctx: QContext) -> Cyclotomic:
    x, y = qpoly_eval_pair(poly, ctx)
    out = Cyclotomic.rational(x)
    if y:
        out = out + sqrt_cyclo(ctx.d) * y
    return out
