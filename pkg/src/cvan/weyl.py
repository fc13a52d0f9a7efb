"""Parabolic multiplicities of irreducible characters of small Weyl groups.

For each J in the power set of the simple reflections the restriction of
lambda to W_J is paired with the trivial and the sign character of W_J. The
irreducible characters come from the Dixon oracle, never from a stored list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from .cyclo import Cyclotomic
from .oracle.classes import conjugacy_classes
from .oracle.dixon import OracleTable, dixon_table
from .oracle.groups import (WEYL_ORDERS, IntArith, OracleGroup, SpecError, build_group,
                            closure, parse_spec)

TYPES = ("A2", "A3", "B2", "B3", "G2", "I2(8)", "F4")
# dihedral types whose degree-2 characters are not separated by parabolic data
DIHEDRAL_EXCEPTIONS = ("G2", "I2(8)")


@dataclass
class WeylGroup:
    type: str
    group: OracleGroup
    sign: np.ndarray  # +1/-1 for each element

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def rank(self) -> int:
        return len(self.group.gens)

    @property
    def gens(self) -> list[np.ndarray]:
        return list(self.group.gens)

    def subsets(self) -> list[tuple[int, ...]]:
        """All J, ordered by bitmask: J = {i : bit i of the mask is set}."""
        return [tuple(i for i in range(self.rank) if m >> i & 1) for m in range(1 << self.rank)]

    def parabolic(self, J: tuple[int, ...]) -> np.ndarray:
        """Element indices of W_J."""
        if not J:
            return np.array([0], dtype=np.int64)
        elems, _, _ = closure([self.group.gens[j] for j in J], IntArith())
        return np.sort(self.group.lookup(elems))

    def table(self) -> OracleTable:
        return dixon_table(self.group)


def _normalize(typ: str) -> str:
    t = typ.strip().translate(str.maketrans("₀₁₂₃₄₅₆₇₈₉", "0123456789")).upper()
    try:
        spec = parse_spec(t)
    except SpecError:
        raise SpecError(f"unsupported Weyl type {typ!r}") from None
    if spec.family != "weyl" or spec.weyl_type not in WEYL_ORDERS:
        raise SpecError(f"unsupported Weyl type {typ!r}")
    return spec.weyl_type


def weyl_group(typ: str) -> WeylGroup:
    return _weyl(_normalize(typ))


@lru_cache(maxsize=None)
def _weyl(t: str) -> WeylGroup:
    G = build_group(f"weyl:{t}")
    return WeylGroup(t, G, 1 - 2 * G.parity)


def sign_row(w: WeylGroup) -> int:
    """Row of the Dixon table equal to the sign character."""
    cd = conjugacy_classes(w.group)
    eps = [int(w.sign[r]) for r in cd.reps]
    ot = w.table()
    return next(i for i in range(len(ot.chars)) if [ot.value(i, j) for j in range(len(eps))] == eps)


@dataclass(frozen=True)
class MultiplicityVector:
    index: int
    degree: int
    label: str
    ones: tuple[int, ...]   # (lambda|W_J, 1) for J in subset order
    signs: tuple[int, ...]  # (lambda|W_J, eps) for J in subset order

    def to_json(self) -> dict:
        return {"char": self.label, "degree": self.degree, "one": list(self.ones), "eps": list(self.signs)}


def _inner(ot: OracleTable, i: int, weights: np.ndarray, size: int) -> int:
    total = sum((ot.value(i, j) * int(c) for j, c in enumerate(weights) if c), Cyclotomic.rational(0))
    x = total.to_fraction() / size
    if x.denominator != 1 or x < 0:
        raise ArithmeticError(f"inner product {x} is not a multiplicity")
    return int(x)


@lru_cache(maxsize=None)
def _vectors(typ: str) -> tuple[MultiplicityVector, ...]:
    w = weyl_group(typ)
    ot = w.table()
    cd = conjugacy_classes(w.group)
    r = len(cd)
    ones = [[] for _ in ot.chars]
    signs = [[] for _ in ot.chars]
    for J in w.subsets():
        idx = w.parabolic(J)
        cls = cd.class_of[idx]
        plain = np.bincount(cls, minlength=r)
        signed = np.bincount(cls, weights=w.sign[idx], minlength=r).astype(np.int64)
        for i in range(len(ot.chars)):
            ones[i].append(_inner(ot, i, plain, len(idx)))
            signs[i].append(_inner(ot, i, signed, len(idx)))
    return tuple(MultiplicityVector(i, c.degree, c.label, tuple(ones[i]), tuple(signs[i]))
                 for i, c in enumerate(ot.chars))


def multiplicity_vectors(w: WeylGroup) -> list[MultiplicityVector]:
    return list(_vectors(w.type))


def _collisions(vecs: list[MultiplicityVector], attr: str) -> list[tuple[int, int]]:
    return [(a.index, b.index) for a, b in combinations(vecs, 2) if getattr(a, attr) == getattr(b, attr)]


def duality_failures(w: WeylGroup) -> list[str]:
    """Characters whose eps-vector differs from the 1-vector of lambda * eps."""
    ot = w.table()
    vecs = multiplicity_vectors(w)
    e = sign_row(w)
    r = len(ot.classes)
    rows = {tuple(ot.value(i, j) for j in range(r)): i for i in range(len(ot.chars))}
    bad = []
    for v in vecs:
        twist = rows[tuple(ot.value(v.index, j) * ot.value(e, j) for j in range(r))]
        if v.signs != vecs[twist].ones:
            bad.append(v.label)
    return bad


def permutation_failures(w: WeylGroup) -> list[tuple[int, ...]]:
    """Subsets J where sum over lambda of lambda(1) (lambda|W_J, 1) is not |W : W_J|."""
    vecs = multiplicity_vectors(w)
    bad = []
    for k, J in enumerate(w.subsets()):
        lhs = sum(v.degree * v.ones[k] for v in vecs)
        if lhs != Fraction(w.order, len(w.parabolic(J))):
            bad.append(J)
    return bad


@dataclass
class UniquenessReport:
    type: str
    one_collisions: list[tuple[int, int]]
    eps_collisions: list[tuple[int, int]]
    expected: list[tuple[int, int]]
    labels: list[str] = field(repr=False, default_factory=list)
    degrees: list[int] = field(repr=False, default_factory=list)

    @property
    def ok(self) -> bool:
        return self.one_collisions == self.expected and self.eps_collisions == self.expected

    def to_json(self) -> dict:
        def named(pairs):
            return [[self.labels[a], self.labels[b]] for a, b in pairs]
        return {
            "type": self.type,
            "ok": self.ok,
            "one_collisions": named(self.one_collisions),
            "eps_collisions": named(self.eps_collisions),
            "expected": named(self.expected),
            "collision_degrees": sorted({self.degrees[i] for p in self.one_collisions + self.eps_collisions
                                         for i in p}),
        }


def uniqueness_check(w: WeylGroup) -> UniquenessReport:
    """Pairs of characters with equal 1-vectors or equal eps-vectors.

    The expected collisions are all pairs of degree-2 characters for the
    dihedral groups of order 12 and 16, and nothing otherwise.
    """
    vecs = multiplicity_vectors(w)
    if w.type in DIHEDRAL_EXCEPTIONS:
        deg2 = [v.index for v in vecs if v.degree == 2]
        expected = list(combinations(deg2, 2))
    else:
        expected = []
    return UniquenessReport(w.type, _collisions(vecs, "ones"), _collisions(vecs, "signs"), expected,
                            [v.label for v in vecs], [v.degree for v in vecs])
