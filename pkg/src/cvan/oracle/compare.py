"""Comparison of generic tables with oracle tables, and brute-force enumeration."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..cyclo import Cyclotomic, cyclo_sum
from .dixon import OracleTable


def _canon(v):
    return Cyclotomic._coerce(v).canonical()


def _table_view(t) -> tuple[list[int], list[tuple[int, str]], list[list]]:
    """Degrees, (size, ptype) per class and canonical values of a concrete or oracle table."""
    vals = [[_canon(v) for v in row] for row in t.values]
    degs = [int(Cyclotomic._coerce(row[t.identity]).to_fraction()) for row in t.values]
    cls = [(c.size, c.ptype) for c in t.classes]
    return degs, cls, vals


def row_signature(degree: int, cls: Sequence[tuple[int, str]], row: Sequence) -> tuple:
    return (degree, tuple(sorted(zip(cls, row))))


@dataclass
class CrossCheck:
    ok: bool
    order_match: bool
    missing: list[str] = field(default_factory=list)   # concrete rows with no oracle partner
    extra: list[str] = field(default_factory=list)     # oracle rows with no concrete partner
    nearest: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, "order_match": self.order_match, "missing": self.missing,
                "extra": self.extra, "nearest_miss": self.nearest}


def cross_check(ct, ot: OracleTable) -> CrossCheck:
    """Equality of the two tables as unordered sets of rows.

    A row is its degree with the multiset of (class size, class type, value).
    """
    if ct.order != ot.order:
        return CrossCheck(False, False, [f"|G| = {ct.order} vs {ot.order}"])
    da, ca, va = _table_view(ct)
    db, cb, vb = _table_view(ot)
    sa = Counter(row_signature(d, ca, r) for d, r in zip(da, va))
    sb = Counter(row_signature(d, cb, r) for d, r in zip(db, vb))
    miss = sa - sb
    extra = sb - sa
    rep = CrossCheck(not miss and not extra, True)
    labels = {row_signature(d, ca, r): ct.chars[i].label for i, (d, r) in enumerate(zip(da, va))}
    for sig in sorted(miss, key=repr):
        rep.missing.append(labels[sig])
        best = None
        for other in extra:
            if other[0] != sig[0]:
                continue
            diff = sum((Counter(sig[1]) - Counter(other[1])).values())
            if best is None or diff < best[0]:
                best = (diff, other)
        if best is not None:
            rep.nearest.append(f"{labels[sig]}: nearest oracle row of degree {sig[0]} differs at {best[0]} classes")
    rep.extra = [f"degree {sig[0]}" for sig in sorted(extra, key=repr)]
    return rep


def match_tables(ct, ot: OracleTable) -> tuple[list[int], list[int]] | None:
    """A bijection of classes and characters carrying one table onto the other.

    Returns (char_map, class_map) with char_map[i] the oracle row of concrete
    row i, or None when the tables are not isomorphic. Class sizes and types
    are preserved, so the map respects p-singularity.
    """
    if ct.order != ot.order or len(ct.classes) != len(ot.classes):
        return None
    da, ca, va = _table_view(ct)
    db, cb, vb = _table_view(ot)
    r = len(ca)

    def col_inv(cls, vals, j):
        return (cls[j], tuple(sorted(row[j] for row in vals)))

    ia = [col_inv(ca, va, j) for j in range(r)]
    ib = [col_inv(cb, vb, j) for j in range(r)]
    if Counter(ia) != Counter(ib):
        return None
    cand = {j: [k for k in range(r) if ib[k] == ia[j]] for j in range(r)}
    order = sorted(range(r), key=lambda j: (len(cand[j]), j))
    ra = [row_signature(d, ca, row) for d, row in zip(da, va)]
    rb = [row_signature(d, cb, row) for d, row in zip(db, vb)]
    if Counter(ra) != Counter(rb):
        return None
    sig_a = [(s,) for s in ra]
    sig_b = [(s,) for s in rb]
    used = [False] * r
    cmap = [-1] * r

    def dfs(t: int, sa: list, sb: list) -> bool:
        if t == r:
            return True
        j = order[t]
        for k in cand[j]:
            if used[k]:
                continue
            na = [s + (va[i][j],) for i, s in enumerate(sa)]
            nb = [s + (vb[i][k],) for i, s in enumerate(sb)]
            if Counter(na) != Counter(nb):
                continue
            used[k] = True
            cmap[j] = k
            if dfs(t + 1, na, nb):
                return True
            used[k] = False
            cmap[j] = -1
        return False

    if not dfs(0, sig_a, sig_b):
        return None
    where = {tuple(vb[i][cmap[j]] for j in range(r)): i for i in range(r)}
    rmap = [where[tuple(va[i][j] for j in range(r))] for i in range(r)]
    return rmap, cmap


def brute_pvanish(ot: OracleTable, p: int | None = None, kind: str = "pvanish") -> list[tuple[int, ...]]:
    """Multisets of irreducible characters of degree |G|_p vanishing on the target classes.

    kind "pvanish" targets every p-singular class, "sylp" every nonidentity
    p-element. Multisets are sorted tuples of row indices.
    """
    p = p or ot.p
    if p is None or ot.order % p:
        raise ValueError("p must divide the group order")
    target = 1
    while ot.order % (target * p) == 0:
        target *= p
    if kind == "pvanish":
        cols = [j for j, c in enumerate(ot.classes) if c.order % p == 0]
    elif kind == "sylp":
        cols = [j for j, c in enumerate(ot.classes) if c.order > 1 and _is_power(c.order, p)]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    ell = ot.ell
    R = ot.residues[:, cols] % ell
    degs = ot.degrees
    chars = sorted(range(len(degs)), key=lambda i: (-degs[i], i))
    chars = [i for i in chars if degs[i] <= target]
    out = []
    chosen: list[int] = []

    def dfs(k: int, remaining: int, acc: np.ndarray) -> None:
        if remaining == 0:
            if not acc.any():
                idx = tuple(sorted(chosen))
                if all(cyclo_sum(ot.value(i, j) for i in idx).is_zero() for j in cols):
                    out.append(idx)
            return
        if k == len(chars):
            return
        i = chars[k]
        d = degs[i]
        top = remaining // d
        for m in range(top, -1, -1):
            chosen.extend([i] * m)
            dfs(k + 1, remaining - m * d, (acc + m * R[i]) % ell)
            del chosen[len(chosen) - m:]

    dfs(0, target, np.zeros(len(cols), dtype=np.int64))
    return sorted(out)


def _is_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


@dataclass
class SolutionComparison:
    ok: bool
    matched: bool
    concrete: int
    oracle: int
    only_concrete: list[str] = field(default_factory=list)
    only_oracle: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, "tables_matched": self.matched, "concrete_solutions": self.concrete,
                "oracle_solutions": self.oracle, "only_concrete": self.only_concrete,
                "only_oracle": self.only_oracle}


def compare_solutions(ct, ot: OracleTable, sols, kind: str = "pvanish") -> SolutionComparison:
    """Map solutions of the generic table through a table isomorphism and compare."""
    m = match_tables(ct, ot)
    brute = brute_pvanish(ot, ot.p, kind)
    if m is None:
        return SolutionComparison(False, False, len(sols), len(brute))
    rmap, _ = m
    mapped = {tuple(sorted(rmap[i] for i in s.indices(ct))): s for s in sols}
    bset = set(brute)
    rep = SolutionComparison(set(mapped) == bset, True, len(sols), len(brute))
    rep.only_concrete = [mapped[k].label() for k in sorted(set(mapped) - bset)]
    rep.only_oracle = ["+".join(ot.chars[i].label for i in k) for k in sorted(bset - set(mapped))]
    return rep
