"""Syl_p-vanishing and p-vanishing characters of degree |G|_p.

Shapes are multisets of character set ids. A shape is Syl_p-vanishing when the
summed fingerprints (values on the unipotent classes) vanish off the identity
and the degrees add up to |G|_p. Since each fingerprint depends only on the
set, this is an integer linear problem over exact rational coordinates. The
p-vanishing filter then expands the parameters of each shape.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import expr as E
from . import modp
from .cyclo import Cyclotomic, coordinates, cyclo_sum
from .tables.compile import Compiler
from .tables.concrete import ConcreteTable, instantiate
from .tables.registry import get_table

DEFAULT_BUDGET = 10 ** 8
DEFAULT_MAX_TERMS = 6


class SearchBudgetExceeded(RuntimeError):
    """The shape search visited more nodes than its budget allows."""


def _cy(v) -> Cyclotomic:
    return v if isinstance(v, Cyclotomic) else Cyclotomic.rational(v)


# fingerprints


def unipotent_columns(ct: ConcreteTable) -> list[int]:
    """Identity class first, then the nonidentity unipotent classes."""
    rest = [j for j, c in enumerate(ct.classes) if c.ptype == "unipotent"]
    return [ct.identity] + rest


def p_singular_columns(ct: ConcreteTable) -> list[int]:
    return [j for j, c in enumerate(ct.classes) if c.p_singular]


@dataclass(frozen=True)
class Fingerprint:
    set_id: int
    values: tuple[Cyclotomic, ...]

    @property
    def degree(self) -> int:
        return int(self.values[0].to_fraction())


def fingerprint(ct: ConcreteTable, h: int) -> Fingerprint:
    rows = ct.chars_in(h)
    if not rows:
        raise ValueError(f"{ct.family}: unknown or empty character set {h}")
    cols = unipotent_columns(ct)
    return Fingerprint(h, tuple(ct.value(rows[0], j) for j in cols))


# shapes


@dataclass(frozen=True, order=True)
class ShapeSolution:
    """A multiset of set ids; c is the total degree divided by |G|_p."""

    counts: tuple[tuple[int, int], ...]
    c: Fraction = Fraction(1)

    @classmethod
    def from_counts(cls, counts: Mapping[int, int] | Iterable[int], ct: ConcreteTable) -> "ShapeSolution":
        if not isinstance(counts, Mapping):
            counts = Counter(counts)
        items = tuple(sorted((h, m) for h, m in counts.items() if m))
        deg = sum(m * ct.set_degree(h) for h, m in items)
        return cls(items, Fraction(deg, ct.order_p))

    @property
    def vector(self) -> tuple[int, ...]:
        return tuple(h for h, m in self.counts for _ in range(m))

    @property
    def size(self) -> int:
        return sum(m for _, m in self.counts)

    def as_counter(self) -> Counter:
        return Counter(dict(self.counts))

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.vector)) + ")"

    def to_json(self) -> dict:
        return {"v": list(self.vector), "c": str(self.c)}


def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form of an augmented matrix with ncols variable columns."""
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    return rows[:r] + [row for row in rows[r:] if row[-1]], pivots


def _system(fps: Sequence[Fingerprint], target: Sequence[Cyclotomic]) -> list[list[Fraction]]:
    """Rational rows: one per (unipotent class, basis element)."""
    N = 1
    for v in list(target) + [x for fp in fps for x in fp.values]:
        n = v.conductor
        N = N * n // math.gcd(N, n)
    rows = []
    for j in range(len(target)):
        coords = [coordinates(fp.values[j], N) for fp in fps]
        tc = coordinates(target[j], N)
        keys = sorted(set(tc).union(*coords))
        for k in keys:
            rows.append([c.get(k, Fraction(0)) for c in coords] + [tc.get(k, Fraction(0))])
    return rows


def _solve(fps: Sequence[Fingerprint], target: Sequence[Cyclotomic], *, max_total: int | None = None,
           min_total: int = 1, budget: int = DEFAULT_BUDGET) -> list[dict[int, int]]:
    """All nonnegative integer combinations of fingerprints summing to target."""
    if not fps:
        return []
    fps = sorted(fps, key=lambda f: (f.degree, f.set_id))
    n = len(fps)
    rows, pivots = _rref(_system(fps, target), n)
    if any(not any(r[:n]) and r[n] for r in rows):
        return []
    pivot_rows = {p: rows[i] for i, p in enumerate(pivots)}
    free = sorted((c for c in range(n) if c not in pivot_rows), key=lambda c: -fps[c].degree)
    total_deg = int(_cy(target[0]).to_fraction())
    out: list[dict[int, int]] = []
    x = [0] * n
    nodes = 0

    def finish() -> None:
        for p, row in pivot_rows.items():
            v = row[n] - sum(row[f] * x[f] for f in free)
            if v < 0 or v.denominator != 1:
                return
            x[p] = int(v)
        size = sum(x)
        if size < min_total or (max_total is not None and size > max_total):
            return
        out.append({fps[c].set_id: x[c] for c in range(n) if x[c]})

    def dfs(k: int, remaining: int, used: int) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(f"shape search exceeded {budget} nodes")
        if k == len(free):
            finish()
            return
        c = free[k]
        top = remaining // fps[c].degree
        if max_total is not None:
            top = min(top, max_total - used)
        for m in range(top, -1, -1):
            x[c] = m
            dfs(k + 1, remaining - m * fps[c].degree, used + m)
        x[c] = 0

    dfs(0, total_deg, 0)
    return out


def _sorted_shapes(shapes: Iterable[ShapeSolution]) -> list[ShapeSolution]:
    return sorted(set(shapes), key=lambda s: s.vector)


def enumerate_sylp(ct: ConcreteTable, budget: int = DEFAULT_BUDGET) -> list[ShapeSolution]:
    """Every shape of degree |G|_p whose fingerprint sum vanishes off the identity."""
    fps = [fingerprint(ct, h) for h in ct.set_ids()]
    target = [Cyclotomic.rational(ct.order_p)] + [Cyclotomic.rational(0)] * (len(fps[0].values) - 1)
    sols = _solve(fps, target, budget=budget)
    return _sorted_shapes(ShapeSolution.from_counts(s, ct) for s in sols)


def sylp_decompositions(ct: ConcreteTable, h: int, max_terms: int = DEFAULT_MAX_TERMS,
                        budget: int = DEFAULT_BUDGET) -> list[ShapeSolution]:
    """Multisets of strictly smaller-degree sets restricting to the Sylow p-subgroup like set h."""
    if max_terms < 2:
        raise ValueError("max_terms must be at least 2")
    if h not in ct.set_ids():
        raise ValueError(f"{ct.family} at {ct.ctx.label}: unknown character set {h}")
    fp = fingerprint(ct, h)
    smaller = [fingerprint(ct, g) for g in ct.set_ids() if ct.set_degree(g) < fp.degree]
    sols = _solve(smaller, fp.values, max_total=max_terms, min_total=2, budget=budget)
    return _sorted_shapes(ShapeSolution.from_counts(s, ct) for s in sols)


def all_decompositions(ct: ConcreteTable, max_terms: int = DEFAULT_MAX_TERMS) -> dict[int, list[ShapeSolution]]:
    return {h: sylp_decompositions(ct, h, max_terms) for h in ct.set_ids()}


def delta_set(ct: ConcreteTable, max_terms: int = DEFAULT_MAX_TERMS) -> set[int]:
    """Set ids with no decomposition into smaller sets."""
    return {h for h, ds in all_decompositions(ct, max_terms).items() if not ds}


def table_b_missing(ct: ConcreteTable, max_terms: int = DEFAULT_MAX_TERMS) -> list[tuple[int, tuple[int, ...]]]:
    """Table B rows of the table document that the decomposition search does not find."""
    present = set(ct.set_ids())
    missing = []
    cache: dict[int, set] = {}
    for row in ct.table.fixtures().get("table_b", []):
        lhs, rhs = int(row["lhs"]), tuple(sorted(int(x) for x in row["rhs"]))
        if lhs not in present or any(x not in present for x in rhs) or len(rhs) > max_terms:
            continue
        if lhs not in cache:
            cache[lhs] = {s.vector for s in sylp_decompositions(ct, lhs, max_terms)}
        if rhs not in cache[lhs]:
            missing.append((lhs, rhs))
    return missing


def rewrite_closure(seeds: Iterable[ShapeSolution], rules: Mapping[int, Sequence[ShapeSolution]],
                    ct: ConcreteTable) -> list[ShapeSolution]:
    """Close a set of shapes under replacing a decomposition by its set, and back."""
    pairs = [(Counter({h: 1}), rhs.as_counter()) for h, rs in rules.items() for rhs in rs]
    seen = {s.counts: s for s in seeds}
    todo = deque(seen.values())
    while todo:
        cur = todo.popleft().as_counter()
        for lhs, rhs in pairs:
            for a, b in ((rhs, lhs), (lhs, rhs)):
                if all(cur[k] >= m for k, m in a.items()):
                    new = ShapeSolution.from_counts(cur - a + b, ct)
                    if new.counts not in seen:
                        seen[new.counts] = new
                        todo.append(new)
    return _sorted_shapes(seen.values())


def staged_sylp(ct: ConcreteTable, max_terms: int = DEFAULT_MAX_TERMS) -> list[ShapeSolution]:
    """Solutions built from the indecomposable sets, closed under the decompositions."""
    rules = all_decompositions(ct, max_terms)
    delta = [h for h, ds in rules.items() if not ds]
    fps = [fingerprint(ct, h) for h in delta]
    zeros = [Cyclotomic.rational(0)] * (len(unipotent_columns(ct)) - 1)
    seeds = [ShapeSolution.from_counts(s, ct)
             for s in _solve(fps, [Cyclotomic.rational(ct.order_p)] + zeros)]
    return rewrite_closure(seeds, rules, ct)


# parameter expansion


@dataclass(frozen=True)
class VanishingSolution:
    family: str
    q: int
    kind: str  # "sylp" or "pvanish"
    constituents: tuple[tuple[int, tuple[int, ...], int], ...]

    @classmethod
    def from_indices(cls, ct: ConcreteTable, idx: Iterable[int], kind: str) -> "VanishingSolution":
        cnt = Counter(idx)
        items = sorted((ct.chars[i].set_id, ct.chars[i].params, m) for i, m in cnt.items())
        return cls(ct.family, ct.q, kind, tuple(items))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(h for h, _, m in self.constituents for _ in range(m))

    @property
    def size(self) -> int:
        return sum(m for _, _, m in self.constituents)

    @property
    def reducible(self) -> bool:
        return self.size >= 2

    def sort_key(self):
        return (self.shape, tuple((h, p) for h, p, m in self.constituents for _ in range(m)))

    def indices(self, ct: ConcreteTable) -> list[int]:
        return [ct.char_index(h, p) for h, p, m in self.constituents for _ in range(m)]

    def degree(self, ct: ConcreteTable) -> int:
        return sum(m * ct.chars[ct.char_index(h, p)].degree for h, p, m in self.constituents)

    def c_value(self, ct: ConcreteTable) -> Fraction:
        return Fraction(self.degree(ct), ct.order_p)

    def label(self) -> str:
        parts = []
        for h, p, m in self.constituents:
            t = f"X{h}" + ("(" + ",".join(map(str, p)) + ")" if p else "")
            parts.append(t if m == 1 else f"{m}*{t}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "q": self.q,
            "kind": self.kind,
            "constituents": [{"set": h, "params": list(p), "mult": m} for h, p, m in self.constituents],
        }


def solution_values(ct: ConcreteTable, sol: VanishingSolution) -> list[Cyclotomic]:
    """Exact values of the solution character on every class."""
    idx = sol.indices(ct)
    return [cyclo_sum(_cy(ct.values[i][j]) for i in idx) for j in range(len(ct.classes))]


def is_vanishing(ct: ConcreteTable, idx: Sequence[int], cols: Sequence[int]) -> bool:
    return all(cyclo_sum(_cy(ct.values[i][j]) for i in idx).is_zero() for j in cols)


def check_solution(ct: ConcreteTable, sol: VanishingSolution) -> bool:
    """Degree |G|_p and exact vanishing on the targeted classes."""
    idx = sol.indices(ct)
    cols = p_singular_columns(ct) if sol.kind == "pvanish" else unipotent_columns(ct)[1:]
    return sol.degree(ct) == ct.order_p and is_vanishing(ct, idx, cols)


class _Residues:
    """Images of the table restricted to some classes under two ring maps to F_l."""

    def __init__(self, ct: ConcreteTable, cols: Sequence[int]):
        rows = [[ct.values[i][j] for j in cols] for i in range(len(ct.chars))]
        self.flat = modp.FlatTable(rows)
        gen = modp.iter_split_primes(self.flat.N)
        self.primes = (next(gen), next(gen))
        self.mats = [self.flat.embed(ell) for ell in self.primes]

    def vectors(self, combos: Sequence[tuple[int, ...]]) -> np.ndarray:
        parts = []
        for ell, mat in zip(self.primes, self.mats):
            acc = np.zeros((len(combos), mat.shape[1]), dtype=np.int64)
            width = len(combos[0]) if combos else 0
            arr = np.array(combos, dtype=np.int64).reshape(len(combos), width)
            for k in range(width):
                acc = (acc + mat[arr[:, k]]) % ell
            parts.append(acc)
        return np.concatenate(parts, axis=1) if parts else np.zeros((0, 0), dtype=np.int64)

    def negate(self, vecs: np.ndarray) -> np.ndarray:
        w = self.mats[0].shape[1]
        out = vecs.copy()
        out[:, :w] = (-out[:, :w]) % self.primes[0]
        out[:, w:] = (-out[:, w:]) % self.primes[1]
        return out


def _expand_shape(ct: ConcreteTable, shape: ShapeSolution, cols: Sequence[int],
                  res: _Residues | None) -> list[tuple[int, ...]]:
    groups = [list(itertools.combinations_with_replacement(ct.chars_in(h), m)) for h, m in shape.counts]
    if not cols:
        return [tuple(itertools.chain(*p)) for p in itertools.product(*groups)]
    if res is None:
        return [idx for idx in (tuple(itertools.chain(*p)) for p in itertools.product(*groups))
                if is_vanishing(ct, idx, cols)]
    # meet in the middle on the largest group
    order = sorted(range(len(groups)), key=lambda g: len(groups[g]))
    last = order[-1]
    left = [tuple(itertools.chain(*p)) for p in itertools.product(*(groups[g] for g in order[:-1]))]
    right = groups[last]
    table: dict[bytes, list[int]] = {}
    rv = res.vectors(right)
    for k, v in enumerate(rv):
        table.setdefault(v.tobytes(), []).append(k)
    out = []
    lv = res.negate(res.vectors(left)) if left and left[0] else np.zeros((1, rv.shape[1]), dtype=np.int64)
    for a, v in zip(left, lv):
        for k in table.get(v.tobytes(), ()):
            idx = a + right[k]
            if is_vanishing(ct, idx, cols):
                out.append(idx)
    return out


def expand_shapes(ct: ConcreteTable, shapes: Iterable[ShapeSolution], kind: str = "pvanish") -> list[VanishingSolution]:
    """All parameter assignments of the shapes vanishing on the classes selected by kind."""
    if kind not in ("sylp", "pvanish"):
        raise ValueError(f"unknown kind {kind!r}")
    cols = p_singular_columns(ct) if kind == "pvanish" else []
    res = None
    if cols:
        try:
            res = _Residues(ct, cols)
        except ArithmeticError:
            res = None
    sols = set()
    for shape in shapes:
        for idx in _expand_shape(ct, shape, cols, res):
            sols.add(VanishingSolution.from_indices(ct, idx, kind))
    return sorted(sols, key=VanishingSolution.sort_key)


def filter_pvanish(ct: ConcreteTable, shapes: Iterable[ShapeSolution]) -> list[VanishingSolution]:
    """Parameter assignments of Syl_p-vanishing shapes that vanish on every p-singular class."""
    return expand_shapes(ct, shapes, "pvanish")


def pvanishing_solutions(ct: ConcreteTable, budget: int = DEFAULT_BUDGET) -> list[VanishingSolution]:
    return filter_pvanish(ct, enumerate_sylp(ct, budget))


# properties


def is_steinberg_type(ct: ConcreteTable, sol: VanishingSolution) -> bool:
    return sol.size == 1 and sol.degree(ct) == ct.order_p


def table_d(ct: ConcreteTable) -> dict | None:
    """The value table of the reducible p-vanishing characters, if it applies at this q."""
    spec = ct.table.fixtures().get("table_d")
    if not spec:
        return None
    cond = spec.get("condition")
    if cond and not Compiler(ct.ctx).pred_text(cond):
        return None
    return spec


def _free_assignments(spec: Mapping, comp: Compiler) -> list[dict[str, int]]:
    free = spec.get("free", {})
    names = sorted(free)
    ranges = [range(comp.int_text(free[n])) for n in names]
    return [dict(zip(names, t)) for t in itertools.product(*ranges)]


def untwisted_values(ct: ConcreteTable, sol: VanishingSolution,
                     values: Sequence[Cyclotomic] | None = None) -> list[Cyclotomic]:
    """Values with the linear twist removed.

    A reducible solution with one linear constituent lam is multiplied by the
    conjugate of lam; a Steinberg-type solution lam*St becomes St.
    """
    vals = list(values) if values is not None else solution_values(ct, sol)
    if is_steinberg_type(ct, sol):
        st = ct.steinberg_index()
        for lam in ct.linear_indices():
            tw = [v * ct.value(lam, j).conj() for j, v in enumerate(vals)]
            if all(tw[j] == ct.value(st, j) for j in range(len(vals))):
                return tw
        return vals
    lin = [ct.char_index(h, p) for h, p, m in sol.constituents if ct.chars[ct.char_index(h, p)].degree == 1]
    if len(lin) == 1:
        return [v * ct.value(lin[0], j).conj() for j, v in enumerate(vals)]
    return vals


def matches_table_d(ct: ConcreteTable, sol: VanishingSolution,
                    values: Sequence[Cyclotomic] | None = None) -> bool | None:
    """Whether the untwisted solution has the tabulated values.

    Listed classes must match the expressions for one assignment of the free
    variables; every other class must carry the Steinberg value.
    """
    spec = table_d(ct)
    if spec is None or is_steinberg_type(ct, sol):
        return None
    vals = untwisted_values(ct, sol, values)
    comp = Compiler(ct.ctx)
    exprs = {name: comp.scalar(E.parse(text)) for name, text in spec["classes"].items()}
    st = ct.steinberg_index()
    plain = [j for j, c in enumerate(ct.classes) if c.name not in exprs]
    if any(vals[j] != ct.value(st, j) for j in plain):
        return False
    listed = [j for j, c in enumerate(ct.classes) if c.name in exprs]
    for env in _free_assignments(spec, comp):
        ok = True
        for j in listed:
            c = ct.classes[j]
            local = dict(env)
            local.update({f"l{i + 1}": v for i, v in enumerate(c.params)})
            if vals[j] != _cy(exprs[c.name](local)):
                ok = False
                break
        if ok:
            return True
    return False


@dataclass(frozen=True)
class PropertyReport:
    real_valued: bool
    real_up_to_twist: bool
    nonzero_on_semisimple: bool
    linear_constituent_count: int
    multiplicity_free: bool
    trivial_multiplicity: int
    steinberg_type: bool
    matches_table_d: bool | None

    def to_json(self) -> dict:
        return {
            "real_valued": self.real_valued,
            "real_up_to_twist": self.real_up_to_twist,
            "nonzero_on_semisimple": self.nonzero_on_semisimple,
            "linear_constituent_count": self.linear_constituent_count,
            "multiplicity_free": self.multiplicity_free,
            "trivial_multiplicity": self.trivial_multiplicity,
            "steinberg_type": self.steinberg_type,
            "matches_table_d": self.matches_table_d,
        }


def report_properties(sol: VanishingSolution, ct: ConcreteTable) -> PropertyReport:
    vals = solution_values(ct, sol)
    plain = untwisted_values(ct, sol, vals)
    semisimple = [j for j, c in enumerate(ct.classes) if c.ptype in ("identity", "semisimple")]
    idx = [ct.char_index(h, p) for h, p, m in sol.constituents]
    mults = [m for _, _, m in sol.constituents]
    triv = ct.trivial_index()
    return PropertyReport(
        real_valued=all(v.is_real() for v in vals),
        real_up_to_twist=all(v.is_real() for v in plain),
        nonzero_on_semisimple=all(not vals[j].is_zero() for j in semisimple),
        linear_constituent_count=sum(m for i, m in zip(idx, mults) if ct.chars[i].degree == 1),
        multiplicity_free=all(m == 1 for m in mults),
        trivial_multiplicity=sum(m for i, m in zip(idx, mults) if i == triv),
        steinberg_type=is_steinberg_type(ct, sol),
        matches_table_d=matches_table_d(ct, sol, vals),
    )


# closed-form counts


@dataclass(frozen=True)
class CountCheck:
    family: str
    q: int
    expected: int
    found: int

    @property
    def ok(self) -> bool:
        return self.expected == self.found

    def to_json(self) -> dict:
        return {"family": self.family, "q": self.q, "expected": self.expected,
                "found": self.found, "ok": self.ok}


def expected_count(ct: ConcreteTable) -> int:
    text = ct.table.counts().get("reducible")
    if text is None:
        raise LookupError(f"{ct.family}: no closed-form count stored")
    v = Compiler(ct.ctx).const_text(text)
    if isinstance(v, Cyclotomic):
        v = v.to_fraction()
    if Fraction(v).denominator != 1:
        raise ValueError(f"{ct.family}: count {v} is not an integer")
    return int(v)


def count_check(family: str, q: int, budget: int = DEFAULT_BUDGET) -> CountCheck:
    ct = instantiate(get_table(family), q)
    found = sum(s.reducible for s in pvanishing_solutions(ct, budget))
    return CountCheck(family, ct.q, expected_count(ct), found)
