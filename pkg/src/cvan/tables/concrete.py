"""Instantiation of a generic table at a concrete prime power."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .. import expr as E
from ..cyclo import Cyclotomic, QContext
from ..ff import factor_prime_power
from .compile import Compiler, EvalError
from .model import CharSet, ClassSet, GenericTable, ParamSpace


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class CharEntry:
    set_id: int
    params: tuple[int, ...]
    degree: int

    @property
    def label(self) -> str:
        return f"X{self.set_id}{_fmt(self.params)}"


@dataclass(frozen=True)
class ClassEntry:
    set_id: int
    name: str
    params: tuple[int, ...]
    size: int
    ptype: str

    @property
    def p_singular(self) -> bool:
        return self.ptype in ("unipotent", "mixed")

    @property
    def label(self) -> str:
        return f"{self.name}[{self.set_id}]{_fmt(self.params)}"


def _fmt(params: Sequence[int]) -> str:
    return "(" + ",".join(map(str, params)) + ")" if params else ""


class ConcreteTable:
    """A generic table evaluated at one q: exact values, sizes, parameters."""

    def __init__(self, table: GenericTable, ctx: QContext, order: int, order_p: int,
                 chars: list[CharEntry], classes: list[ClassEntry], values: list[list]):
        self.table = table
        self.family = table.family
        self.ctx = ctx
        self.order = order
        self.order_p = order_p
        self.p = ctx.p
        self.chars = chars
        self.classes = classes
        self.values = values
        self._char_index = {(c.set_id, c.params): i for i, c in enumerate(chars)}
        self._class_index = {(c.set_id, c.params): j for j, c in enumerate(classes)}
        self.identity = next(j for j, c in enumerate(classes) if c.ptype == "identity")

    @property
    def q(self) -> int:
        return self.ctx.q2 if self.ctx.d != 1 else self.ctx.c

    def __len__(self) -> int:
        return len(self.chars)

    def char_index(self, set_id: int, params: Sequence[int] = ()) -> int:
        try:
            return self._char_index[(set_id, tuple(params))]
        except KeyError:
            raise KeyError(f"{self.family} at {self.ctx.label}: no character X{set_id}{_fmt(params)}") from None

    def class_index(self, set_id: int, params: Sequence[int] = ()) -> int:
        try:
            return self._class_index[(set_id, tuple(params))]
        except KeyError:
            raise KeyError(f"{self.family} at {self.ctx.label}: no class {set_id}{_fmt(params)}") from None

    def chars_in(self, set_id: int) -> list[int]:
        return [i for i, c in enumerate(self.chars) if c.set_id == set_id]

    def classes_in(self, set_id: int) -> list[int]:
        return [j for j, c in enumerate(self.classes) if c.set_id == set_id]

    def set_ids(self) -> list[int]:
        """Character set ids that are non-empty at this q."""
        return sorted({c.set_id for c in self.chars})

    def set_degree(self, set_id: int) -> int:
        return self.chars[self.chars_in(set_id)[0]].degree

    def value(self, i: int, j: int) -> Cyclotomic:
        v = self.values[i][j]
        return v if isinstance(v, Cyclotomic) else Cyclotomic.rational(v)

    def row(self, i: int) -> list:
        return self.values[i]

    def with_values(self, values: list[list]) -> "ConcreteTable":
        return ConcreteTable(self.table, self.ctx, self.order, self.order_p,
                             self.chars, self.classes, values)

    def steinberg_index(self) -> int:
        st = self.table.steinberg.id
        for i in self.chars_in(st):
            if self.chars[i].params == tuple(0 for _ in self.chars[i].params):
                return i
        return self.chars_in(st)[0]

    def linear_indices(self) -> list[int]:
        return [i for i, c in enumerate(self.chars) if c.degree == 1]

    def trivial_index(self) -> int:
        for i in self.linear_indices():
            if all(self.value(i, j) == 1 for j in range(len(self.classes))):
                return i
        raise LookupError("no trivial character")


def context_for(table: GenericTable, q: int | QContext) -> QContext:
    """Build the evaluation context for a user-supplied q (q^2 for twisted families)."""
    if isinstance(q, QContext):
        ctx = q
    elif table.twist != 1:
        try:
            ctx = QContext.twisted(q, table.twist)
        except ValueError as exc:
            raise ConstraintError(f"{table.family}: {exc}") from None
    else:
        try:
            factor_prime_power(q)
        except ValueError:
            raise ConstraintError(f"{table.family}: q={q} is not a prime power") from None
        ctx = QContext.untwisted(q)
    comp = Compiler(ctx)
    for c in table.q_constraints:
        if not comp.pred_text(c):
            raise ConstraintError(f"{table.family}: {ctx.label} violates constraint {c!r}")
    return ctx


def admissible(table: GenericTable, q: int) -> bool:
    try:
        context_for(table, q)
    except ConstraintError:
        return False
    return True


def expand_params(ps: ParamSpace, prefix: str, comp: Compiler) -> list[tuple[int, ...]]:
    """Orbit representatives of the admissible parameter tuples, sorted."""
    if ps.is_trivial():
        return [()]
    names = [f"{prefix}{i + 1}" for i in range(ps.arity)]
    mods = [comp.int_text(f) for f in ps.factors]
    if any(m < 1 for m in mods):
        raise EvalError(f"parameter modulus {mods} is not positive")
    excs = [comp.pred(E.parse_pred(x)) for x in ps.exceptions]
    gens = [[comp.integer(E.parse(f)) for f in sym] for sym in ps.symmetries]

    def allowed(t) -> bool:
        env = dict(zip(names, t))
        return not any(ex(env) for ex in excs)

    def apply(gen, t):
        env = dict(zip(names, t))
        return tuple(f(env) % m for f, m in zip(gen, mods))

    points = [t for t in itertools.product(*(range(m) for m in mods)) if allowed(t)]
    if not gens:
        return points
    live = set(points)
    seen: set = set()
    reps = []
    for t in points:
        if t in seen:
            continue
        orbit = {t}
        stack = [t]
        while stack:
            x = stack.pop()
            for g in gens:
                y = apply(g, x)
                if y not in orbit:
                    if y not in live:
                        raise EvalError(f"symmetry maps {x} outside the parameter set")
                    orbit.add(y)
                    stack.append(y)
        seen |= orbit
        reps.append(min(orbit))
    return sorted(reps)


def _active(cond: str | None, comp: Compiler) -> bool:
    return cond is None or comp.pred_text(cond)


_CACHE: dict = {}


def instantiate(table: GenericTable, q: int | QContext) -> ConcreteTable:
    """Expand parameters and evaluate every value exactly at q."""
    ctx = context_for(table, q)
    key = (table.family, table.document, ctx.key())
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    comp = Compiler(ctx)
    order = comp.int_text(table.order)
    order_p = comp.int_text(table.order_p)

    classes: list[ClassEntry] = []
    class_sets: list[tuple[ClassSet, list]] = []
    for cs in sorted(table.class_sets, key=lambda c: c.id):
        if not _active(cs.condition, comp):
            continue
        if cs.size is not None:
            size = comp.const_text(cs.size)
        else:
            size = Fraction(order) / _rational(comp.const_text(cs.centralizer), f"class set {cs.id} centralizer")
        size = _int_or_fail(size, f"class set {cs.id} size")
        reps = expand_params(cs.params, "l", comp)
        class_sets.append((cs, reps))
        for r in reps:
            classes.append(ClassEntry(cs.id, cs.name, r, size, cs.ptype))

    chars: list[CharEntry] = []
    values: list[list] = []
    for ch in sorted(table.char_sets, key=lambda c: c.id):
        if not _active(ch.condition, comp):
            continue
        degree = _int_or_fail(comp.const_text(ch.degree), f"degree of set {ch.id}")
        reps = expand_params(ch.params, "k", comp)
        active = {cs.id for cs, _ in class_sets}
        fns = {cid: comp.scalar(E.parse(text)) for cid, text in ch.values if cid in active}
        for k in reps:
            kenv = {f"k{i + 1}": v for i, v in enumerate(k)}
            row = []
            for cs, creps in class_sets:
                fn = fns[cs.id]
                for l in creps:
                    env = dict(kenv)
                    env.update({f"l{i + 1}": v for i, v in enumerate(l)})
                    try:
                        row.append(_normalize(fn(env)))
                    except (EvalError, ZeroDivisionError, KeyError) as exc:
                        raise EvalError(f"{table.family} X{ch.id}{_fmt(k)} at class {cs.id}{_fmt(l)}: {exc}") from None
            chars.append(CharEntry(ch.id, k, degree))
            values.append(row)

    ct = ConcreteTable(table, ctx, order, order_p, chars, classes, values)
    for i, c in enumerate(chars):
        v = ct.value(i, ct.identity)
        if v != c.degree:
            raise EvalError(f"{table.family} {c.label}: identity value {v} differs from degree {c.degree}")
    _CACHE[key] = ct
    return ct


def _normalize(v):
    if isinstance(v, Cyclotomic):
        if v.n == 1:
            return Fraction(v.c.get(0, 0))
        return v.to_fraction() if v.is_rational() else v
    return Fraction(v)


def _rational(v, what: str) -> Fraction:
    if isinstance(v, Cyclotomic):
        if not v.is_rational():
            raise EvalError(f"{what} is irrational: {v}")
        return v.to_fraction()
    return Fraction(v)


def _int_or_fail(v, what: str) -> int:
    v = _rational(v, what)
    if v.denominator != 1:
        raise EvalError(f"{what} is not an integer: {v}")
    return int(v)


def _locate(entries, ref, by_key) -> int:
    if isinstance(ref, int):
        return ref
    if isinstance(ref, (CharEntry, ClassEntry)):
        return by_key(ref.set_id, ref.params)
    if isinstance(ref, str):
        hit = [k for k, e in enumerate(entries) if e.label == ref]
        if not hit:
            raise KeyError(f"unknown label {ref!r}")
        return hit[0]
    return by_key(ref[0], tuple(ref[1]) if len(ref) > 1 else ())


def character_value(ct: ConcreteTable, char, cls) -> Cyclotomic:
    """Exact value of a character at a class.

    Characters and classes are given as indices, entries, labels or (set-id, params).
    """
    i = _locate(ct.chars, char, ct.char_index)
    j = _locate(ct.classes, cls, ct.class_index)
    if not (0 <= i < len(ct.chars)) or not (0 <= j < len(ct.classes)):
        raise KeyError("character or class index out of range")
    return ct.value(i, j).reduced()
