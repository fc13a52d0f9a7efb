"""In-memory model of a generic character table and its document schema.

A table document is a JSON tree. Every expression inside it is kept as the
original string, so serializing a loaded table gives back the same tree.
"""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .. import expr as E

PTYPES = ("identity", "unipotent", "semisimple", "mixed")
FLAG_KEYS = ("is_steinberg", "is_trivial_family", "regular", "cuspidal")
TOP_KEYS = ("family", "q_constraints", "order", "order_p", "class_sets", "char_sets", "fixtures")
OPTIONAL_TOP = ("twist", "counts", "description", "generic_range")
CONSTANTS = {"q", "gauss", "sqrt2", "sqrt3"}
FUNCTIONS = {"zeta", "re", "conj"}


class SchemaError(ValueError):
    """A table document violates the schema; ``location`` names the offending node."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


@dataclass(frozen=True)
class ParamSpace:
    factors: tuple[str, ...] = ()
    exceptions: tuple[str, ...] = ()
    symmetries: tuple[tuple[str, ...], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.factors)

    def is_trivial(self) -> bool:
        return not self.factors


@dataclass(frozen=True)
class ClassSet:
    id: int
    name: str
    params: ParamSpace
    ptype: str
    size: str | None = None
    centralizer: str | None = None
    condition: str | None = None

    @property
    def p_singular(self) -> bool:
        return self.ptype in ("unipotent", "mixed")


@dataclass(frozen=True)
class CharSet:
    id: int
    degree: str
    params: ParamSpace
    values: tuple[tuple[int, str], ...]
    flags: tuple[tuple[str, bool], ...] = ()
    condition: str | None = None

    def flag(self, key: str, default: bool = False) -> bool:
        return dict(self.flags).get(key, default)

    def value_expr(self, class_id: int) -> str:
        return dict(self.values)[class_id]


@dataclass(frozen=True)
class GenericTable:
    family: str
    q_constraints: tuple[str, ...]
    order: str
    order_p: str
    class_sets: tuple[ClassSet, ...]
    char_sets: tuple[CharSet, ...]
    twist: int = 1
    document: str = field(default="", compare=False, repr=False)

    def char_set(self, h: int) -> CharSet:
        for cs in self.char_sets:
            if cs.id == h:
                return cs
        raise KeyError(f"{self.family}: no character set {h}")

    def class_set(self, h: int) -> ClassSet:
        for cs in self.class_sets:
            if cs.id == h:
                return cs
        raise KeyError(f"{self.family}: no class set {h}")

    @property
    def identity_class(self) -> ClassSet:
        return next(c for c in self.class_sets if c.ptype == "identity")

    @property
    def steinberg(self) -> CharSet:
        return next(c for c in self.char_sets if c.flag("is_steinberg"))

    def tree(self) -> dict:
        """The original document tree."""
        return json.loads(self.document)

    def fixtures(self) -> dict:
        return self.tree().get("fixtures", {})

    def counts(self) -> dict:
        return self.tree().get("counts", {})


# schema checks

def _need(node: Mapping, key: str, loc: str) -> Any:
    if not isinstance(node, Mapping):
        raise SchemaError(loc, "expected an object")
    if key not in node:
        raise SchemaError(loc, f"missing field {key!r}")
    return node[key]


def _parse(text: Any, loc: str, allowed: set[str] | None = None, pred: bool = False):
    if not isinstance(text, (str, int)):
        raise SchemaError(loc, f"expected an expression string, got {type(text).__name__}")
    try:
        node = E.parse_pred(str(text)) if pred else E.parse(str(text))
    except E.ExprError as exc:
        raise SchemaError(loc, f"malformed expression: {exc}") from None
    if allowed is not None:
        _check_names(node, allowed, loc)
    return node


def _check_names(node, allowed: set[str], loc: str) -> None:
    kind = node[0]
    if kind == "var":
        if node[1] not in allowed:
            raise SchemaError(loc, f"undeclared name {node[1]!r}")
        return
    if kind == "call":
        if node[1] not in FUNCTIONS:
            raise SchemaError(loc, f"unknown function {node[1]!r}")
        for a in node[2]:
            _check_names(a, allowed, loc)
        return
    if kind == "case":
        for p, e in node[1]:
            _check_names(p, allowed, loc)
            _check_names(e, allowed, loc)
        return
    for child in node[1:]:
        if isinstance(child, tuple):
            _check_names(child, allowed, loc)


def _param_names(prefix: str, n: int) -> set[str]:
    return {f"{prefix}{i + 1}" for i in range(n)}


def _load_params(node: Any, prefix: str, loc: str) -> ParamSpace:
    if node is None:
        return ParamSpace()
    if not isinstance(node, Mapping):
        raise SchemaError(loc, "params must be an object")
    factors = node.get("factors", [])
    if not isinstance(factors, list):
        raise SchemaError(f"{loc}.factors", "expected a list")
    for i, f in enumerate(factors):
        _parse(f, f"{loc}.factors[{i}]", CONSTANTS)
    names = _param_names(prefix, len(factors)) | CONSTANTS
    exceptions = node.get("exceptions", [])
    for i, ex in enumerate(exceptions):
        tree = _parse(ex, f"{loc}.exceptions[{i}]", names, pred=True)
        if tree[0] not in ("divides", "and"):
            raise SchemaError(f"{loc}.exceptions[{i}]", "exception must be a divisibility condition")
    symmetries = node.get("symmetries", [])
    for i, sym in enumerate(symmetries):
        if not isinstance(sym, list) or len(sym) != len(factors):
            raise SchemaError(f"{loc}.symmetries[{i}]", f"expected a list of {len(factors)} forms")
        for j, form in enumerate(sym):
            _parse(form, f"{loc}.symmetries[{i}][{j}]", names)
    return ParamSpace(
        tuple(str(f) for f in factors),
        tuple(str(e) for e in exceptions),
        tuple(tuple(str(x) for x in s) for s in symmetries),
    )


def load_table(document: str | Mapping | Path) -> GenericTable:
    """Parse and check a table document (JSON text, path or tree)."""
    if isinstance(document, Path):
        document = document.read_text(encoding="utf-8")
    if isinstance(document, str):
        try:
            tree = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError("<document>", f"invalid JSON: {exc}") from None
    else:
        tree = copy.deepcopy(dict(document))

    for key in TOP_KEYS:
        _need(tree, key, "<root>")
    unknown = set(tree) - set(TOP_KEYS) - set(OPTIONAL_TOP)
    if unknown:
        raise SchemaError("<root>", f"unknown fields {sorted(unknown)}")
    family = tree["family"]
    if not isinstance(family, str) or not re.fullmatch(r"[a-z0-9][a-z0-9.\-]*", family):
        raise SchemaError("family", f"bad family identifier {family!r}")
    twist = tree.get("twist", 1)
    if twist not in (1, 2, 3):
        raise SchemaError("twist", "must be 1, 2 or 3")
    qc = tree["q_constraints"]
    if not isinstance(qc, list):
        raise SchemaError("q_constraints", "expected a list")
    for i, c in enumerate(qc):
        _parse(c, f"q_constraints[{i}]", CONSTANTS, pred=True)
    _parse(tree["order"], "order", CONSTANTS)
    _parse(tree["order_p"], "order_p", CONSTANTS)

    class_sets = []
    seen: set[int] = set()
    for i, node in enumerate(tree["class_sets"]):
        loc = f"class_sets[{i}]"
        cid = _need(node, "id", loc)
        if not isinstance(cid, int) or cid in seen:
            raise SchemaError(f"{loc}.id", f"duplicate or non-integer set-id {cid!r}")
        seen.add(cid)
        ptype = _need(node, "ptype", loc)
        if ptype not in PTYPES:
            raise SchemaError(f"{loc}.ptype", f"unknown ptype {ptype!r}")
        has_size, has_cent = "size" in node, "centralizer" in node
        if has_size == has_cent:
            raise SchemaError(loc, "exactly one of 'size' and 'centralizer' is required")
        key = "size" if has_size else "centralizer"
        _parse(node[key], f"{loc}.{key}", CONSTANTS)
        params = _load_params(node.get("params"), "l", f"{loc}.params")
        cond = node.get("condition")
        if cond is not None:
            _parse(cond, f"{loc}.condition", CONSTANTS, pred=True)
        class_sets.append(ClassSet(
            cid, str(node.get("name", f"C{cid}")), params, ptype,
            size=str(node["size"]) if has_size else None,
            centralizer=str(node["centralizer"]) if has_cent else None,
            condition=cond,
        ))
    idents = [c for c in class_sets if c.ptype == "identity"]
    if len(idents) != 1 or not idents[0].params.is_trivial():
        raise SchemaError("class_sets", "need exactly one identity class set with trivial parameters")
    class_arity = {c.id: c.params.arity for c in class_sets}

    char_sets = []
    seen = set()
    for i, node in enumerate(tree["char_sets"]):
        loc = f"char_sets[{i}]"
        hid = _need(node, "id", loc)
        if not isinstance(hid, int) or hid in seen:
            raise SchemaError(f"{loc}.id", f"duplicate or non-integer set-id {hid!r}")
        seen.add(hid)
        _parse(_need(node, "degree", loc), f"{loc}.degree", CONSTANTS)
        params = _load_params(node.get("params"), "k", f"{loc}.params")
        kn = _param_names("k", params.arity)
        values = _need(node, "values", loc)
        if not isinstance(values, Mapping):
            raise SchemaError(f"{loc}.values", "expected an object keyed by class-set id")
        vals = []
        for cid_s, text in values.items():
            try:
                cid = int(cid_s)
            except ValueError:
                raise SchemaError(f"{loc}.values", f"bad class-set key {cid_s!r}") from None
            if cid not in class_arity:
                raise SchemaError(f"{loc}.values.{cid_s}", "unknown class set")
            allowed = CONSTANTS | kn | _param_names("l", class_arity[cid])
            _parse(text, f"{loc}.values.{cid_s}", allowed)
            vals.append((cid, str(text)))
        missing = set(class_arity) - {c for c, _ in vals}
        if missing:
            raise SchemaError(f"{loc}.values", f"no value for class sets {sorted(missing)}")
        flags = node.get("flags", {})
        if not isinstance(flags, Mapping) or set(flags) - set(FLAG_KEYS):
            raise SchemaError(f"{loc}.flags", f"flags must be a subset of {FLAG_KEYS}")
        cond = node.get("condition")
        if cond is not None:
            _parse(cond, f"{loc}.condition", CONSTANTS, pred=True)
        char_sets.append(CharSet(
            hid, str(node["degree"]), params, tuple(sorted(vals)),
            tuple(sorted((k, bool(v)) for k, v in flags.items())), cond,
        ))
    st = [c for c in char_sets if c.flag("is_steinberg")]
    if len(st) != 1:
        raise SchemaError("char_sets", "exactly one character set must be flagged is_steinberg")
    if not isinstance(tree["fixtures"], Mapping):
        raise SchemaError("fixtures", "expected an object")

    return GenericTable(
        family=family,
        q_constraints=tuple(str(c) for c in qc),
        order=str(tree["order"]),
        order_p=str(tree["order_p"]),
        class_sets=tuple(class_sets),
        char_sets=tuple(char_sets),
        twist=twist,
        document=json.dumps(tree, sort_keys=True),
    )


def dump_table(table: GenericTable, indent: int | None = 1) -> str:
    """Serialize back to JSON text."""
    return json.dumps(table.tree(), indent=indent, sort_keys=True)
