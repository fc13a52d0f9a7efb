"""Command-line entry point.

Every subcommand accepts --json (or --format json|csv|text). Output is
deterministic for fixed inputs. Exit status: 0 when all requested checks
pass, 1 when a check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import SCHEMA_VERSION, vanish
from .cyclo import Cyclotomic
from .tables import (ConstraintError, SchemaError, admissible, get_fixture, get_table, instantiate,
                     list_families, list_fixture_families, validate)
from .tables.audit import DegreeFixture, audit_all, degree_audit
from .tables.registry import search_dirs

# q values used when a table command is given no --q
SWEEPS = {
    "sl2": (4, 5, 7, 8, 9, 11, 13),
    "gl2": (3, 4, 5, 7),
    "gl3": (3, 4, 5, 8),
    "sl3-n3": (3, 4, 5, 8, 9),
    "u3": (2, 3, 4, 5),
    "su3-n3": (2, 3, 4, 5, 7, 9),
    "2b2": (8, 32),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    table_paths: list[str]
    sweeps: dict[str, tuple[int, ...]]
    budget: int = vanish.DEFAULT_BUDGET
    fmt: str = "text"
    checks: list[str] = field(default_factory=list)


@dataclass
class Result:
    doc: dict
    ok: bool = True
    text: list[str] = field(default_factory=list)
    rows: list[dict] | None = None  # flat records for csv


# helpers


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Cyclotomic):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _table(family: str):
    try:
        return get_table(family)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    except SchemaError as e:
        raise UsageError(f"{family}: {e}") from None


def _concrete(family: str, q: int):
    t = _table(family)
    if not admissible(t, q):
        raise UsageError(f"{family}: q={q} is not admissible (constraints: {', '.join(t.q_constraints) or 'none'})")
    try:
        return instantiate(t, q)
    except ConstraintError as e:
        raise UsageError(str(e)) from None


def _qs(cfg: RunConfig, family: str, given: Sequence[int] | None) -> list[int]:
    if given:
        return list(given)
    if family not in cfg.sweeps:
        raise UsageError(f"no default q sweep for {family}; pass --q")
    t = _table(family)
    return [q for q in cfg.sweeps[family] if admissible(t, q)]


def _vec(v: Sequence[int]) -> str:
    return "(" + ",".join(map(str, v)) + ")"


def _status(ok: bool) -> str:
    return "pass" if ok else "FAIL"


# table


def cmd_table_list(args, cfg: RunConfig) -> Result:
    rows = []
    for fam in list_families():
        t = _table(fam)
        rows.append({"family": fam, "order": t.order, "order_p": t.order_p,
                     "constraints": "; ".join(t.q_constraints), "char_sets": len(t.char_sets),
                     "class_sets": len(t.class_sets)})
    text = [f"{r['family']:8} |G| = {r['order']}  |G|_p = {r['order_p']}  "
            f"{r['char_sets']} character sets, {r['class_sets']} class sets" for r in rows]
    return Result({"families": rows, "search_path": cfg.table_paths}, True, text, rows)


def _table_doc(ct) -> dict:
    return {
        "family": ct.family,
        "q": ct.q,
        "order": ct.order,
        "order_p": ct.order_p,
        "chars": [{"label": c.label, "set": c.set_id, "params": list(c.params), "degree": c.degree}
                  for c in ct.chars],
        "classes": [{"label": c.label, "set": c.set_id, "params": list(c.params), "size": c.size,
                     "ptype": c.ptype} for c in ct.classes],
        "values": [[ct.value(i, j).to_json() for j in range(len(ct.classes))] for i in range(len(ct.chars))],
    }


def cmd_table_show(args, cfg: RunConfig) -> Result:
    if args.q is None:
        t = _table(args.family)
        doc = t.tree()
        text = [f"{t.family}: |G| = {t.order}, |G|_p = {t.order_p}"]
        text += [f"  X{c.id}: degree {c.degree}" for c in t.char_sets]
        return Result({"table": doc}, True, text)
    ct = _concrete(args.family, args.q)
    doc = _table_doc(ct)
    text = [f"{ct.family} at q={ct.q}: |G| = {ct.order}, {len(ct.chars)} characters"]
    text.append("classes: " + " ".join(f"{c.label}[{c.size}]" for c in ct.classes))
    for i, c in enumerate(ct.chars):
        text.append(f"{c.label}: " + " ".join(str(ct.value(i, j)) for j in range(len(ct.classes))))
    return Result({"table": doc}, True, text)


def cmd_table_validate(args, cfg: RunConfig) -> Result:
    reports = []
    for q in _qs(cfg, args.family, args.q):
        reports.append(validate(_concrete(args.family, q)))
    ok = all(r.ok for r in reports)
    text = [f"{args.family} {r.label}: {_status(r.ok)}"
            + ("" if r.ok else " (" + ", ".join(k for k, v in sorted(r.checks.items()) if not v) + ")")
            for r in reports]
    rows = [{"family": args.family, "q": r.label, "ok": r.ok} for r in reports]
    return Result({"reports": [r.to_json() for r in reports]}, ok, text, rows)


# audit


def cmd_audit(args, cfg: RunConfig) -> Result:
    if args.all or not args.family:
        reports = audit_all()
    else:
        fam = args.family
        if fam in list_fixture_families():
            reports = [degree_audit(DegreeFixture.from_json(get_fixture(fam)))]
        elif fam in list_families():
            reports = [degree_audit(DegreeFixture.from_table(_table(fam)))]
        else:
            raise UsageError(f"no degree data for {fam!r}")
    ok = all(r.ok for r in reports)
    text = [f"{r.family:26} {_status(r.ok)}  {r.count('pass')} passed, {r.count('fail')} failed, "
            f"{r.count('skipped')} skipped" for r in reports]
    for r in reports:
        text += [f"  {r.family} {x.kind}{x.index}: {x.detail}" for x in r.rows if x.status == "fail"]
    rows = [{"family": r.family, "table": x.kind, "row": x.index, "status": x.status}
            for r in reports for x in r.rows]
    return Result({"reports": [r.to_json() for r in reports]}, ok, text, rows)


# decompositions and enumeration


def cmd_decompose(args, cfg: RunConfig) -> Result:
    ct = _concrete(args.family, args.q)
    if args.set is not None:
        try:
            found = {args.set: vanish.sylp_decompositions(ct, args.set, args.max_terms)}
        except ValueError as e:
            raise UsageError(str(e)) from None
        missing = [m for m in vanish.table_b_missing(ct, args.max_terms) if m[0] == args.set]
    else:
        found = vanish.all_decompositions(ct, args.max_terms)
        missing = vanish.table_b_missing(ct, args.max_terms)
    delta = sorted(h for h, v in found.items() if not v)
    found = {h: v for h, v in sorted(found.items()) if v}
    text = [f"X{h} = " + " | ".join(str(s) for s in sols) for h, sols in found.items()]
    text.append("no decomposition: " + (",".join(map(str, delta)) or "none"))
    text += [f"stated decomposition not found: X{h} = {rhs}" for h, rhs in missing]
    rows = [{"set": h, "v": str(s)} for h, sols in found.items() for s in sols]
    doc = {"family": ct.family, "q": ct.q, "max_terms": args.max_terms,
           "decompositions": {str(h): [s.to_json() for s in v] for h, v in found.items()},
           "delta": delta, "missing_from_search": [[h, list(r)] for h, r in missing]}
    return Result(doc, not missing, text, rows)


def _table_c(ct) -> list[tuple[int, ...]] | None:
    rows = ct.table.fixtures().get("table_c")
    if not rows:
        return None
    lo = ct.table.tree().get("generic_range", {}).get("min")
    if lo is not None and ct.q < lo:
        return None
    return sorted(tuple(sorted(r)) for r in rows)


def cmd_enumerate(args, cfg: RunConfig) -> Result:
    ct = _concrete(args.family, args.q)
    try:
        if args.mode == "sylp":
            return _enumerate_sylp(ct, cfg)
        return _enumerate_pvanish(ct, cfg, args.check_properties)
    except vanish.SearchBudgetExceeded as e:
        return Result({"family": ct.family, "q": ct.q, "error": str(e)}, False, [f"budget exceeded: {e}"])


def _enumerate_sylp(ct, cfg: RunConfig) -> Result:
    shapes = vanish.enumerate_sylp(ct, cfg.budget)
    expect = _table_c(ct)
    got = sorted(s.vector for s in shapes)
    ok = expect is None or got == expect
    text = [str(s) for s in shapes]
    text.append(f"{len(shapes)} shapes" + ("" if expect is None else f", stated shapes {_status(ok)}"))
    doc = {"family": ct.family, "q": ct.q, "mode": "sylp", "shapes": [s.to_json() for s in shapes],
           "stated_shapes_match": None if expect is None else ok}
    return Result(doc, ok, text, [{"v": str(s), "c": str(s.c)} for s in shapes])


def _enumerate_pvanish(ct, cfg: RunConfig, check_props: bool) -> Result:
    sols = vanish.pvanishing_solutions(ct, cfg.budget)
    items = []
    ok = True
    text = []
    for s in sols:
        good = vanish.check_solution(ct, s)
        props = vanish.report_properties(s, ct)
        ok &= good
        if check_props:
            ok &= _properties_hold(ct, s, props)
        items.append({"solution": s.to_json(), "label": s.label(), "shape": list(s.shape),
                      "verified": good, "properties": props.to_json()})
        text.append(f"{_vec(s.shape):16} {s.label()}")
    red = sum(s.reducible for s in sols)
    text.append(f"{len(sols)} solutions, {red} reducible")
    doc = {"family": ct.family, "q": ct.q, "mode": "pvanish", "solutions": items,
           "count": len(sols), "reducible": red}
    rows = [{"shape": _vec(it["shape"]), "label": it["label"], "verified": it["verified"]} for it in items]
    return Result(doc, ok, text, rows)


def _properties_hold(ct, s, p: vanish.PropertyReport) -> bool:
    good = p.real_up_to_twist and p.nonzero_on_semisimple
    if s.reducible:
        good &= p.linear_constituent_count == 1
    return good


def cmd_count_check(args, cfg: RunConfig) -> Result:
    ct = _concrete(args.family, args.q)
    try:
        cc = vanish.count_check(args.family, ct.q, cfg.budget)
    except LookupError as e:
        raise UsageError(str(e)) from None
    text = [f"{cc.family} q={cc.q}: expected {cc.expected} reducible, found {cc.found}: {_status(cc.ok)}"]
    return Result(cc.to_json(), cc.ok, text, [cc.to_json()])


# oracle


def cmd_oracle(args, cfg: RunConfig) -> Result:
    from .oracle import (GroupTooLarge, SpecError, brute_pvanish, build_group, check_table,
                         conjugacy_classes, dixon_table)

    try:
        G = build_group(args.group, args.cap)
    except (SpecError, GroupTooLarge) as e:
        raise UsageError(str(e)) from None
    cd = conjugacy_classes(G)
    doc = {"group": G.tag, "order": G.order, "classes": len(cd),
           "class_sizes": list(cd.sizes), "element_orders": list(cd.orders)}
    text = [f"{G.tag}: |G| = {G.order}, {len(cd)} classes"]
    ok = True
    if args.dixon or args.pvanish is not None:
        ot = dixon_table(G)
        rep = check_table(ot)
        ok &= rep.ok
        doc["table"] = ot.to_json()
        doc["validation"] = rep.to_json()
        text.append("degrees: " + " ".join(map(str, ot.degrees)))
        text.append(f"orthogonality: {_status(rep.ok)}")
    if args.pvanish is not None:
        try:
            sols = brute_pvanish(ot, args.pvanish, "pvanish")
            weak = brute_pvanish(ot, args.pvanish, "sylp")
        except ValueError as e:
            raise UsageError(str(e)) from None
        ok &= set(sols) <= set(weak)
        name = lambda s: "+".join(ot.chars[i].label for i in s)  # noqa: E731
        doc["pvanish"] = [name(s) for s in sols]
        doc["sylp_vanish"] = [name(s) for s in weak]
        text += [f"p-vanishing: {name(s)}" for s in sols]
        text.append(f"{len(sols)} p-vanishing, {len(weak)} Syl_p-vanishing")
    return Result(doc, ok, text)


def cmd_crosscheck(args, cfg: RunConfig) -> Result:
    from .oracle import compare_solutions, cross_check, oracle_for
    from .oracle import GroupTooLarge, SpecError

    ct = _concrete(args.family, args.q)
    try:
        ot = oracle_for(args.family, ct.q)
    except (SpecError, GroupTooLarge) as e:
        raise UsageError(str(e)) from None
    cc = cross_check(ct, ot)
    cmp = compare_solutions(ct, ot, vanish.pvanishing_solutions(ct, cfg.budget))
    ok = cc.ok and cmp.ok
    text = [f"{ct.family} q={ct.q} vs {ot.family}: tables {_status(cc.ok)}, "
            f"p-vanishing solutions {_status(cmp.ok)} ({cmp.concrete} vs {cmp.oracle})"]
    text += [f"  {m}" for m in cc.nearest + cmp.only_concrete + cmp.only_oracle]
    return Result({"family": ct.family, "q": ct.q, "group": ot.family, "ok": ok,
                   "tables": cc.to_json(), "solutions": cmp.to_json()}, ok, text)


# weyl


def cmd_weyl(args, cfg: RunConfig) -> Result:
    from .oracle import SpecError
    from . import weyl

    try:
        w = weyl.weyl_group(args.type)
    except SpecError as e:
        raise UsageError(str(e)) from None
    vecs = weyl.multiplicity_vectors(w)
    dual = weyl.duality_failures(w)
    perm = weyl.permutation_failures(w)
    ok = not dual and not perm
    subsets = ["{" + ",".join(str(j + 1) for j in J) + "}" for J in w.subsets()]
    doc = {"type": w.type, "order": w.order, "subsets": subsets,
           "vectors": [v.to_json() for v in vecs], "duality_failures": dual,
           "permutation_failures": [list(J) for J in perm]}
    text = [f"W({w.type}): |W| = {w.order}, J = " + " ".join(subsets)]
    text += [f"{v.label} deg {v.degree}: 1 {list(v.ones)} eps {list(v.signs)}" for v in vecs]
    text.append(f"duality {_status(not dual)}, permutation degrees {_status(not perm)}")
    if args.check_uniqueness:
        rep = weyl.uniqueness_check(w)
        ok &= rep.ok
        doc["uniqueness"] = rep.to_json()
        pairs = ", ".join("{%s,%s}" % tuple(p) for p in rep.to_json()["one_collisions"]) or "none"
        text.append(f"collisions: {pairs}; uniqueness {_status(rep.ok)}")
    rows = [{"char": v.label, "degree": v.degree, **{f"one{s}": x for s, x in zip(subsets, v.ones)},
             **{f"eps{s}": x for s, x in zip(subsets, v.signs)}} for v in vecs]
    return Result(doc, ok, text, rows)


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_const", const="json", dest="fmt", help="JSON output")
    common.add_argument("--format", choices=("text", "json", "csv"), dest="fmt")
    common.add_argument("--budget", type=int, default=vanish.DEFAULT_BUDGET, help="search node budget")

    p = argparse.ArgumentParser(prog="cvan", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    tp = sub.add_parser("table", help="list, show or validate table documents", parents=[common])
    tsub = tp.add_subparsers(dest="action", required=True)
    tsub.add_parser("list", parents=[common]).set_defaults(func=cmd_table_list)
    sp = tsub.add_parser("show", parents=[common])
    sp.add_argument("--family", required=True)
    sp.add_argument("--q", type=int)
    sp.set_defaults(func=cmd_table_show)
    vp = tsub.add_parser("validate", parents=[common])
    vp.add_argument("--family", required=True)
    vp.add_argument("--q", type=int, nargs="+")
    vp.set_defaults(func=cmd_table_validate)

    ap = sub.add_parser("audit", help="exact degree audits", parents=[common])
    asub = ap.add_subparsers(dest="action", required=True)
    dp = asub.add_parser("degrees", parents=[common])
    g = dp.add_mutually_exclusive_group()
    g.add_argument("--family")
    g.add_argument("--all", action="store_true")
    dp.set_defaults(func=cmd_audit)

    dc = sub.add_parser("decompose", help="Syl_p-decompositions", parents=[common])
    dc.add_argument("--family", required=True)
    dc.add_argument("--q", type=int, required=True)
    dc.add_argument("--set", type=int)
    dc.add_argument("--max-terms", type=int, default=vanish.DEFAULT_MAX_TERMS)
    dc.set_defaults(func=cmd_decompose)

    en = sub.add_parser("enumerate", help="vanishing characters of degree |G|_p", parents=[common])
    en.add_argument("--family", required=True)
    en.add_argument("--q", type=int, required=True)
    en.add_argument("--mode", choices=("sylp", "pvanish"), required=True)
    en.add_argument("--check-properties", action="store_true",
                    help="fail unless every solution has the expected properties")
    en.set_defaults(func=cmd_enumerate)

    cc = sub.add_parser("count-check", help="compare with the closed-form count", parents=[common])
    cc.add_argument("--family", required=True)
    cc.add_argument("--q", type=int, required=True)
    cc.set_defaults(func=cmd_count_check)

    op = sub.add_parser("oracle", help="explicit groups and Dixon tables", parents=[common])
    op.add_argument("--group", required=True)
    op.add_argument("--dixon", action="store_true")
    op.add_argument("--pvanish", type=int, metavar="P")
    op.add_argument("--cap", type=int, default=10 ** 6)
    op.set_defaults(func=cmd_oracle)

    xp = sub.add_parser("crosscheck", help="generic table against the oracle", parents=[common])
    xp.add_argument("--family", required=True)
    xp.add_argument("--q", type=int, required=True)
    xp.set_defaults(func=cmd_crosscheck)

    wp = sub.add_parser("weyl", help="parabolic multiplicities", parents=[common])
    wp.add_argument("--type", required=True)
    wp.add_argument("--check-uniqueness", action="store_true")
    wp.set_defaults(func=cmd_weyl)
    return p


def _render(res: Result, fmt: str, command: str) -> str:
    if fmt == "json":
        doc = {"schema": SCHEMA_VERSION, "command": command, "ok": res.ok, **_jsonable(res.doc)}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        if res.rows is None:
            raise UsageError(f"{command} has no tabular output; use --json")
        buf = io.StringIO()
        fields: list[str] = []
        for r in res.rows:
            fields += [k for k in r if k not in fields]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(res.rows)
        return buf.getvalue()
    return "\n".join(res.text + [f"[{SCHEMA_VERSION}] {_status(res.ok)}"]) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    fmt = args.fmt or "text"
    cfg = RunConfig([str(d) for d in search_dirs()], dict(SWEEPS), args.budget, fmt)
    command = " ".join(x for x in (args.command, getattr(args, "action", None)) if x)
    func: Callable = args.func
    try:
        res = func(args, cfg)
        out = _render(res, fmt, command)
    except UsageError as e:
        if fmt == "json":
            sys.stdout.write(json.dumps({"schema": SCHEMA_VERSION, "command": command, "ok": False,
                                         "error": str(e)}, indent=2, sort_keys=True) + "\n")
        else:
            sys.stderr.write(f"cvan: error: {e}\n")
        return 2
    sys.stdout.write(out)
    return 0 if res.ok else 1


if __name__ == "__main__":
    sys.exit(main())
