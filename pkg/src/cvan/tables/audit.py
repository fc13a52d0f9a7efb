"""Degree audits: decomposition and solution rows checked as exact identities in q."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..cyclo import QPoly
from .model import GenericTable


@dataclass(frozen=True)
class DegreeFixture:
    family: str
    order_p: QPoly
    table_a: Mapping[int, QPoly]
    table_b: tuple[tuple[int, tuple[int, ...]], ...]
    table_c: tuple[tuple[int, ...], ...]
    description: str = ""
    base: int = 1
    partial_a: bool = False
    exception_incomplete: tuple[int, ...] = ()
    errata: tuple[tuple[int, str], ...] = ()

    @classmethod
    def from_json(cls, doc: Mapping) -> "DegreeFixture":
        a = {int(r["id"]): QPoly.parse(r["degree"]) for r in doc.get("table_a", [])}
        b = tuple((int(r["lhs"]), tuple(int(x) for x in r["rhs"])) for r in doc.get("table_b", []))
        c = tuple(tuple(int(x) for x in row) for row in doc.get("table_c", []))
        return cls(
            family=doc["family"],
            order_p=QPoly.parse(doc["order_p"]),
            table_a=a,
            table_b=b,
            table_c=c,
            description=doc.get("description", ""),
            base=int(doc.get("base", 1)),
            partial_a=bool(doc.get("partial_a", False)),
            exception_incomplete=tuple(doc.get("exception_incomplete", ())),
            errata=tuple((int(e["id"]), e["note"]) for e in doc.get("errata", ())),
        )

    @classmethod
    def from_table(cls, table: GenericTable) -> "DegreeFixture":
        """The fixture rows stored inside a table document, with degrees from Table A rows."""
        fx = table.fixtures()
        rows = fx.get("table_a") or [{"id": cs.id, "degree": cs.degree} for cs in table.char_sets]
        return cls.from_json({
            "family": table.family,
            "order_p": table.order_p,
            "base": table.twist,
            "table_a": rows,
            "table_b": fx.get("table_b", []),
            "table_c": fx.get("table_c", []),
        })

    def used_ids(self) -> set[int]:
        out = {x for row in self.table_c for x in row}
        for lhs, rhs in self.table_b:
            out.add(lhs)
            out.update(rhs)
        return out

    def unknown_ids(self) -> list[int]:
        return sorted(i for i in self.used_ids() if i not in self.table_a)


@dataclass
class RowResult:
    kind: str            # "B" or "C"
    index: int
    lhs: int | None
    rhs: tuple[int, ...]
    status: str          # "pass", "fail" or "skipped"
    detail: str = ""

    def to_json(self) -> dict:
        out = {"table": self.kind, "row": self.index, "rhs": list(self.rhs), "status": self.status}
        if self.lhs is not None:
            out["lhs"] = self.lhs
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class AuditReport:
    family: str
    rows: list[RowResult] = field(default_factory=list)
    skipped_ids: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status != "fail" for r in self.rows)

    def count(self, status: str) -> int:
        return sum(r.status == status for r in self.rows)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "ok": self.ok,
            "passed": self.count("pass"),
            "failed": self.count("fail"),
            "skipped": self.count("skipped"),
            "unknown_ids": list(self.skipped_ids),
            "rows": [r.to_json() for r in self.rows],
        }


def _total(ids: Sequence[int], degrees: Mapping[int, QPoly]) -> QPoly:
    out = QPoly.const(0)
    for i in ids:
        out = out + degrees[i]
    return out


def degree_audit(fixture: DegreeFixture) -> AuditReport:
    rep = AuditReport(fixture.family, skipped_ids=fixture.unknown_ids())
    deg = fixture.table_a
    for n, (lhs, rhs) in enumerate(fixture.table_b, 1):
        missing = [i for i in (lhs, *rhs) if i not in deg]
        if missing:
            rep.rows.append(RowResult("B", n, lhs, rhs, "skipped", f"no degree for {missing}"))
            continue
        diff = _total(rhs, deg) - deg[lhs]
        if diff.is_zero():
            rep.rows.append(RowResult("B", n, lhs, rhs, "pass"))
        else:
            rep.rows.append(RowResult("B", n, lhs, rhs, "fail", f"rhs - lhs = {diff}"))
    for n, row in enumerate(fixture.table_c, 1):
        missing = [i for i in row if i not in deg]
        if missing:
            rep.rows.append(RowResult("C", n, None, row, "skipped", f"no degree for {missing}"))
            continue
        diff = _total(row, deg) - fixture.order_p
        if diff.is_zero():
            rep.rows.append(RowResult("C", n, None, row, "pass"))
        else:
            rep.rows.append(RowResult("C", n, None, row, "fail", f"sum - |G|_p = {diff}"))
    return rep


def audit_all() -> list[AuditReport]:
    """Audit every shipped fixture plus the fixture rows of every table document."""
    from .registry import get_fixture, get_table, list_families, list_fixture_families

    reports = [degree_audit(DegreeFixture.from_json(get_fixture(f))) for f in list_fixture_families()]
    for fam in list_families():
        t = get_table(fam)
        if t.fixtures().get("table_b") or t.fixtures().get("table_c"):
            rep = degree_audit(DegreeFixture.from_table(t))
            rep.family = f"{fam} (table document)"
            reports.append(rep)
    return reports
