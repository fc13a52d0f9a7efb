import time

import pytest
from hypothesis import given, settings, strategies as st

from cvan.cyclo import QPoly
from cvan.tables import (DegreeFixture, audit_all, degree_audit, get_fixture, get_table,
                         list_fixture_families)

FAMILIES = list_fixture_families()


def fixture(fam):
    return DegreeFixture.from_json(get_fixture(fam))


def test_all_fixture_families_present():
    assert len(FAMILIES) == 26
    for fam in ("gl6", "2f4", "csp6", "3d4-odd", "g2-5", "2g2", "sp4-even"):
        assert fam in FAMILIES


@pytest.mark.parametrize("fam", FAMILIES)
def test_no_failing_rows(fam):
    rep = degree_audit(fixture(fam))
    assert rep.ok, [r.to_json() for r in rep.rows if r.status == "fail"]
    assert rep.count("pass") > 0


@pytest.mark.parametrize("fam", FAMILIES)
def test_skips_are_exactly_unknown_ids(fam):
    fx = fixture(fam)
    rep = degree_audit(fx)
    known = set(fx.table_a)
    for r in rep.rows:
        ids = set(r.rhs) | ({r.lhs} if r.lhs is not None else set())
        assert (r.status == "skipped") == (not ids <= known)
    if not fx.partial_a:
        assert rep.count("skipped") == 0


def test_partial_tables():
    # Tables A given only in part: 2F4, GL6, CSp6 ("some") and U5 (13 of its sets)
    partial = {f for f in FAMILIES if fixture(f).partial_a}
    assert partial == {"2f4", "gl6", "csp6", "u5"}
    skipped = {f for f in FAMILIES if degree_audit(fixture(f)).count("skipped")}
    assert skipped == partial


def test_u3_row():
    fx = fixture("u3")
    assert (8, (2, 2, 2, 6)) in fx.table_b
    rep = degree_audit(fx)
    row = next(r for r in rep.rows if r.kind == "B" and r.lhs == 8 and r.rhs == (2, 2, 2, 6))
    assert row.status == "pass"
    d = fx.table_a
    assert (d[2] + d[2] + d[2] + d[6] - d[8]).is_zero()
    assert (d[8] - QPoly.parse("(q+1)^2*(q-1)")).is_zero()


def test_gl2_row():
    fx = fixture("gl2")
    assert (2, (1, 4)) in fx.table_b
    assert (fx.table_a[1] + fx.table_a[4] - fx.table_a[2]).is_zero()


def test_2b2_sqrt2_row():
    fx = fixture("2b2")
    assert (1, 2, 3, 6) in fx.table_c
    d = fx.table_a
    assert (d[1] + d[2] + d[3] + d[6] - QPoly.parse("q^4")).is_zero()
    assert fx.base == 2


def test_exception_incomplete_rows_still_audited():
    for fam in ("3d4-even", "3d4-odd"):
        fx = fixture(fam)
        assert fx.exception_incomplete
        rep = degree_audit(fx)
        assert rep.ok and rep.count("skipped") == 0


def test_sp4_erratum_recorded():
    fx = fixture("sp4-odd")
    assert [i for i, _ in fx.errata] == [19]
    assert (fx.table_a[19] - fx.table_a[18]).is_zero()


def test_table_documents_agree_with_fixtures():
    for fam in ("gl2", "gl3", "u3", "su3-n3", "sl3-n3", "2b2"):
        doc = DegreeFixture.from_table(get_table(fam))
        fx = fixture(fam)
        assert sorted(doc.table_c) == sorted(fx.table_c)
        assert degree_audit(doc).ok


def test_perturbed_degree_fails():
    fx = fixture("u3")
    bad = dict(fx.table_a)
    bad[6] = bad[6] + QPoly.const(1)
    rep = degree_audit(DegreeFixture(fx.family, fx.order_p, bad, fx.table_b, fx.table_c))
    assert not rep.ok
    assert any("6" in map(str, r.rhs) or r.lhs == 6 for r in rep.rows if r.status == "fail")


def test_audit_is_fast():
    t = time.perf_counter()
    reports = audit_all()
    assert time.perf_counter() - t < 5
    assert all(r.ok for r in reports)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 4)), min_size=1, max_size=4),
       st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 4)), min_size=1, max_size=4))
def test_synthetic_rows(a_terms, b_terms):
    def poly(terms):
        return QPoly.parse("+".join(f"({c})*q^{e}" for c, e in terms))
    a, b = poly(a_terms), poly(b_terms)
    fx = DegreeFixture("syn", a + b, {1: a, 2: b, 3: a + b}, ((3, (1, 2)),), ((1, 2), (3,)))
    rep = degree_audit(fx)
    assert rep.ok and rep.count("pass") == 3
