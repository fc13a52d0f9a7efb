import copy
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cvan.cyclo import QPoly
from cvan.ff import field, least_irreducible
from cvan.tables import (ConstraintError, SchemaError, character_value, dump_table, get_table,
                         instantiate, list_families, load_table, validate)
from cvan.tables.registry import ENV_VAR

SWEEP = {
    "sl2": [4, 5, 7, 8, 9, 11, 13],
    "gl2": [3, 4, 5, 7],
    "gl3": [3, 4, 5, 8],
    "sl3-n3": [3, 4, 5, 8, 9],
    "u3": [2, 3, 4, 5],
    "su3-n3": [2, 3, 4, 5, 7, 9],
    "2b2": [8, 32],
}


def admissible_sweep():
    out = []
    for fam, qs in SWEEP.items():
        t = get_table(fam)
        for q in qs:
            try:
                instantiate(t, q)
            except ConstraintError:
                continue
            out.append((fam, q))
    return out


def raw(family):
    return json.loads(get_table(family).document)


# loading


def test_sweep_has_four_admissible_values():
    for fam in SWEEP:
        assert sum(1 for f, _ in admissible_sweep() if f == fam) >= (2 if fam == "2b2" else 4)


def test_builtin_families():
    assert list_families() == sorted(SWEEP)


def test_gl2_document():
    t = get_table("gl2")
    assert len(t.char_sets) == 4
    degs = {str(c.degree) for c in t.char_sets}
    assert {QPoly.parse(d) for d in degs} == {QPoly.parse(x) for x in ("1", "q", "q+1", "q-1")}


def test_u3_document():
    t = get_table("u3")
    assert len(t.char_sets) == 8
    st_ = t.steinberg
    assert st_.id == 3
    assert QPoly.parse(st_.degree) == QPoly.parse("q^3")


@pytest.mark.parametrize("family", sorted(SWEEP))
def test_round_trip(family):
    t = get_table(family)
    again = load_table(dump_table(t))
    assert dump_table(again) == dump_table(t)
    assert again == t


def _expect_schema_error(doc, where):
    with pytest.raises(SchemaError) as exc:
        load_table(doc)
    assert where in exc.value.location
    return exc.value


def test_exception_with_undeclared_parameter():
    doc = raw("gl2")
    doc["char_sets"][3]["params"]["exceptions"] = ["q+1 | k2"]
    _expect_schema_error(doc, "char_sets")


def test_duplicate_set_id():
    doc = raw("gl2")
    doc["char_sets"][1]["id"] = 1
    _expect_schema_error(doc, "char_sets")


def test_missing_field():
    doc = raw("gl2")
    del doc["order_p"]
    with pytest.raises(SchemaError):
        load_table(doc)


def test_malformed_expression():
    doc = raw("gl2")
    doc["char_sets"][2]["values"]["5"] = "zeta(q-1; k1*l1 +"
    _expect_schema_error(doc, "char_sets")


def test_unknown_function():
    doc = raw("gl2")
    doc["char_sets"][2]["values"]["5"] = "exp(k1)"
    _expect_schema_error(doc, "char_sets")


def test_two_steinberg_flags():
    doc = raw("gl2")
    doc["char_sets"][0]["flags"] = {"is_steinberg": True}
    _expect_schema_error(doc, "char_sets")


def test_missing_value_for_a_class_set():
    doc = raw("u3")
    del doc["char_sets"][4]["values"]["2"]
    _expect_schema_error(doc, "values")


# instantiation


@pytest.mark.parametrize("family,q,order", [("gl2", 3, 48), ("u3", 2, 648), ("2b2", 8, 29120),
                                            ("sl2", 5, 120), ("gl3", 2, 168)])
def test_group_orders(family, q, order):
    assert instantiate(get_table(family), q).order == order


def test_constraint_violation():
    with pytest.raises(ConstraintError):
        instantiate(get_table("su3-n3"), 5)
    with pytest.raises(ConstraintError):
        instantiate(get_table("sl3-n3"), 7)
    with pytest.raises((ConstraintError, ValueError)):
        instantiate(get_table("2b2"), 16)
    with pytest.raises((ConstraintError, ValueError)):
        instantiate(get_table("gl2"), 6)


@pytest.mark.parametrize("family,q", admissible_sweep())
def test_validate_sweep(family, q):
    ct = instantiate(get_table(family), q)
    rep = validate(ct)
    assert rep.ok, rep.details
    assert len(ct.chars) == len(ct.classes)
    rows = {tuple(ct.value(i, j) for j in range(len(ct.classes))) for i in range(len(ct.chars))}
    assert len(rows) == len(ct.chars)
    for i, c in enumerate(ct.chars):
        assert ct.value(i, ct.identity) == c.degree


@pytest.mark.parametrize("family,q", admissible_sweep())
def test_steinberg_support(family, q):
    ct = instantiate(get_table(family), q)
    s = ct.steinberg_index()
    assert ct.value(s, ct.identity) == ct.order_p
    for j, c in enumerate(ct.classes):
        v = ct.value(s, j)
        if c.p_singular:
            assert v.is_zero()
        else:
            assert not v.is_zero()


@pytest.mark.parametrize("family,q", [("sl2", 5), ("gl3", 4), ("u3", 3)])
def test_mutation_is_detected(family, q):
    ct = instantiate(get_table(family), q)
    vals = [list(r) for r in ct.values]
    vals[2][1] = vals[2][1] + 1
    rep = validate(ct.with_values(vals))
    assert not rep.ok
    assert not rep.checks["row_orthogonality"]


def test_character_value():
    ct = instantiate(get_table("gl2"), 5)
    s = ct.steinberg_index()
    assert character_value(ct, ct.chars[s], ct.classes[ct.identity]) == 5
    with pytest.raises((KeyError, ValueError, IndexError)):
        character_value(ct, "X99", ct.classes[0])


def test_instantiation_is_deterministic():
    a = instantiate(get_table("u3"), 4)
    b = instantiate(load_table(get_table("u3").document), 4)
    assert [c.params for c in a.chars] == [c.params for c in b.chars]
    assert [c.params for c in a.classes] == [c.params for c in b.classes]
    for cs in a.chars:
        assert list(cs.params) <= sorted([list(cs.params)])[0]


def test_table_path_override(tmp_path, monkeypatch):
    doc = raw("gl2")
    doc["description"] = "override"
    (tmp_path / "gl2.json").write_text(json.dumps(doc))
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    assert get_table("gl2").tree()["description"] == "override"
    monkeypatch.delenv(ENV_VAR)
    assert get_table("gl2").tree()["description"] != "override"


# finite fields


def test_least_irreducible():
    assert least_irreducible(2, 3) == least_irreducible(2, 3)
    F = field(8)
    assert F.q == 8 and F.p == 2


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([4, 8, 9, 25, 27, 49]), st.data())
def test_field_axioms(q, data):
    F = field(q)
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    if a:
        assert F.mul(a, F.inv(a)) == F.from_int(1)
    # Frobenius is additive and multiplicative, trace lands in the prime field
    assert F.frob(F.add(a, b)) == F.add(F.frob(a), F.frob(b))
    assert F.frob(F.mul(a, b)) == F.mul(F.frob(a), F.frob(b))
    assert 0 <= F.trace(a) < F.p
