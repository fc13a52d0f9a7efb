from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from cvan import vanish
from cvan.cyclo import Cyclotomic, cyclo_sum
from cvan.oracle import (GroupTooLarge, SpecError, brute_pvanish, build_group, burnside_consistent,
                         compare_solutions, conjugacy_classes, cross_check, dixon_table, expected_order,
                         match_tables, oracle_for, parse_spec)
from cvan.oracle.groups import IntArith, OracleGroup, _key
from cvan.tables import get_table, instantiate, validate

SMALL_GROUPS = ["SL(2,3)", "SL(2,4)", "SL(2,5)", "SL(2,7)", "GL(2,3)", "GL(2,4)", "GL(3,2)",
                "U(3,2)", "SU(3,2)", "W(G2)", "W(B3)"]


@pytest.mark.parametrize("text,order", [("SL(2,5)", 120), ("U(3,2)", 648), ("sz8", 29120),
                                        ("GL(2,7)", 2016), ("SU(3,3)", 6048), ("SL(3,3)", 5616),
                                        ("SL(2,13)", 2184), ("W(F4)", 1152), ("W(I2(8))", 16)])
def test_group_orders(text, order):
    assert expected_order(parse_spec(text)) == order
    assert build_group(text).order == order


def test_spec_parsing():
    assert parse_spec("sl2:5") == parse_spec("SL(2,5)")
    assert parse_spec("sz8").tag == parse_spec("2b2:8").tag == "Sz(8)"
    assert parse_spec("weyl:F4") == parse_spec("F4")
    for bad in ("sl2:17", "gl4:2", "sz:32", "u3:3", "nonsense"):
        with pytest.raises(SpecError):
            build_group(bad)


def test_cap():
    with pytest.raises(GroupTooLarge):
        build_group("sz8", cap=1000)


@pytest.mark.parametrize("text,count", [("SL(2,3)", 7), ("sz8", 11), ("SL(2,5)", 9), ("GL(2,3)", 8)])
def test_class_counts(text, count):
    assert len(conjugacy_classes(build_group(text))) == count


@pytest.mark.parametrize("text", SMALL_GROUPS + ["sz8"])
def test_class_data(text):
    G = build_group(text)
    cd = conjugacy_classes(G)
    assert cd.sizes[0] == 1 and cd.orders[0] == 1
    assert sum(cd.sizes) == G.order
    assert all(G.order % s == 0 for s in cd.sizes)
    for c, pw in enumerate(cd.powers):
        assert pw[0] == 0 and (len(pw) == 1 or pw[1] == c)
        assert len(pw) == cd.orders[c]
    assert burnside_consistent(G)


@pytest.mark.parametrize("text", ["SL(2,5)", "U(3,2)", "W(B3)"])
def test_classes_closed_under_conjugation(text):
    # full check: x^-1 g x lies in the class of g for every x, g
    G = build_group(text)
    cd = conjugacy_classes(G)
    E = G.elements
    one = E[0]
    inv = np.empty(len(E), dtype=np.int64)
    prod = G.mul(E[:, None], E[None, :]).reshape(-1, *one.shape)
    table = G.lookup(prod).reshape(len(E), len(E))
    for i in range(len(E)):
        inv[i] = int(np.nonzero(table[i] == 0)[0][0])
    for x in range(len(E)):
        conj = table[table[inv[x]], x]
        assert np.array_equal(cd.class_of[conj], cd.class_of)


@pytest.mark.parametrize("text", SMALL_GROUPS + ["SL(2,13)", "GL(2,5)", "sz8", "W(F4)"])
def test_dixon_invariants(text):
    G = build_group(text)
    ot = dixon_table(G)
    assert validate(ot).ok
    assert sum(d * d for d in ot.degrees) == G.order
    assert all(G.order % d == 0 for d in ot.degrees)
    assert len(ot.chars) == len(ot.classes)


def test_sl25_degrees():
    assert sorted(dixon_table(build_group("SL(2,5)")).degrees) == [1, 2, 2, 3, 3, 4, 4, 5, 6]


def test_sz8_degrees():
    assert dixon_table(build_group("sz8")).degrees == [1, 14, 14, 35, 35, 35, 64, 65, 65, 65, 91]


def test_weyl_g2_has_two_degree_two_characters():
    assert dixon_table(build_group("W(G2)")).degrees.count(2) == 2


def test_trivial_group():
    one = np.eye(1, dtype=np.int64)
    G = OracleGroup("1", None, None, IntArith(), [one], one[None], {_key(one): 0})
    ot = dixon_table(G)
    assert ot.degrees == [1] and ot.value(0, 0) == 1


def test_oracle_json_encoding():
    doc = dixon_table(build_group("SL(2,5)")).to_json()
    assert doc["order"] == 120
    assert set(doc["values"][0][0]) == {"conductor", "coeffs"}
    assert Cyclotomic.from_json(doc["values"][-1][0]) == 6


# comparison with the generic tables


@pytest.mark.parametrize("fam,q", [("sl2", 3), ("sl2", 5), ("sl2", 7), ("gl2", 3), ("gl2", 5), ("gl3", 2),
                                   ("sl3-n3", 2), ("u3", 2), ("2b2", 8), ("sl3-n3", 3), ("su3-n3", 3),
                                   ("sl2", 8), ("gl2", 4)])
def test_cross_check(fam, q):
    ct = instantiate(get_table(fam), q)
    ot = oracle_for(fam, q)
    rep = cross_check(ct, ot)
    assert rep.ok, rep.to_json()
    m = match_tables(ct, ot)
    assert m is not None
    rmap, cmap = m
    assert sorted(rmap) == list(range(len(rmap))) and sorted(cmap) == list(range(len(cmap)))
    for j, k in enumerate(cmap):
        assert ct.classes[j].size == ot.classes[k].size
        assert ct.classes[j].p_singular == ot.classes[k].p_singular
    for i, r in enumerate(rmap):
        for j, k in enumerate(cmap):
            assert ct.value(i, j) == ot.value(r, k)
    cmp = compare_solutions(ct, ot, vanish.pvanishing_solutions(ct))
    assert cmp.ok, cmp.to_json()


def test_perturbed_table_is_reported():
    ct = instantiate(get_table("sl2"), 7)
    vals = [list(r) for r in ct.values]
    vals[3][2] = vals[3][2] + 1
    bad = ct.with_values(vals)
    rep = cross_check(bad, oracle_for("sl2", 7))
    assert not rep.ok
    assert rep.missing == [ct.chars[3].label]
    assert rep.nearest and "differs at 1 classes" in rep.nearest[0]
    assert match_tables(bad, oracle_for("sl2", 7)) is None


def test_order_mismatch():
    rep = cross_check(instantiate(get_table("sl2"), 5), oracle_for("sl2", 7))
    assert not rep.ok and not rep.order_match


# brute force enumeration


def _central(ot):
    return [j for j, c in enumerate(ot.classes) if c.size == 1]


def test_sl25_brute_force():
    ot = dixon_table(build_group("SL(2,5)"))
    sols = brute_pvanish(ot, 5)
    weak = brute_pvanish(ot, 5, "sylp")
    shapes = sorted(tuple(sorted(ot.degrees[i] for i in s)) for s in weak)
    # St, 1 + irr(4), 1 + two distinct degree 2, and (3, 2) pairs
    assert (5,) in shapes and (1, 4) in shapes and (1, 2, 2) in shapes and (2, 3) in shapes
    for s in weak:
        if sorted(ot.degrees[i] for i in s) == [1, 2, 2]:
            assert len(set(s)) == 3
    # p-vanishing iff trivial on the centre
    for s in weak:
        trivial = all(cyclo_sum(ot.value(i, j) for i in s) == 5 for j in _central(ot))
        assert (s in sols) == trivial


@pytest.mark.parametrize("text,p", [("SL(2,5)", 5), ("SL(2,7)", 7), ("GL(2,5)", 5), ("U(3,2)", 2),
                                    ("sz8", 2), ("SU(3,3)", 3), ("W(B3)", 2), ("W(G2)", 3)])
def test_brute_force_invariants(text, p):
    ot = dixon_table(build_group(text))
    sols = brute_pvanish(ot, p)
    weak = brute_pvanish(ot, p, "sylp")
    assert set(sols) <= set(weak)
    target = 1
    while ot.order % (target * p) == 0:
        target *= p
    for s in sols:
        assert sum(ot.degrees[i] for i in s) == target
    for i, d in enumerate(ot.degrees):
        if d == target:
            assert (i,) in sols


def test_sz8_reducible_count():
    ot = dixon_table(build_group("sz8"))
    red = [s for s in brute_pvanish(ot, 2) if len(s) > 1]
    assert len(red) == 3


@pytest.mark.parametrize("text,p", [("SL(2,5)", 5), ("SL(2,7)", 7), ("SL(2,9)", 3), ("SL(2,8)", 2),
                                    ("SU(3,3)", 3), ("sz8", 2)])
def test_trivial_constituent_in_perfect_groups(text, p):
    ot = dixon_table(build_group(text))
    triv = ot.trivial_index()
    for s in brute_pvanish(ot, p):
        if len(s) > 1:
            assert s.count(triv) == 1


def test_brute_force_rejects_bad_prime():
    with pytest.raises(ValueError):
        brute_pvanish(dixon_table(build_group("SL(2,5)")), 7)
