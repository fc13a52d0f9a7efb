from itertools import combinations

import numpy as np
import pytest

from cvan.oracle import SpecError
from cvan.weyl import (TYPES, duality_failures, multiplicity_vectors, permutation_failures,
                       sign_row, uniqueness_check, weyl_group)

ORDERS = {"A2": 6, "A3": 24, "B2": 8, "B3": 48, "G2": 12, "I2(8)": 16, "F4": 1152}


@pytest.mark.parametrize("typ", TYPES)
def test_orders_and_reflections(typ):
    w = weyl_group(typ)
    assert w.order == ORDERS[typ]
    for s in w.gens:
        assert np.array_equal(s @ s, np.eye(len(s), dtype=s.dtype))
    if typ != "I2(8)":
        # sign character is the determinant of the reflection representation
        for s in w.gens:
            assert round(np.linalg.det(s)) == -1
        E = w.group.elements
        dets = np.rint(np.linalg.det(E.astype(float))).astype(int)
        assert np.array_equal(dets, w.sign)


def test_type_names():
    assert weyl_group("G₂") is weyl_group("G2")
    assert weyl_group("W(F4)").order == 1152
    for bad in ("E8", "C9", "I2(7)"):
        with pytest.raises(SpecError):
            weyl_group(bad)


@pytest.mark.parametrize("typ", TYPES)
def test_parabolic_orders(typ):
    w = weyl_group(typ)
    J_all = w.subsets()[-1]
    assert len(w.parabolic(())) == 1
    assert len(w.parabolic(J_all)) == w.order
    for J in w.subsets():
        if len(J) == 1:
            assert len(w.parabolic(J)) == 2


@pytest.mark.parametrize("typ", TYPES)
def test_vectors(typ):
    w = weyl_group(typ)
    vecs = multiplicity_vectors(w)
    full = len(w.subsets()) - 1
    triv = next(v for v in vecs if all(x == 1 for x in v.ones))
    assert triv.degree == 1
    eps = vecs[sign_row(w)]
    assert all(x == 1 for x in eps.signs)
    assert eps.ones[0] == 1 and eps.ones[full] == 0
    for v in vecs:
        assert all(x >= 0 for x in v.ones + v.signs)
        assert v.ones[0] == v.degree == v.signs[0]
    assert sum(v.ones[full] for v in vecs) == 1


def test_a2_standard_character():
    w = weyl_group("A2")
    std = next(v for v in multiplicity_vectors(w) if v.degree == 2)
    assert std.ones[1] == 1  # J = {s1}


@pytest.mark.parametrize("typ", TYPES)
def test_duality_and_permutation_degrees(typ):
    w = weyl_group(typ)
    assert duality_failures(w) == []
    assert permutation_failures(w) == []


@pytest.mark.parametrize("typ", TYPES)
def test_uniqueness(typ):
    w = weyl_group(typ)
    rep = uniqueness_check(w)
    assert rep.ok
    if typ in ("G2", "I2(8)"):
        deg2 = [v.index for v in multiplicity_vectors(w) if v.degree == 2]
        assert rep.one_collisions == list(combinations(deg2, 2))
        assert rep.eps_collisions == rep.one_collisions
        assert rep.to_json()["collision_degrees"] == [2]
    else:
        assert rep.one_collisions == [] and rep.eps_collisions == []


def test_g2_single_pair():
    rep = uniqueness_check(weyl_group("G2"))
    assert len(rep.one_collisions) == 1


def test_i28_degree_two_characters():
    # the dihedral group of order 16 has three characters of degree 2
    w = weyl_group("I2(8)")
    assert [v.degree for v in multiplicity_vectors(w)].count(2) == 3
    assert len(uniqueness_check(w).one_collisions) == 3
