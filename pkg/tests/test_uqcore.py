import pytest

from iqpoisson.braidlusztig import default_pbw, pbw_data
from iqpoisson.rootdata import CartanData, cartan_matrix, kostant_count, preset
from iqpoisson.scalarfield import ONE, Q, V, quantum_integer
from iqpoisson.uqcore import (E, F, K, TriWord, UElement, algebra, from_pbw, from_records,
                              is_integral, normal_form, parse_element, pbw_coordinates, project_P,
                              rescaled_q_commutator, to_records)
from iqpoisson.scalarfield import IntegralityProfile

A1 = CartanData(cartan_matrix("A", 1))
A2 = CartanData(cartan_matrix("A", 2))
B2 = CartanData(cartan_matrix("B", 2))


def test_ef_commutation():
    alg = algebra(A2)
    x = E(alg, 0) * F(alg, 1)
    assert x.terms == {TriWord((1,), (0, 0), (0,)): ONE}
    y = E(alg, 0) * F(alg, 0)
    want = F(alg, 0) * E(alg, 0) + (K(alg, (-1, 0)) - K(alg, (1, 0))).scale(Q - ONE / Q)
    assert y == want


def test_k_commutation():
    alg = algebra(A1)
    assert K(alg, (1,)) * F(alg, 0) == (F(alg, 0) * K(alg, (1,))).scale(ONE / Q ** 2)
    assert K(alg, (2,)) * K(alg, (-3,)) == K(alg, (-1,))


def test_canonical_powers():
    alg = algebra(A2)
    f = F(alg, 0)
    assert (f * f).terms == (f ** 2).terms


def test_serre_component_dimension():
    alg = algebra(A2)
    assert len(alg.standard_words((2, 1))) == 2 == kostant_count(A2, (2, 1))
    # F1 F1 F2 - [2] F1 F2 F1 + F2 F1 F1 = 0
    f1, f2 = F(alg, 0), F(alg, 1)
    assert (f1 * f1 * f2 - (f1 * f2 * f1).scale(quantum_integer(2)) + f2 * f1 * f1).is_zero()


def test_rescaled_commutator():
    alg = algebra(A2)
    f1, f2 = F(alg, 0), F(alg, 1)
    assert rescaled_q_commutator(f1, f1, 0).is_zero()
    got = rescaled_q_commutator(f2, f1, 1)
    assert got == (f2 * f1 - (f1 * f2).scale(Q)).scale(ONE / (Q - ONE))


def test_parse_and_records():
    alg = algebra(A2)
    x = parse_element(alg, "2*F1*F2 - (v^2)*K[1,0]*E1")
    assert x == (F(alg, 0) * F(alg, 1)).scale(ONE * 2) - (K(alg, (1, 0)) * E(alg, 0)).scale(V ** 2)
    assert from_records(alg, to_records(x)) == x
    assert normal_form([(ONE, [("E", 0), ("F", 1)])], A2) == F(alg, 1) * E(alg, 0)


def test_pbw_coordinates_a2():
    pbw = pbw_data(A2, (0, 1, 0))
    alg = pbw.alg
    fb = pbw.fvecs[1]
    coords = pbw_coordinates(fb, pbw)
    assert [(m.f_exponents, c) for m, c in coords.items()] == [((0, 1, 0), ONE)]
    one = pbw_coordinates(UElement.one(alg), pbw)
    assert [(m.f_exponents, c) for m, c in one.items()] == [((0, 0, 0), ONE)]
    x = F(alg, 1) * F(alg, 0)
    c = pbw_coordinates(x, pbw)
    assert {m.f_exponents for m in c} <= {(1, 0, 1), (0, 1, 0)}
    assert from_pbw(c, pbw) == x


def test_integrality():
    pbw = default_pbw(B2)
    alg = pbw.alg
    prof = IntegralityProfile(B2.eps)
    assert is_integral(F(alg, 0), prof, pbw)
    assert not is_integral(F(alg, 0).scale(ONE / (Q - ONE)), prof, pbw)
    for f in pbw.fvecs:
        assert is_integral(f, prof, pbw)


def test_project_p():
    sd = preset("AIV2")
    alg = algebra(sd.cartan)
    x = F(alg, 0) * K(alg, (1, -1))
    assert project_P(x, sd) == x
    assert project_P(E(alg, 0), sd).is_zero()
    # K_{alpha_1} lands on K_{alpha_iota} through the Y^i splitting
    assert project_P(K(alg, (1, 0)), sd) == K(alg, sd.split_weight((1, 0))[1])


def test_mixed_algebra_error():
    with pytest.raises(Exception):
        F(algebra(A2), 0) + F(algebra(B2), 0)
