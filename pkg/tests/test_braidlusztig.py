import pytest

from iqpoisson.braidlusztig import (apply_T, BraidOp, T_w, T_w_inverse, check_relation_preservation,
                                    corrupted_T, lusztig_T, relation_images, root_vectors,
                                    verify_braid_relation)
from iqpoisson.rootdata import CartanData, cartan_matrix
from iqpoisson.scalarfield import ONE, Q, V
from iqpoisson.uqcore import E, F, K, algebra

A2 = CartanData(cartan_matrix("A", 2))
B2 = CartanData(cartan_matrix("B", 2))
G2 = CartanData(cartan_matrix("G", 2))


def test_t_on_k_and_rank_one():
    alg = algebra(A2)
    assert apply_T(BraidOp(0), K(alg, (0, 1))) == K(alg, (1, 1))
    assert apply_T(BraidOp(0), F(alg, 0)) == (K(alg, (-1, 0)) * E(alg, 0)).scale(Q)
    assert apply_T(BraidOp(0), E(alg, 0)) == (F(alg, 0) * K(alg, (1, 0))).scale(ONE / Q)


def test_t1_e2():
    alg = algebra(A2)
    e1, e2 = E(alg, 0), E(alg, 1)
    want = (e1 * e2 - (e2 * e1).scale(ONE / Q)).scale(ONE / ((ONE / V) * (ONE / Q - Q)))
    assert apply_T(BraidOp(0), e2) == want


def test_t1_f2():
    alg = algebra(A2)
    f1, f2 = F(alg, 0), F(alg, 1)
    want = (f2 * f1 - (f1 * f2).scale(Q)).scale(ONE / (V * (Q - ONE / Q)))
    assert apply_T(BraidOp(0), f2) == want


@pytest.mark.parametrize("cm", [A2, B2, G2], ids=["A2", "B2", "G2"])
def test_relation_preservation(cm):
    for i in range(2):
        assert check_relation_preservation(lusztig_T(cm, i), cm)
        assert check_relation_preservation(lusztig_T(cm, i, inverse=True), cm)


def test_corrupted_negative_control():
    op = corrupted_T(A2, 0)
    assert any(not r.is_zero() for r in relation_images(op))


def test_braid_relations():
    assert verify_braid_relation(0, 1, A2)
    assert verify_braid_relation(0, 1, B2)


@pytest.mark.expensive
def test_braid_relation_g2():
    assert verify_braid_relation(0, 1, G2)


def test_inverse_word():
    alg = algebra(B2)
    x = F(alg, 0) * E(alg, 1)
    assert T_w_inverse((0, 1, 0), T_w((0, 1, 0), x)) == x


def test_root_vectors_weights():
    for cm in (A2, B2):
        from iqpoisson.rootdata import longest_word
        rv = root_vectors(cm, longest_word(cm))
        alg = algebra(cm)
        assert rv[0][1] == F(alg, longest_word(cm)[0])
        for beta, f, e in rv:
            for t in f.terms:
                assert alg.weight(t.f) == tuple(beta) and not t.e and not any(t.mu)
