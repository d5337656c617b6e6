import pytest

from iqpoisson.rootdata import (CartanData, DiagramError, SatakeDiagram, WeylElement, braid_order,
                                cartan_matrix, diagram_from_dict, family, inversion_set, kostant_count,
                                longest_element, longest_word, positive_roots, preset, resolve_diagram)


def cm(letter, n):
    return CartanData(cartan_matrix(letter, n))


@pytest.mark.parametrize("letter,n,count", [("A", 2, 3), ("B", 2, 4), ("C", 3, 9), ("G", 2, 6), ("F", 4, 24)])
def test_positive_root_counts(letter, n, count):
    assert len(positive_roots(cm(letter, n))) == count


def test_a2_roots():
    assert set(positive_roots(cm("A", 2))) == {(1, 0), (0, 1), (1, 1)}


def test_longest_words():
    assert len(longest_word(cm("A", 2))) == 3
    assert longest_word(cm("A", 2), ()) == ()
    assert sorted(longest_word(cm("A", 3), (0, 2))) == [0, 2]


def test_inversion_set():
    assert inversion_set(cm("A", 2), (0, 1, 0)) == [(1, 0), (1, 1), (0, 1)]
    assert inversion_set(cm("A", 2), ()) == []


def test_aiii3_inversions_split():
    sd = preset("AIII3")
    roots = inversion_set(sd.cartan, sd.refined_word())
    assert len(roots) == 6
    # brute force: every positive root of A3 appears exactly once
    assert sorted(roots) == sorted(positive_roots(sd.cartan))


def test_braid_orders():
    a2 = cm("A", 2)
    assert braid_order(a2, (0,), (1,)) == 3
    assert braid_order(cm("A", 3), (0,), (2,)) == 2
    assert preset("AIII3").braid_order_relative(0, 1) == 4


def test_aiii3_order_brute_force():
    sd = preset("AIII3")
    w = sd.bs(0) * sd.bs(1)
    k, cur = 1, w
    while not cur.is_identity():
        cur, k = cur * w, k + 1
    assert k == 4


def test_relative_generators():
    assert preset("AI1").relative_generator(0)[0] == (0,)
    assert preset("AIII11").bs(0) == WeylElement.from_word(preset("AIII11").cartan, (0, 1))
    sd = preset("AII3")
    assert sd.bs(1) == WeylElement.from_word(sd.cartan, (1, 0, 2, 1))


def test_y_iota():
    assert preset("AI2").y_iota_basis == []
    assert [tuple(b) for b in preset("AIV2").y_iota_basis] == [(1, -1)]
    assert [tuple(b) for b in preset("AIII3").y_iota_basis] == [(1, 0, -1)]
    for name in ("AII3", "CII3", "BII2", "diagonal-A2"):
        sd = preset(name)
        for b in sd.y_iota_basis:
            assert sd.theta(b) == tuple(b)


def test_signs_default():
    assert preset("AI2").c == {0: -1, 1: -1}


def test_kostant():
    a2 = cm("A", 2)
    assert kostant_count(a2, (2, 1)) == 2
    assert kostant_count(a2, (1, 1)) == 2
    assert kostant_count(cm("B", 2), (1, 2)) == 3


def test_bad_diagrams():
    a3 = cm("A", 3)
    with pytest.raises(DiagramError):
        SatakeDiagram(a3, tau=(1, 0, 2, 3))
    with pytest.raises(DiagramError):
        SatakeDiagram(a3, black=(0,))  # <rho_black^vee, alpha_2> = -1/2
    with pytest.raises(DiagramError):
        diagram_from_dict({"type": "A2", "cartan": [[2]]})
    with pytest.raises(DiagramError):
        resolve_diagram("not-a-preset")


def test_config_round_trip(tmp_path):
    p = tmp_path / "d.yaml"
    p.write_text("type: A3\nblack: [1, 3]\nname: AII3-file\n")
    sd = resolve_diagram(str(p))
    assert sd.black == {0, 2} and sd.name == "AII3-file"
    assert sd.bs(1) == preset("AII3").bs(1)


def test_families():
    assert family("AI4").real_rank() == 4
    assert family("DI5").tau == (0, 1, 2, 4, 3)
    assert len(preset("diagonal-A2").reps) == 2


def test_w0circ_word():
    sd = preset("AIII3")
    assert sd.relative_element(sd.w0circ_word) == sd.w0circ
    assert sd.relative_length(sd.w0circ_word) == len(positive_roots(sd.cartan))
    assert longest_element(sd.cartan).length() == 6
