"""Lusztig's braid symmetries T_i^{+-1} on U and the PBW root vectors."""
from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .rootdata import CartanData, DiagramError, SatakeDiagram, braid_order, inversion_set, is_reduced
from .scalarfield import ONE, quantum_binomial, quantum_factorial
from .uqcore import (E, F, K, PBWData, TriWord, UAlgebra, UElement, _alg, anti_sigma, qp)


class BraidOp(NamedTuple):
    i: int
    inverse: bool = False


class Automorphism:
    """Algebra endomorphism of U given by images of E_i, F_i and a map on K-weights."""

    def __init__(self, alg: UAlgebra, e_images, f_images, k_map, name=""):
        self.alg = alg
        self.e_images = list(e_images)
        self.f_images = list(f_images)
        self.k_map = k_map
        self.name = name
        self._fw: dict = {(): UElement.one(alg)}
        self._ew: dict = {(): UElement.one(alg)}
        self._lock = threading.RLock()

    def _word(self, word, side):
        memo = self._fw if side == "F" else self._ew
        got = memo.get(word)
        if got is not None:
            return got
        imgs = self.f_images if side == "F" else self.e_images
        val = self._word(word[:-1], side) * imgs[word[-1]]
        memo[word] = val
        return val

    def __call__(self, x: UElement) -> UElement:
        if x.alg is not self.alg:
            raise DiagramError("element from another quantum group")
        out = UElement.zero(self.alg)
        for t, c in x.terms.items():
            img = self._word(t.f, "F") * K(self.alg, self.k_map(t.mu)) * self._word(t.e, "E")
            out = out + img.scale(c)
        return out

    def on_generators(self):
        n = self.alg.n
        for i in range(n):
            yield ("E", i), self.e_images[i]
            yield ("F", i), self.f_images[i]


def _t_forward_images(alg: UAlgebra, i: int):
    cm = alg.cartan
    ei = cm.eps[i]
    qi = lambda x: qp(Fraction(ei) * x)  # noqa: E731
    n = cm.n
    e_img, f_img = [], []
    for j in range(n):
        if j == i:
            e_img.append((F(alg, i) * K(alg, _unit(n, i))).scale(qi(-1)))
            f_img.append((K(alg, _unit(n, i, -1)) * E(alg, i)).scale(qi(1)))
            continue
        a = cm.a[i][j]
        m = -a
        # T_i(E_j)
        pref = qi(Fraction(a, 2)) * (qi(-1) - qi(1)) ** m * quantum_factorial(m, ei)
        s = UElement.zero(alg)
        for r in range(m + 1):
            c = quantum_binomial(m, r, ei) * qi(-r)
            if r % 2:
                c = -c
            s = s + (E(alg, i) ** (m - r) * E(alg, j) * E(alg, i) ** r).scale(c)
        e_img.append(s.scale(ONE / pref))
        # T_i(F_j)
        pref = qi(Fraction(-a, 2)) * (qi(1) - qi(-1)) ** m * quantum_factorial(m, ei)
        s = UElement.zero(alg)
        for r in range(m + 1):
            c = quantum_binomial(m, r, ei) * qi(r)
            if r % 2:
                c = -c
            s = s + (F(alg, i) ** r * F(alg, j) * F(alg, i) ** (m - r)).scale(c)
        f_img.append(s.scale(ONE / pref))
    return e_img, f_img


def _unit(n, i, c=1):
    return tuple(c if k == i else 0 for k in range(n))


class _Cache:
    lock = threading.RLock()
    ops: dict = {}


def lusztig_T(alg, i: int, inverse: bool = False) -> Automorphism:
    alg = _alg(alg)
    key = (alg, i, inverse)
    got = _Cache.ops.get(key)
    if got is not None:
        return got
    with _Cache.lock:
        if key in _Cache.ops:
            return _Cache.ops[key]
        cm = alg.cartan
        e_img, f_img = _t_forward_images(alg, i)
        if inverse:
            # T_i^-1 = sigma T_i sigma with sigma the anti-automorphism fixing E_i, F_i
            e_img = [anti_sigma(x) for x in e_img]
            f_img = [anti_sigma(x) for x in f_img]
        op = Automorphism(alg, e_img, f_img, lambda mu, i=i: cm.reflect(i, mu),
                          name=f"T{i + 1}" + ("^-1" if inverse else ""))
        _Cache.ops[key] = op
        if inverse:
            _verify_inverse(alg, i)
        return op


def _verify_inverse(alg: UAlgebra, i: int):
    fwd = lusztig_T(alg, i)
    inv = _Cache.ops[(alg, i, True)]
    for j in range(alg.n):
        for g in (E(alg, j), F(alg, j)):
            if fwd(inv(g)) != g or inv(fwd(g)) != g:
                del _Cache.ops[(alg, i, True)]
                raise AssertionError(f"T_{i + 1} and its inverse formulas disagree on a generator")


def apply_T(op: BraidOp, x: UElement) -> UElement:
    return lusztig_T(x.alg, op.i, op.inverse)(x)


def apply_word(word, x: UElement, inverse: bool = False) -> UElement:
    """T_{w1} T_{w2} ... T_{wk}(x); with inverse=True, T_{w1}^-1 ... T_{wk}^-1 (x)."""
    for i in reversed(tuple(word)):
        x = lusztig_T(x.alg, i, inverse)(x)
    return x


def T_w(word, x: UElement) -> UElement:
    return apply_word(word, x)


def T_w_inverse(word, x: UElement) -> UElement:
    """T_w^-1 (x) = T_{wk}^-1 ... T_{w1}^-1 (x)."""
    return apply_word(tuple(reversed(tuple(word))), x, inverse=True)


# ---------------------------------------------------------------- checks

def relation_images(op: Automorphism) -> list:
    """Images of every defining relation; all must vanish."""
    alg = op.alg
    n = alg.n
    out = []
    eimg, fimg = op.e_images, op.f_images

    def kimg(i, s=1):
        return K(alg, op.k_map(_unit(n, i, s)))
    for i in range(n):
        for j in range(n):
            kij = qp(alg.b[j][i])
            out.append(kimg(j) * eimg[i] - (eimg[i] * kimg(j)).scale(kij))
            out.append(kimg(j) * fimg[i] - (fimg[i] * kimg(j)).scale(ONE / kij))
            rhs = UElement.zero(alg)
            if i == j:
                ei = alg.cartan.eps[i]
                rhs = (kimg(i, -1) - kimg(i)).scale(qp(ei) - qp(-ei))
            out.append(eimg[i] * fimg[j] - fimg[j] * eimg[i] - rhs)
    for _, rel in alg.serre:
        for imgs in (eimg, fimg):
            s = UElement.zero(alg)
            for word, c in rel.items():
                p = UElement.one(alg)
                for x in word:
                    p = p * imgs[x]
                s = s + p.scale(c)
            out.append(s)
    return out


def check_relation_preservation(op, sd) -> bool:
    if isinstance(op, BraidOp):
        op = lusztig_T(_alg(sd), op.i, op.inverse)
    return all(r.is_zero() for r in relation_images(op))


def corrupted_T(alg, i: int) -> Automorphism:
    """T_i with one summand dropped from the first T_i(E_j), j != i (negative control)."""
    alg = _alg(alg)
    good = lusztig_T(alg, i)
    e_img = list(good.e_images)
    for j in range(alg.n):
        if j != i and alg.cartan.a[i][j] != 0:
            terms = dict(e_img[j].terms)
            terms.pop(max(terms))
            e_img[j] = UElement(alg, terms)
            break
    return Automorphism(alg, e_img, good.f_images, good.k_map, name=f"corrupt T{i + 1}")


def verify_braid_relation(i: int, j: int, sd) -> bool:
    alg = _alg(sd)
    cm = alg.cartan
    if i == j:
        raise ValueError("braid relation needs i != j")
    m = braid_order(cm, (i,), (j,))
    w1 = tuple(i if k % 2 == 0 else j for k in range(m))
    w2 = tuple(j if k % 2 == 0 else i for k in range(m))
    for k in range(alg.n):
        for g in (E(alg, k), F(alg, k)):
            if apply_word(w1, g) != apply_word(w2, g):
                return False
    return True


# ---------------------------------------------------------------- root vectors

def root_vectors(sd, w0_word) -> list:
    """[(beta_k, F_beta_k, E_beta_k)] for a reduced word of w0."""
    alg = _alg(sd)
    cm = alg.cartan
    word = tuple(w0_word)
    if not is_reduced(cm, word):
        raise DiagramError("root vectors need a reduced word")
    roots = inversion_set(cm, word)
    out = []
    for k, i in enumerate(word):
        fb = apply_word(word[:k], F(alg, i))
        eb = apply_word(word[:k], E(alg, i))
        out.append((roots[k], fb, eb))
    return out


@lru_cache(maxsize=None)
def pbw_data(cartan: CartanData, w0_word: tuple) -> PBWData:
    from .rootdata import longest_element, WeylElement
    alg = _alg(cartan)
    if WeylElement.from_word(cartan, w0_word) != longest_element(cartan) or len(w0_word) != len(cartan.roots.positive):
        raise DiagramError("PBW data needs a reduced word of the longest element")
    rv = root_vectors(cartan, w0_word)
    return PBWData(alg, w0_word, [r for r, _, _ in rv], [f for _, f, _ in rv], [e for _, _, e in rv])


def default_pbw(cartan: CartanData, black=()) -> PBWData:
    """PBW data for the reduced word of w0 starting with the lex-least word of w_black."""
    from .rootdata import longest_element
    wb = longest_element(cartan, black)
    w0 = longest_element(cartan)
    rest = (wb.inverse() * w0).word()
    return pbw_data(cartan, tuple(wb.word()) + tuple(rest))
