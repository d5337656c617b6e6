"""The quantum group U in triangular normal form F^f K_mu E^e.

Generators F_i, E_i, K_mu (mu in the root lattice, written in simple-root
coordinates).  Relations

    K_mu E_i = q^(mu, alpha_i) E_i K_mu,    K_mu F_i = q^-(mu, alpha_i) F_i K_mu,
    [E_i, F_j] = delta_ij (q_i - q_i^-1)(K_i^-1 - K_i),

plus the quantum Serre relations on each side.  Pure F-words (and E-words)
are reduced modulo the Serre ideal one multidegree at a time: the words of a
multidegree are ordered lexicographically, the ideal is echelonized with
pivots on the earliest words, and the remaining words are the standard
words.  Since a suffix of a standard word is standard, the table for degree
nu only needs the span of F_k * (standard words of nu - alpha_k).
"""
from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple

from ._linalg import Echelon, axpy, solve_in_basis
from .rootdata import CartanData, DiagramError, SatakeDiagram, kostant_count, sub, add
from .scalarfield import (ONE, ZERO, IntegralityProfile, Scalar, format_scalar, parse_scalar,
                          quantum_binomial, scalar)


class HeightCeilingError(RuntimeError):
    """Raised when a computation needs a multidegree above the configured ceiling."""


class TriWord(NamedTuple):
    f: tuple
    mu: tuple
    e: tuple


@lru_cache(maxsize=None)
def qp(x) -> Scalar:
    """q^x."""
    return Scalar.qpow(x)


class UAlgebra:
    """Caches attached to one Cartan matrix."""

    max_height = 40

    def __init__(self, cartan: CartanData):
        self.cartan = cartan
        self.n = cartan.n
        n = self.n
        self.b = tuple(tuple(cartan.eps[i] * cartan.a[i][j] for j in range(n)) for i in range(n))
        self.zero = (0,) * n
        self._lock = threading.RLock()
        self._std: dict = {}
        self._left: dict = {}
        self._reduce_memo: dict = {}
        self._straighten_memo: dict = {}
        self.serre = self._serre_relations()

    def __repr__(self):
        return f"UAlgebra({[list(r) for r in self.cartan.a]})"

    # pairing helpers
    def pair(self, mu, nu) -> int:
        b = self.b
        return sum(mu[i] * b[i][j] * nu[j] for i in range(self.n) if mu[i] for j in range(self.n) if nu[j])

    def pair_simple(self, mu, i: int) -> int:
        b = self.b
        return sum(mu[k] * b[k][i] for k in range(self.n) if mu[k])

    def weight(self, word) -> tuple:
        w = [0] * self.n
        for x in word:
            w[x] += 1
        return tuple(w)

    # Serre reduction
    def _serre_relations(self) -> list:
        rels = []
        a = self.cartan.a
        for i in range(self.n):
            for j in range(self.n):
                if i == j:
                    continue
                m = 1 - a[i][j]
                terms = {}
                for r in range(m + 1):
                    c = quantum_binomial(m, r, self.cartan.eps[i])
                    if r % 2:
                        c = -c
                    terms[(i,) * r + (j,) + (i,) * (m - r)] = c
                rels.append(((i, j), terms))
        return rels

    def standard_words(self, nu) -> list:
        nu = tuple(nu)
        if nu not in self._std:
            with self._lock:
                if nu not in self._std:
                    self._build(nu)
        return self._std[nu]

    def _build(self, nu: tuple):
        if any(x < 0 for x in nu):
            self._std[nu] = []
            return
        h = sum(nu)
        if h > self.max_height:
            raise HeightCeilingError(f"multidegree {nu} exceeds height ceiling {self.max_height}")
        if h == 0:
            self._std[nu] = [()]
            return
        basis = []
        for k in range(self.n):
            if nu[k]:
                lower = list(nu)
                lower[k] -= 1
                for s in self.standard_words(tuple(lower)):
                    basis.append((k,) + s)
        basis.sort()
        ech = Echelon()
        if h >= 2:
            for _, rel in self.serre:
                d = self.weight(next(iter(rel)))
                rest = sub(nu, d)
                if any(x < 0 for x in rest):
                    continue
                for y in self.standard_words(rest):
                    vec: dict = {}
                    for u, c in rel.items():
                        tail = self.reduce_word(u[1:] + y)
                        axpy(vec, c, {(u[0],) + s: v for s, v in tail.items()})
                    ech.add(vec)
        exp = ech.pivot_expansion()
        std = [w for w in basis if w not in exp]
        expect = kostant_count(self.cartan, nu)
        if len(std) != expect:
            raise AssertionError(f"degree {nu}: {len(std)} standard words, expected {expect}")
        for w in basis:
            self._left[w] = exp[w] if w in exp else {w: ONE}
        self._std[nu] = std

    def _left_mult(self, k: int, s: tuple) -> dict:
        w = (k,) + s
        if w not in self._left:
            nu = list(self.weight(s))
            nu[k] += 1
            self.standard_words(tuple(nu))
        return self._left[w]

    def reduce_word(self, word) -> dict:
        """Expansion of a word in standard words."""
        word = tuple(word)
        got = self._reduce_memo.get(word)
        if got is not None:
            return got
        if len(word) <= 1:
            out = {word: ONE}
        else:
            tail = self.reduce_word(word[1:])
            out = {}
            for s, c in tail.items():
                axpy(out, c, self._left_mult(word[0], s))
        self._reduce_memo[word] = out
        return out

    def reduce_combination(self, comb: dict) -> dict:
        out: dict = {}
        for w, c in comb.items():
            axpy(out, c, self.reduce_word(w))
        return out

    # straightening E^e F^f
    def straighten(self, e: tuple, f: tuple) -> dict:
        """E^e F^f as a sum of (f', mu, e') -> coefficient, words not yet reduced."""
        key = (e, f)
        got = self._straighten_memo.get(key)
        if got is not None:
            return got
        if not e or not f:
            out = {(f, self.zero, e): ONE}
            self._straighten_memo[key] = out
            return out
        i = e[-1]
        head = e[:-1]
        eps = self.cartan.eps[i]
        qi = qp(eps) - qp(-eps)
        # E_i F^f = F^f E_i + sum over positions p with f_p = i
        pieces = [(f, self.zero, (i,), ONE)]
        for p, x in enumerate(f):
            if x != i:
                continue
            rest = f[p + 1:]
            t = self.pair_simple(self.weight(rest), i)
            g = f[:p] + rest
            ai = tuple(1 if k == i else 0 for k in range(self.n))
            pieces.append((g, tuple(-x for x in ai), (), qi * qp(t)))
            pieces.append((g, ai, (), -(qi * qp(-t))))
        out: dict = {}
        for g, nu, tail, c in pieces:
            for (a, lam, bword), c2 in self.straighten(head, g).items():
                coeff = c * c2 * qp(-self.pair(nu, self.weight(bword)))
                k = (a, add(lam, nu), bword + tail)
                axpy(out, coeff, {k: ONE})
        self._straighten_memo[key] = out
        return out


@lru_cache(maxsize=None)
def algebra(cartan: CartanData) -> UAlgebra:
    return UAlgebra(cartan)


def _alg(x) -> UAlgebra:
    if isinstance(x, UAlgebra):
        return x
    if isinstance(x, SatakeDiagram):
        return algebra(x.cartan)
    if isinstance(x, CartanData):
        return algebra(x)
    raise TypeError(f"cannot build an algebra from {type(x).__name__}")


class UElement:
    """Immutable element of U stored as {TriWord: Scalar} in normal form."""

    __slots__ = ("alg", "terms", "_hash")

    def __init__(self, alg: UAlgebra, terms: dict | None = None, _normal: bool = True):
        self.alg = alg
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, alg) -> "UElement":
        return cls(_alg(alg), {})

    @classmethod
    def one(cls, alg) -> "UElement":
        a = _alg(alg)
        return cls(a, {TriWord((), a.zero, ()): ONE})

    @classmethod
    def scalar(cls, alg, c) -> "UElement":
        a = _alg(alg)
        return cls(a, {TriWord((), a.zero, ()): scalar(c)})

    # structure
    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other):
        if not isinstance(other, UElement):
            return UElement.scalar(self.alg, other)
        if other.alg is not self.alg:
            raise DiagramError("elements live in different quantum groups")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            w = out.get(k)
            out[k] = v if w is None else w + v
        return UElement(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return UElement(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c) -> "UElement":
        c = scalar(c)
        if c.is_zero():
            return UElement(self.alg, {})
        return UElement(self.alg, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, UElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        return self.scale(ONE / scalar(c))

    def __pow__(self, n: int):
        r = UElement.one(self.alg)
        for _ in range(n):
            r = r * self
        return r

    def __eq__(self, other):
        if not isinstance(other, UElement):
            other = UElement.scalar(self.alg, other)
        return self.alg is other.alg and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def degree_set(self) -> set:
        a = self.alg
        return {sub(a.weight(t.f), a.weight(t.e)) for t in self.terms}

    def degree(self):
        """The multidegree, or None when x is not homogeneous (zero is homogeneous of degree 0)."""
        ds = self.degree_set()
        if not ds:
            return self.alg.zero
        if len(ds) > 1:
            return None
        return ds.pop()

    def coefficient(self, f=(), mu=None, e=()) -> Scalar:
        mu = self.alg.zero if mu is None else tuple(mu)
        return self.terms.get(TriWord(tuple(f), mu, tuple(e)), ZERO)

    def map_coefficients(self, fn) -> "UElement":
        return UElement(self.alg, {k: fn(v) for k, v in self.terms.items()})

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0].f) + len(kv[0].e), kv[0]))

    def __repr__(self):
        return f"UElement({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({format_scalar(c)})*{format_triword(t)}" for t, c in self.sorted_terms())


def format_triword(t: TriWord) -> str:
    parts = [f"F{x + 1}" for x in t.f]
    if any(t.mu):
        parts.append("K[" + ",".join(str(m) for m in t.mu) + "]")
    parts += [f"E{x + 1}" for x in t.e]
    return "*".join(parts) or "1"


# -------------------------------------------------------------- generators

def F(alg, i: int) -> UElement:
    a = _alg(alg)
    return UElement(a, {TriWord((i,), a.zero, ()): ONE})


def E(alg, i: int) -> UElement:
    a = _alg(alg)
    return UElement(a, {TriWord((), a.zero, (i,)): ONE})


def K(alg, mu) -> UElement:
    a = _alg(alg)
    return UElement(a, {TriWord((), tuple(mu), ()): ONE})


def Ki(alg, i: int, power: int = 1) -> UElement:
    a = _alg(alg)
    mu = [0] * a.n
    mu[i] = power
    return K(a, mu)


def Fword(alg, word) -> UElement:
    a = _alg(alg)
    return UElement(a, {TriWord(tuple(s), a.zero, ()): c for s, c in a.reduce_word(word).items()})


def Eword(alg, word) -> UElement:
    a = _alg(alg)
    return UElement(a, {TriWord((), a.zero, tuple(s)): c for s, c in a.reduce_word(word).items()})


# -------------------------------------------------------------- products

def _term_product(alg: UAlgebra, t1: TriWord, t2: TriWord) -> dict:
    out: dict = {}
    f1, mu1, e1 = t1
    f2, mu2, e2 = t2
    for (fa, nu, eb), c in alg.straighten(e1, f2).items():
        tw = -alg.pair(mu1, alg.weight(fa)) - alg.pair(mu2, alg.weight(eb))
        coeff = c * qp(tw) if tw else c
        mu = tuple(x + y + z for x, y, z in zip(mu1, nu, mu2))
        fred = alg.reduce_word(f1 + fa)
        ered = alg.reduce_word(eb + e2)
        for fs, cf in fred.items():
            cfc = coeff * cf
            for es, ce in ered.items():
                k = TriWord(fs, mu, es)
                v = cfc * ce
                w = out.get(k)
                out[k] = v if w is None else w + v
    return out


def multiply(x: UElement, y: UElement) -> UElement:
    if x.alg is not y.alg:
        raise DiagramError("elements live in different quantum groups")
    alg = x.alg
    out: dict = {}
    for t1, c1 in x.terms.items():
        for t2, c2 in y.terms.items():
            c = c1 * c2
            for k, v in _term_product(alg, t1, t2).items():
                w = out.get(k)
                out[k] = c * v if w is None else w + c * v
    return UElement(alg, out)


def product(alg, factors: Iterable[UElement]) -> UElement:
    r = UElement.one(alg)
    for f in factors:
        r = r * f
    return r


def normal_form(raw, sd) -> UElement:
    """Normal form of a formal sum of words.

    raw is a list of (coefficient, letters) where a letter is ('F', i),
    ('E', i) or ('K', mu) with 0-based indices, or a string accepted by
    parse_element.
    """
    alg = _alg(sd)
    if isinstance(raw, str):
        return parse_element(alg, raw)
    total = UElement.zero(alg)
    for coeff, letters in raw:
        term = UElement.scalar(alg, coeff)
        for letter in letters:
            kind = letter[0]
            if kind == "F":
                g = F(alg, letter[1])
            elif kind == "E":
                g = E(alg, letter[1])
            elif kind == "K":
                g = K(alg, letter[1]) if not isinstance(letter[1], int) else \
                    Ki(alg, letter[1], letter[2] if len(letter) > 2 else 1)
            else:
                raise ValueError(f"unknown letter {letter!r}")
            term = term * g
        total = total + term
    return total


def q_commutator(a: UElement, b: UElement, power=0) -> UElement:
    """[a, b]_{q^power} = ab - q^power ba."""
    return a * b - (b * a).scale(qp(Fraction(power)))


def rescaled_q_commutator(a: UElement, b: UElement, power=0) -> UElement:
    """{a, b}_{q^power} = (ab - q^power ba) / (q - 1)."""
    return q_commutator(a, b, power).scale(ONE / (qp(1) - ONE))


# -------------------------------------------------------------- anti-automorphism

def anti_sigma(x: UElement) -> UElement:
    """The anti-automorphism E_i -> E_i, F_i -> F_i, K_mu -> K_-mu."""
    alg = x.alg
    out = UElement.zero(alg)
    for t, c in x.terms.items():
        term = Eword(alg, t.e[::-1]) * K(alg, tuple(-m for m in t.mu)) * Fword(alg, t.f[::-1])
        out = out + term.scale(c)
    return out


def ekf_terms(x: UElement) -> dict:
    """x written as sum c E^e K_mu F^f; keys (e, mu, f) with reduced e and f."""
    alg = x.alg
    y = anti_sigma(x)
    out: dict = {}
    for t, c in y.terms.items():
        e = alg.reduce_word(t.e[::-1])
        f = alg.reduce_word(t.f[::-1])
        mu = tuple(-m for m in t.mu)
        for es, ce in e.items():
            for fs, cf in f.items():
                axpy(out, c * ce * cf, {(es, mu, fs): ONE})
    return out


def from_ekf(alg: UAlgebra, terms: dict) -> UElement:
    out = UElement.zero(alg)
    for (e, mu, f), c in terms.items():
        out = out + (Eword(alg, e) * K(alg, mu) * Fword(alg, f)).scale(c)
    return out


# -------------------------------------------------------------- projection

def project_P(x: UElement, sd: SatakeDiagram) -> UElement:
    """pi_P = pi^+_{w_black} (x) pi^0 (x) id on the E K F ordering."""
    alg = x.alg
    black = set(sd.black)
    kept: dict = {}
    for (e, mu, f), c in ekf_terms(x).items():
        # the U^+(w_black)^c factor has degree outside the black span unless it is 1
        if any(k not in black for k in e):
            continue
        _, mu_i, _ = sd.split_weight(mu)
        axpy(kept, c, {(e, mu_i, f): ONE})
    return from_ekf(alg, kept)


def in_U_P(x: UElement, sd: SatakeDiagram) -> bool:
    return project_P(x, sd) == x


# -------------------------------------------------------------- PBW coordinates

class PBWMonomial(NamedTuple):
    f_exponents: tuple
    k_weight: tuple
    e_exponents: tuple


class PBWData:
    """Root vectors for one reduced word of w0, with per-degree change of basis."""

    def __init__(self, alg: UAlgebra, word, roots, fvecs, evecs):
        self.alg = alg
        self.word = tuple(word)
        self.roots = list(roots)
        self.fvecs = list(fvecs)   # F_beta as UElement
        self.evecs = list(evecs)   # E_beta as UElement
        self._fcache: dict = {}
        self._ecache: dict = {}
        self._lock = threading.RLock()

    def exponent_vectors(self, nu) -> list:
        out = []
        roots = self.roots

        def rec(k, rest, acc):
            if k == len(roots):
                if not any(rest):
                    out.append(tuple(acc))
                return
            m = 0
            cur = rest
            while all(x >= 0 for x in cur):
                rec(k + 1, cur, acc + [m])
                m += 1
                cur = sub(cur, roots[k])
        rec(0, tuple(nu), [])
        return out

    def f_monomial(self, a) -> UElement:
        r = UElement.one(self.alg)
        for k, m in enumerate(a):
            for _ in range(m):
                r = r * self.fvecs[k]
        return r

    def e_monomial(self, c) -> UElement:
        # E^c = E_beta_l^c_l ... E_beta_1^c_1
        r = UElement.one(self.alg)
        for k in range(len(c) - 1, -1, -1):
            for _ in range(c[k]):
                r = r * self.evecs[k]
        return r

    def _table(self, nu, side):
        cache = self._fcache if side == "F" else self._ecache
        if nu not in cache:
            with self._lock:
                if nu not in cache:
                    cols = {}
                    for a in self.exponent_vectors(nu):
                        m = self.f_monomial(a) if side == "F" else self.e_monomial(a)
                        cols[a] = {t.f if side == "F" else t.e: c for t, c in m.terms.items()}
                    std = self.alg.standard_words(nu)
                    table = {}
                    for w in std:
                        table[w] = solve_in_basis(cols, {w: ONE})
                    cache[nu] = table
        return cache[nu]

    def expand_word(self, word, side: str) -> dict:
        alg = self.alg
        nu = alg.weight(word)
        table = self._table(nu, side)
        out: dict = {}
        for s, c in alg.reduce_word(word).items():
            axpy(out, c, table[s])
        return out


def pbw_coordinates(x: UElement, pbw: PBWData) -> dict:
    out: dict = {}
    fmemo: dict = {}
    ememo: dict = {}
    for t, c in x.terms.items():
        if t.f not in fmemo:
            fmemo[t.f] = pbw.expand_word(t.f, "F")
        if t.e not in ememo:
            ememo[t.e] = pbw.expand_word(t.e, "E")
        for a, ca in fmemo[t.f].items():
            for b, cb in ememo[t.e].items():
                axpy(out, c * ca * cb, {PBWMonomial(a, t.mu, b): ONE})
    return out


def from_pbw(coords: dict, pbw: PBWData) -> UElement:
    alg = pbw.alg
    out = UElement.zero(alg)
    for m, c in coords.items():
        out = out + (pbw.f_monomial(m.f_exponents) * K(alg, m.k_weight) * pbw.e_monomial(m.e_exponents)).scale(c)
    return out


def is_integral(x: UElement, profile: IntegralityProfile, pbw: PBWData) -> bool:
    return all(profile.contains(c) for c in pbw_coordinates(x, pbw).values())


def non_integral_coefficients(x: UElement, profile: IntegralityProfile, pbw: PBWData) -> dict:
    return {m: c for m, c in pbw_coordinates(x, pbw).items() if not profile.contains(c)}


# -------------------------------------------------------------- serialization

def to_records(x: UElement) -> list:
    """Canonical term list: [f letters, mu, e letters, coefficient], letters 1-based."""
    return [[[i + 1 for i in t.f], list(t.mu), [i + 1 for i in t.e], format_scalar(c)]
            for t, c in x.sorted_terms()]


def from_records(alg, records) -> UElement:
    a = _alg(alg)
    terms = {}
    for f, mu, e, c in records:
        terms[TriWord(tuple(i - 1 for i in f), tuple(mu), tuple(i - 1 for i in e))] = parse_scalar(c)
    return UElement(a, terms)


def parse_element(alg, text: str) -> UElement:
    """Parse sums of products like '2*F1*F2 - (v^2)*K[1,0]*E1' (1-based letters)."""
    import re
    a = _alg(alg)
    text = text.replace(" ", "")
    if not text:
        return UElement.zero(a)
    tokens = re.findall(r"F\d+|E\d+|K\[[-\d,]*\]|K\d+(?:\^-?\d+)?|[+\-*()/^]|[^+\-*()/^]+", text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        pos += 1
        return tokens[pos - 1]

    def atom():
        t = peek()
        if t is None:
            raise ValueError("unexpected end of input")
        if t == "(":
            take()
            v = expr()
            if take() != ")":
                raise ValueError("missing ')'")
            return v
        if t == "-":
            take()
            return -atom()
        take()
        if re.fullmatch(r"F\d+", t):
            return F(a, int(t[1:]) - 1)
        if re.fullmatch(r"E\d+", t):
            return E(a, int(t[1:]) - 1)
        if t.startswith("K["):
            mu = tuple(int(x) for x in t[2:-1].split(",")) if t[2:-1] else a.zero
            return K(a, mu)
        m = re.fullmatch(r"K(\d+)(?:\^(-?\d+))?", t)
        if m:
            return Ki(a, int(m.group(1)) - 1, int(m.group(2) or 1))
        return UElement.scalar(a, parse_scalar(t))

    def power():
        base = atom()
        if peek() == "^":
            take()
            sign = 1
            if peek() == "-":
                take()
                sign = -1
            n = int(take()) * sign
            if n < 0:
                if len(base.terms) != 1 or next(iter(base.terms)).f or next(iter(base.terms)).e:
                    raise ValueError("negative powers only for scalars and K")
                (t, c), = base.terms.items()
                return UElement(a, {TriWord((), tuple(-m * -n for m in t.mu), ()): c ** n})
            return base ** n
        return base

    def term():
        v = power()
        while peek() in ("*", "/"):
            op = take()
            rhs = power()
            if op == "*":
                v = v * rhs
            else:
                (t, c), = rhs.terms.items()
                if t.f or t.e or any(t.mu):
                    raise ValueError("can only divide by scalars")
                v = v.scale(ONE / c)
        return v

    def expr():
        v = term()
        while peek() in ("+", "-"):
            op = take()
            rhs = term()
            v = v + rhs if op == "+" else v - rhs
        return v

    out = expr()
    if pos != len(tokens):
        raise ValueError(f"trailing input at {tokens[pos]!r}")
    return out
