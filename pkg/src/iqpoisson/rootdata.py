"""Cartan data, root systems, Weyl groups and Satake diagrams.

Nodes are 0-based internally and printed 1-based.  A weight is a tuple of
integers indexed by the nodes (coordinates in the simple roots).

Conventions: a_ij = <h_i, alpha_j> and s_i(alpha_j) = alpha_j - a_ij alpha_i.
The symmetrizers eps_i satisfy eps_i a_ij = eps_j a_ji, so that
(alpha_i, alpha_j) = eps_i a_ij.  In B_n the last node is short, in C_n the
last node is long, in F_4 nodes 3, 4 are short and in G_2 node 1 is short.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import Iterable, Sequence

Weight = tuple


class DiagramError(ValueError):
    pass


def add(mu, nu):
    return tuple(a + b for a, b in zip(mu, nu))


def sub(mu, nu):
    return tuple(a - b for a, b in zip(mu, nu))


def scale(c, mu):
    return tuple(c * a for a in mu)


def is_positive(mu) -> bool:
    return any(mu) and all(a >= 0 for a in mu)


def is_negative(mu) -> bool:
    return any(mu) and all(a <= 0 for a in mu)


def unit(n, i):
    return tuple(1 if k == i else 0 for k in range(n))


# ------------------------------------------------------------------- Cartan

def cartan_matrix(letter: str, n: int) -> list[list[int]]:
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, aij=-1, aji=-1):
        a[i][j] = aij
        a[j][i] = aji

    letter = letter.upper()
    if letter == "A":
        for i in range(n - 1):
            link(i, i + 1)
    elif letter == "B":
        if n < 2:
            raise DiagramError("B_n needs n >= 2")
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 2, n - 1, -1, -2)
    elif letter == "C":
        if n < 2:
            raise DiagramError("C_n needs n >= 2")
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 2, n - 1, -2, -1)
    elif letter == "D":
        if n < 4:
            raise DiagramError("D_n needs n >= 4")
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif letter == "E":
        if n not in (6, 7, 8):
            raise DiagramError("E_n needs n in 6, 7, 8")
        # chain 1-2-3-...-(n-1), node n attached to node 3
        for i in range(n - 2):
            link(i, i + 1)
        link(2, n - 1)
    elif letter == "F":
        if n != 4:
            raise DiagramError("F_n needs n = 4")
        link(0, 1)
        link(1, 2, -1, -2)
        link(2, 3)
    elif letter == "G":
        if n != 2:
            raise DiagramError("G_n needs n = 2")
        link(0, 1, -3, -1)
    else:
        raise DiagramError(f"unknown Cartan type {letter}")
    return a


def block_diagonal(*mats):
    n = sum(len(m) for m in mats)
    a = [[0] * n for _ in range(n)]
    off = 0
    for m in mats:
        for i, row in enumerate(m):
            for j, x in enumerate(row):
                a[off + i][off + j] = x
        off += len(m)
    return a


def symmetrizers(a) -> tuple:
    """The unique coprime positive eps with eps_i a_ij = eps_j a_ji."""
    n = len(a)
    eps: list = [None] * n
    for start in range(n):
        if eps[start] is not None:
            continue
        eps[start] = Fraction(1)
        stack = [start]
        comp = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if i != j and a[i][j] != 0:
                    if a[j][i] == 0:
                        raise DiagramError("Cartan matrix is not symmetrizable")
                    val = eps[i] * a[i][j] / a[j][i]
                    if eps[j] is None:
                        eps[j] = val
                        stack.append(j)
                        comp.append(j)
                    elif eps[j] != val:
                        raise DiagramError("Cartan matrix is not symmetrizable")
        # scale the component to coprime integers
        den = 1
        for i in comp:
            den = den * eps[i].denominator // gcd(den, eps[i].denominator)
        vals = [int(eps[i] * den) for i in comp]
        g = 0
        for x in vals:
            g = gcd(g, x)
        for i, x in zip(comp, vals):
            eps[i] = x // g
    return tuple(int(e) for e in eps)


class CartanData:
    def __init__(self, matrix: Sequence[Sequence[int]], eps: Sequence[int] | None = None):
        self.a = tuple(tuple(int(x) for x in row) for row in matrix)
        self.n = len(self.a)
        for i in range(self.n):
            if len(self.a[i]) != self.n:
                raise DiagramError("Cartan matrix must be square")
            if self.a[i][i] != 2:
                raise DiagramError("diagonal entries must be 2")
            for j in range(self.n):
                if i != j and self.a[i][j] > 0:
                    raise DiagramError("off-diagonal entries must be <= 0")
                if (self.a[i][j] == 0) != (self.a[j][i] == 0):
                    raise DiagramError("a_ij = 0 iff a_ji = 0")
        computed = symmetrizers(self.a)
        if eps is not None and tuple(eps) != computed:
            raise DiagramError(f"symmetrizers {tuple(eps)} do not match {computed}")
        self.eps = computed
        if not self._finite_type():
            raise DiagramError("Cartan matrix is not of finite type")

    def _finite_type(self) -> bool:
        # leading principal minors of the symmetrized matrix
        b = [[Fraction(self.eps[i] * self.a[i][j]) for j in range(self.n)] for i in range(self.n)]
        for k in range(1, self.n + 1):
            if _det([row[:k] for row in b[:k]]) <= 0:
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, CartanData) and self.a == other.a

    def __hash__(self):
        return hash(self.a)

    def __repr__(self):
        return f"CartanData({[list(r) for r in self.a]})"

    def pair(self, mu, nu) -> int:
        """(mu, nu) = sum mu_i nu_j eps_i a_ij."""
        n = self.n
        return sum(mu[i] * nu[j] * self.eps[i] * self.a[i][j]
                   for i in range(n) if mu[i] for j in range(n) if nu[j])

    def coroot_pair(self, i: int, mu) -> int:
        """<h_i, mu>."""
        return sum(self.a[i][j] * mu[j] for j in range(self.n) if mu[j])

    def reflect(self, i: int, mu):
        c = self.coroot_pair(i, mu)
        if c == 0:
            return tuple(mu)
        mu = list(mu)
        mu[i] -= c
        return tuple(mu)

    def simple(self, i: int):
        return unit(self.n, i)

    def components(self, nodes: Iterable[int] | None = None) -> list[list[int]]:
        nodes = sorted(set(range(self.n) if nodes is None else nodes))
        seen = set()
        out = []
        for s in nodes:
            if s in seen:
                continue
            comp = []
            stack = [s]
            seen.add(s)
            while stack:
                i = stack.pop()
                comp.append(i)
                for j in nodes:
                    if j not in seen and self.a[i][j] != 0:
                        seen.add(j)
                        stack.append(j)
            out.append(sorted(comp))
        return out

    @cached_property
    def roots(self) -> "RootSystem":
        return RootSystem(self)


def _det(m) -> Fraction:
    m = [list(map(Fraction, row)) for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


# -------------------------------------------------------------- root system

class RootSystem:
    def __init__(self, cartan: CartanData):
        self.cartan = cartan
        n = cartan.n
        found = {unit(n, i) for i in range(n)}
        frontier = list(found)
        while frontier:
            new = []
            for beta in frontier:
                for i in range(n):
                    g = cartan.reflect(i, beta)
                    if is_positive(g) and g not in found:
                        found.add(g)
                        new.append(g)
            frontier = new
        self.positive = sorted(found, key=lambda r: (sum(r), tuple(-x for x in r)))
        self.index = {r: k for k, r in enumerate(self.positive)}

    def is_root(self, mu) -> bool:
        mu = tuple(mu)
        return mu in self.index or tuple(-x for x in mu) in self.index

    def coroot_pair(self, gamma, mu) -> Fraction:
        """<gamma^vee, mu> = 2 (gamma, mu) / (gamma, gamma)."""
        c = self.cartan
        return Fraction(2 * c.pair(gamma, mu), c.pair(gamma, gamma))


def positive_roots(cartan: CartanData) -> list:
    return list(cartan.roots.positive)


def kostant_count(cartan: CartanData, mu, roots: Sequence | None = None) -> int:
    """Number of ways to write mu as an N-combination of positive roots."""
    roots = tuple(cartan.roots.positive if roots is None else roots)
    return _kostant(roots, tuple(mu))


@lru_cache(maxsize=None)
def _kostant(roots: tuple, mu: tuple) -> int:
    if not any(mu):
        return 1
    if not roots:
        return 0
    r = roots[-1]
    rest = roots[:-1]
    total = 0
    cur = mu
    while all(x >= 0 for x in cur):
        total += _kostant(rest, cur)
        cur = sub(cur, r)
    return total


# --------------------------------------------------------------- Weyl group

class WeylElement:
    """w stored through the images of the simple roots."""

    __slots__ = ("cartan", "cols", "_hash")

    def __init__(self, cartan: CartanData, cols):
        self.cartan = cartan
        self.cols = tuple(tuple(c) for c in cols)
        self._hash = hash(self.cols)

    @classmethod
    def identity(cls, cartan):
        return cls(cartan, [unit(cartan.n, i) for i in range(cartan.n)])

    @classmethod
    def from_word(cls, cartan, word):
        w = cls.identity(cartan)
        for i in word:
            w = w.rmul(i)
        return w

    def __call__(self, mu):
        n = self.cartan.n
        out = [0] * n
        for j, m in enumerate(mu):
            if m:
                col = self.cols[j]
                for k in range(n):
                    out[k] += m * col[k]
        return tuple(out)

    def rmul(self, i: int) -> "WeylElement":
        """w s_i."""
        c = self.cartan
        cols = list(self.cols)
        img = self(c.reflect(i, unit(c.n, i)))
        cols[i] = img
        # columns j != i: w(s_i alpha_j) = w(alpha_j) - a_ij w(alpha_i)
        wi = self.cols[i]
        for j in range(c.n):
            if j != i and c.a[i][j]:
                cols[j] = sub(self.cols[j], scale(c.a[i][j], wi))
        return WeylElement(c, cols)

    def lmul(self, i: int) -> "WeylElement":
        """s_i w."""
        c = self.cartan
        return WeylElement(c, [c.reflect(i, col) for col in self.cols])

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(self.cartan, [self(col) for col in other.cols])

    def inverse(self) -> "WeylElement":
        w = WeylElement.identity(self.cartan)
        for i in reversed(self.word()):
            w = w.rmul(i)
        return w

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.cols == other.cols

    def __hash__(self):
        return self._hash

    def is_identity(self) -> bool:
        return all(col == unit(self.cartan.n, i) for i, col in enumerate(self.cols))

    def length(self) -> int:
        return sum(1 for r in self.cartan.roots.positive if is_negative(self(r)))

    def left_descent(self, i: int) -> bool:
        """l(s_i w) < l(w), i.e. w^{-1}(alpha_i) < 0."""
        return self.inverse_apply_negative(i)

    def inverse_apply_negative(self, i: int) -> bool:
        # w^{-1}(alpha_i) < 0  iff  alpha_i in w(R^-)  iff some positive root maps to -alpha_i
        target = tuple(-x for x in unit(self.cartan.n, i))
        return any(self(r) == target for r in self.cartan.roots.positive)

    def right_descent(self, i: int) -> bool:
        return is_negative(self.cols[i])

    def word(self) -> tuple:
        """Lexicographically least reduced word (greedy on right descents from the left end)."""
        return _canonical_word(self)

    def __repr__(self):
        return "WeylElement(" + "".join(str(i + 1) for i in self.word()) + ")"


def _canonical_word(w: WeylElement) -> tuple:
    # the lex-least reduced word is obtained greedily: take the smallest left descent
    word = []
    cur = w
    n = w.cartan.n
    while not cur.is_identity():
        inv = _inverse_cols(cur)
        for i in range(n):
            if is_negative(inv[i]):
                word.append(i)
                cur = cur.lmul(i)
                break
        else:  # pragma: no cover
            raise AssertionError("no descent for non-identity element")
    return tuple(word)


def _inverse_cols(w: WeylElement):
    """Images of simple roots under w^{-1}, via the pairing invariance."""
    c = w.cartan
    n = c.n
    # w orthogonal for the symmetric form: (w^{-1} a_i, a_j) = (a_i, w a_j)
    out = []
    for i in range(n):
        ai = unit(n, i)
        # solve (x, alpha_j) = (alpha_i, w alpha_j) for all j
        rhs = [c.pair(ai, w.cols[j]) for j in range(n)]
        out.append(_solve_form(c, rhs))
    return out


@lru_cache(maxsize=None)
def _form_inverse(cartan: CartanData):
    n = cartan.n
    m = [[Fraction(cartan.pair(unit(n, i), unit(n, j))) for j in range(n)] for i in range(n)]
    return _inverse(m)


def _solve_form(cartan, rhs):
    inv = _form_inverse(cartan)
    n = cartan.n
    x = [sum(inv[i][j] * rhs[j] for j in range(n)) for i in range(n)]
    return tuple(int(v) for v in x)


def _inverse(m):
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def apply_word(cartan: CartanData, word, mu):
    """s_{w1} ... s_{wk} (mu)."""
    for i in reversed(word):
        mu = cartan.reflect(i, mu)
    return tuple(mu)


def word_length(cartan: CartanData, word) -> int:
    return WeylElement.from_word(cartan, word).length()


def is_reduced(cartan: CartanData, word) -> bool:
    return word_length(cartan, word) == len(word)


def longest_element(cartan: CartanData, subset: Iterable[int] | None = None) -> WeylElement:
    subset = sorted(set(range(cartan.n) if subset is None else subset))
    w = WeylElement.identity(cartan)
    changed = True
    while changed:
        changed = False
        for i in subset:
            if not w.right_descent(i):
                w = w.rmul(i)
                changed = True
    return w


def longest_word(cartan: CartanData, subset: Iterable[int] | None = None) -> tuple:
    return longest_element(cartan, subset).word()


def inversion_set(cartan: CartanData, word) -> list:
    """beta_k = s_{i1} ... s_{i(k-1)}(alpha_{ik})."""
    word = tuple(word)
    if not is_reduced(cartan, word):
        raise DiagramError(f"word {_fmt_word(word)} is not reduced")
    return [apply_word(cartan, word[:k], unit(cartan.n, word[k])) for k in range(len(word))]


def braid_order(cartan: CartanData, u, v) -> int:
    x = WeylElement.from_word(cartan, tuple(u) + tuple(v))
    p = x
    k = 1
    while not p.is_identity():
        p = p * x
        k += 1
        if k > 1000:  # pragma: no cover
            raise DiagramError("order too large")
    return k


def _fmt_word(word) -> str:
    return "s_" + ",".join(str(i + 1) for i in word) if word else "e"


# ------------------------------------------------------------ integer kernel

def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> list:
    """Z-basis of {x in Z^n : rows . x = 0}, via unimodular column reduction."""
    m = [list(r) for r in rows]
    u = [[int(i == j) for j in range(n)] for i in range(n)]  # columns are basis vectors
    col = 0
    for r in range(len(m)):
        if col >= n:
            break
        while True:
            nz = [c for c in range(col, n) if m[r][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda c: abs(m[r][c]))
            _swap_cols(m, u, col, p)
            done = True
            for c in range(col + 1, n):
                if m[r][c]:
                    f = m[r][c] // m[r][col]
                    _addmul_col(m, u, c, col, -f)
                    if m[r][c]:
                        done = False
            if done:
                col += 1
                break
    basis = []
    for c in range(n):
        if all(m[r][c] == 0 for r in range(len(m))):
            basis.append(tuple(u[k][c] for k in range(n)))
    return basis


def _swap_cols(m, u, a, b):
    if a == b:
        return
    for row in m:
        row[a], row[b] = row[b], row[a]
    for row in u:
        row[a], row[b] = row[b], row[a]


def _addmul_col(m, u, target, src, f):
    for row in m:
        row[target] += f * row[src]
    for row in u:
        row[target] += f * row[src]


# ---------------------------------------------------------- Satake diagrams

class SatakeDiagram:
    """Cartan data with black nodes, an involution tau and signs c_i."""

    def __init__(self, cartan: CartanData, black: Iterable[int] = (), tau=None,
                 c: dict | None = None, reps: Iterable[int] | None = None,
                 name: str | None = None, w0circ: Sequence[int] | None = None,
                 check: bool = True):
        self.cartan = cartan
        n = cartan.n
        self.n = n
        self.black = frozenset(black)
        self.white = tuple(i for i in range(n) if i not in self.black)
        if tau is None:
            tau = tuple(range(n))
        self.tau = tuple(tau)
        self.name = name
        if check:
            self._validate()
        else:
            self._derive()
        if reps is None:
            reps = sorted({min(i, self.tau[i]) for i in self.white})
        self.reps = tuple(sorted(reps))
        if sorted({min(i, self.tau[i]) for i in self.white}) != sorted(
                {min(i, self.tau[i]) for i in self.reps}) or len(self.reps) != len(
                {frozenset((i, self.tau[i])) for i in self.white}):
            raise DiagramError("orbit representatives must pick one node per white tau-orbit")
        self.c = self._signs(c or {})
        self._w0circ = tuple(w0circ) if w0circ is not None else None

    # derived data
    def _derive(self):
        c = self.cartan
        self.w_black = longest_element(c, self.black)
        self.w_black_word = self.w_black.word()
        rs = c.roots
        self.black_roots = [r for r in rs.positive if all(r[k] == 0 for k in range(self.n) if k not in self.black)]
        # <2 rho_black^vee, alpha_j>
        self.two_rho_pair = tuple(sum(rs.coroot_pair(g, unit(self.n, j)) for g in self.black_roots)
                                  for j in range(self.n))

    def _validate(self):
        c = self.cartan
        n = self.n
        t = self.tau
        if sorted(t) != list(range(n)) or any(t[t[i]] != i for i in range(n)):
            raise DiagramError("tau must be an involution of the nodes")
        for i in range(n):
            for j in range(n):
                if c.a[i][j] != c.a[t[i]][t[j]]:
                    raise DiagramError("tau must be a diagram automorphism")
        if {t[i] for i in self.black} != set(self.black):
            raise DiagramError("tau must preserve the black nodes")
        self._derive()
        for j in self.black:
            if self.w_black(unit(n, j)) != scale(-1, unit(n, t[j])):
                raise DiagramError(f"condition w_black(alpha_{j + 1}) = -alpha_tau fails")
        for j in self.white:
            if t[j] == j:
                v = self.two_rho_pair[j]
                if v.denominator != 1 or int(v) % 2 != 0:
                    raise DiagramError(f"<rho_black^vee, alpha_{j + 1}> is not an integer")

    def _signs(self, overrides: dict) -> dict:
        sg = {}
        for i in self.white:
            if i in overrides:
                sg[i] = overrides[i]
        for i in self.white:
            if i in sg:
                continue
            ti = self.tau[i]
            parity = int(self.two_rho_pair[i]) % 2
            if ti in sg:
                sg[i] = sg[ti] * (-1) ** parity
            else:
                sg[i] = -1
        for i in self.white:
            ti = self.tau[i]
            if sg[i] not in (1, -1):
                raise DiagramError("c_i must be +1 or -1")
            if sg[i] * sg[ti] != (-1) ** (int(self.two_rho_pair[i]) % 2):
                raise DiagramError(f"c_{i + 1} c_tau does not match (-1)^<2rho^vee, alpha_i>")
            if self.cartan.coroot_pair(i, self.theta(unit(self.n, i))) == 0 and sg[i] != sg[ti]:
                raise DiagramError(f"c_{i + 1} must equal c_tau{i + 1}")
        return sg

    def __repr__(self):
        return f"SatakeDiagram({self.name or ''})"

    @property
    def label(self) -> str:
        return self.name or "custom"

    def is_quasi_split(self) -> bool:
        return not self.black

    def theta(self, mu):
        """theta = -w_black o tau."""
        tmu = [0] * self.n
        for i, m in enumerate(mu):
            tmu[self.tau[i]] += m
        return scale(-1, self.w_black(tuple(tmu)))

    def tau_weight(self, mu):
        out = [0] * self.n
        for i, m in enumerate(mu):
            out[self.tau[i]] += m
        return tuple(out)

    @cached_property
    def y_iota_basis(self) -> list:
        n = self.n
        cols = [self.theta(unit(n, j)) for j in range(n)]
        rows = [[cols[j][i] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
        basis = integer_kernel(rows, n)
        return _hermite_rows(basis)

    @cached_property
    def _split_inverse(self):
        """Inverse of the matrix whose columns are Y^i basis then alpha_i (i in reps)."""
        n = self.n
        cols = list(self.y_iota_basis) + [unit(n, i) for i in self.reps]
        if len(cols) != n:
            raise DiagramError("Y^i and the representative roots do not span the root lattice")
        m = [[Fraction(cols[j][i]) for j in range(n)] for i in range(n)]
        d = _det(m)
        if abs(d) != 1:
            raise DiagramError("Y^i + span(alpha_i, i in reps) is not unimodular")
        return _inverse(m)

    def split_weight(self, mu):
        """mu = mu_iota + mu_c; returns (coordinates in the Y^i basis, mu_iota, mu_c)."""
        inv = self._split_inverse
        n = self.n
        x = [sum(inv[i][j] * mu[j] for j in range(n)) for i in range(n)]
        r = len(self.y_iota_basis)
        yc = tuple(int(v) for v in x[:r])
        mu_i = tuple(sum(yc[k] * self.y_iota_basis[k][i] for k in range(r)) for i in range(n))
        return yc, mu_i, sub(tuple(mu), mu_i)

    def in_y_iota(self, mu) -> bool:
        return self.theta(mu) == tuple(mu)

    # relative Weyl group
    @lru_cache(maxsize=None)
    def w_black_i(self, i: int) -> WeylElement:
        return longest_element(self.cartan, set(self.black) | {i, self.tau[i]})

    @lru_cache(maxsize=None)
    def bs(self, i: int) -> WeylElement:
        return self.w_black_i(i) * self.w_black

    @lru_cache(maxsize=None)
    def tau_i(self, i: int) -> dict:
        """The involution tau_i of I_{black,i} with w_{black,i}(alpha_j) = -alpha_{tau_i j}."""
        w = self.w_black_i(i)
        out = {}
        for j in sorted(set(self.black) | {i, self.tau[i]}):
            img = scale(-1, w(unit(self.n, j)))
            k = img.index(1)
            out[j] = k
        return out

    def relative_generator(self, i: int):
        if i in self.black:
            raise DiagramError("relative generators are attached to white nodes")
        return self.bs(i).word(), self.tau_i(i)

    def rep_of(self, i: int) -> int:
        return i if i in self.reps else self.tau[i]

    def bs_word(self, i: int) -> tuple:
        """Reduced word of bs_i, taken from the local rank-one template when one matches."""
        from .localtypes import local_rank1
        loc = local_rank1(self, i)
        return loc.bs_word if loc is not None else self.bs(i).word()

    @cached_property
    def w0(self) -> WeylElement:
        return longest_element(self.cartan)

    @cached_property
    def w0circ(self) -> WeylElement:
        return self.w0 * self.w_black

    def relative_length(self, word) -> int:
        return sum(self.bs(i).length() for i in word)

    def relative_element(self, word) -> WeylElement:
        w = WeylElement.identity(self.cartan)
        for i in word:
            w = w * self.bs(i)
        return w

    @cached_property
    def w0circ_word(self) -> tuple:
        """Reduced word of w0circ in the bs_i (preset choice or lex-least)."""
        if self._w0circ is not None:
            word = self._w0circ
            if self.relative_element(word) != self.w0circ or \
                    self.relative_length(word) != self.w0circ.length():
                raise DiagramError("given w0circ word is not a reduced word of w0circ")
            return word
        word = []
        cur = self.w0circ
        while not cur.is_identity():
            for i in self.reps:
                nxt = self.bs(i) * cur
                if nxt.length() == cur.length() - self.bs(i).length():
                    word.append(i)
                    cur = nxt
                    break
            else:  # pragma: no cover
                raise DiagramError("failed to factor w0circ")
        return tuple(word)

    def refined_word(self, w0circ_word=None) -> tuple:
        word = self.w0circ_word if w0circ_word is None else w0circ_word
        out = []
        for i in word:
            out.extend(self.bs_word(i))
        return tuple(out)

    def braid_order_relative(self, i: int, j: int) -> int:
        return braid_order(self.cartan, self.bs(i).word(), self.bs(j).word())

    def real_rank(self) -> int:
        return len(self.reps)


def _hermite_rows(basis):
    """Deterministic echelon form of a lattice basis (row style, positive pivots)."""
    rows = [list(b) for b in basis]
    if not rows:
        return []
    n = len(rows[0])
    out = []
    col = 0
    while rows and col < n:
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len([r for r in rows if r[col] != 0]) > 1:
            nz = sorted([r for r in rows if r[col] != 0], key=lambda r: abs(r[col]))
            p = nz[0]
            for r in nz[1:]:
                f = r[col] // p[col]
                for k in range(n):
                    r[k] -= f * p[k]
        p = next(r for r in rows if r[col] != 0)
        if p[col] < 0:
            p[:] = [-x for x in p]
        rows.remove(p)
        out.append(tuple(p))
        col += 1
    return out


# ------------------------------------------------------------------ presets

def _sd(letter, n, black=(), tau=None, name=None, w0circ=None, c=None, one_based=True):
    cm = CartanData(cartan_matrix(letter, n))
    off = 1 if one_based else 0
    black = [b - off for b in black]
    t = list(range(n))
    for a, b in (tau or []):
        t[a - off], t[b - off] = b - off, a - off
    if w0circ is not None:
        w0circ = [x - off for x in w0circ]
    cc = {k - off: v for k, v in (c or {}).items()}
    return SatakeDiagram(cm, black, t, cc, name=name, w0circ=w0circ)


def _flip_pairs(n):
    return [(i, n + 1 - i) for i in range(1, n // 2 + 1)]


def ai_word(n: int) -> list:
    """w0 = eps_1 eps_2 ... with eps_i = s_i ... s_(n+1-i) ... s_i (1-based)."""
    word = []
    for i in range(1, (n + 1) // 2 + 1):
        up = list(range(i, n + 2 - i))
        word.extend(up + up[-2::-1])
    return word


def diagonal(letter: str, n: int, name=None) -> SatakeDiagram:
    m = cartan_matrix(letter, n)
    cm = CartanData(block_diagonal(m, m))
    tau = [i + n for i in range(n)] + [i for i in range(n)]
    return SatakeDiagram(cm, (), tau, name=name or f"diagonal-{letter}{n}")


def family(name: str) -> SatakeDiagram:
    """Table diagrams by family name, e.g. AIV3, BII2, CII4, DIII5, EIII."""
    import re
    name = name.strip()
    m = re.fullmatch(r"diagonal-([A-G])(\d+)", name)
    if m:
        return diagonal(m.group(1), int(m.group(2)), name=name)
    if name == "G2-split" or name == "G2":
        return _sd("G", 2, name=name, w0circ=[1, 2, 1, 2, 1, 2])
    if name == "EIII":
        return _sd("E", 6, black=[2, 3, 4], tau=[(1, 5), (2, 4)], name=name)
    if name == "EIV":
        return _sd("E", 6, black=[2, 3, 4, 6], name=name)
    if name == "FII":
        return _sd("F", 4, black=[1, 2, 3], name=name)
    if name == "AIII11":
        return diagonal("A", 1, name=name)
    if name == "AII3":
        return _sd("A", 3, black=[1, 3], name=name)
    m = re.fullmatch(r"(AIV|AIII|AII|AI|BII|BI|CII|CI|DIII|DII|DI)(\d+)", name)
    if not m:
        raise DiagramError(f"unknown preset {name!r}")
    fam, n = m.group(1), int(m.group(2))
    if fam == "AI":
        return _sd("A", n, name=name, w0circ=ai_word(n))
    if fam == "AII":
        if n % 2 == 0:
            raise DiagramError("AII_n needs n odd")
        return _sd("A", n, black=range(1, n + 1, 2), name=name)
    if fam == "AIII":
        if n == 3:
            return _sd("A", 3, tau=[(1, 3)], name=name, w0circ=[1, 2, 1, 2])
        return _sd("A", n, black=range(3, n - 1), tau=_flip_pairs(n), name=name)
    if fam == "AIV":
        return _sd("A", n, black=range(2, n), tau=_flip_pairs(n), name=name)
    if fam == "BI":
        return _sd("B", n, black=range(3, n + 1), name=name)
    if fam == "BII":
        return _sd("B", n, black=range(2, n + 1), name=name)
    if fam == "CI":
        return _sd("C", n, name=name, w0circ=[1, 2, 1, 2] if n == 2 else None)
    if fam == "CII":
        if n == 3:
            return _sd("C", 3, black=[1, 3], name=name)
        return _sd("C", n, black=[1, 3] + list(range(5, n + 1)), name=name)
    if fam == "DI":
        return _sd("D", n, black=range(3, n + 1), tau=[(n - 1, n)] if n % 2 else None, name=name)
    if fam == "DII":
        # w_black is -1 on D_(n-1) only for n odd, so tau swaps the fork ends for n even
        return _sd("D", n, black=range(2, n + 1), tau=[(n - 1, n)] if n % 2 == 0 else None, name=name)
    if fam == "DIII":
        if n == 4:
            return _sd("D", 4, black=[3, 4], name=name)
        if n == 5:
            return _sd("D", 5, black=[1, 3], tau=[(4, 5)], name=name)
    raise DiagramError(f"unknown preset {name!r}")


PRESETS = ("AI1", "AI2", "AI3", "AII3", "AIII11", "AIII3", "AIV2", "BII2", "CI2", "CII3",
           "DII4", "FII", "G2-split", "diagonal-A1", "diagonal-A2")


@lru_cache(maxsize=None)
def preset(name: str) -> SatakeDiagram:
    return family(name)


# ------------------------------------------------------------- config files

def load_config(path) -> SatakeDiagram:
    """Read a diagram from a YAML file (node numbers are 1-based).

    Keys: type (e.g. "A3") or cartan (matrix), black, tau (list of pairs),
    c (map node -> sign), representatives, w0circ, name.
    """
    import yaml
    with open(path) as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise DiagramError(f"cannot parse {path}: {exc}") from None
    return diagram_from_dict(doc, default_name=str(path))


def diagram_from_dict(doc, default_name: str = "custom") -> SatakeDiagram:
    import re
    if not isinstance(doc, dict):
        raise DiagramError("config must be a mapping")
    known = {"type", "cartan", "black", "tau", "c", "representatives", "w0circ", "name", "eps"}
    extra = set(doc) - known
    if extra:
        raise DiagramError(f"unknown config keys: {sorted(extra)}")
    if ("type" in doc) == ("cartan" in doc):
        raise DiagramError("give exactly one of 'type' or 'cartan'")
    if "type" in doc:
        parts = str(doc["type"]).replace(" ", "").split("+")
        mats = []
        for p in parts:
            m = re.fullmatch(r"([A-Ga-g])_?(\d+)", p)
            if not m:
                raise DiagramError(f"bad type {p!r}")
            mats.append(cartan_matrix(m.group(1), int(m.group(2))))
        matrix = block_diagonal(*mats)
    else:
        matrix = doc["cartan"]
    cm = CartanData(matrix, doc.get("eps"))
    n = cm.n

    def node(x):
        x = int(x)
        if not 1 <= x <= n:
            raise DiagramError(f"node {x} out of range 1..{n}")
        return x - 1

    black = [node(x) for x in doc.get("black", []) or []]
    tau = list(range(n))
    for pair in doc.get("tau", []) or []:
        if len(pair) != 2:
            raise DiagramError("tau entries must be pairs")
        a, b = node(pair[0]), node(pair[1])
        tau[a], tau[b] = b, a
    c = {node(k): int(v) for k, v in (doc.get("c") or {}).items()}
    reps = doc.get("representatives")
    reps = [node(x) for x in reps] if reps else None
    w0c = doc.get("w0circ")
    w0c = [node(x) for x in w0c] if w0c else None
    return SatakeDiagram(cm, black, tau, c, reps, name=doc.get("name", default_name), w0circ=w0c)


def resolve_diagram(source: str) -> SatakeDiagram:
    import os
    if os.path.exists(source):
        return load_config(source)
    return preset(source)
