"""Recognition of rank-one and rank-two Satake subdiagrams.

Every template is a small Satake diagram written with 1-based labels as in
the classification tables.  A local subdiagram of a larger diagram is matched
to a template by a Cartan-, colour- and tau-preserving bijection; among all
such bijections the lexicographically least one (in template node order) is
used.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .rootdata import DiagramError, SatakeDiagram, cartan_matrix, block_diagonal


@dataclass(frozen=True)
class Template:
    family: str
    n: int
    a: tuple           # Cartan matrix (0-based)
    black: frozenset   # 0-based
    tau: tuple         # 0-based involution
    key: tuple         # template nodes (0-based) that must map to the prescribed nodes
    bs_word: tuple = ()  # rank-one only, 0-based template letters


@dataclass(frozen=True)
class LocalMatch:
    template: Template
    phi: tuple          # template node -> diagram node
    bs_word: tuple      # transported word (rank one)

    def __call__(self, x: int) -> int:
        return self.phi[x]

    def node(self, label: int) -> int:
        """Diagram node of a 1-based template label."""
        return self.phi[label - 1]

    def word(self, labels) -> tuple:
        return tuple(self.phi[x - 1] for x in labels)

    @property
    def key(self) -> tuple:
        """1-based template labels (i0, j0) of the matched pair."""
        return tuple(k + 1 for k in self.template.key)


def _template(family, letter, n, black=(), tau=(), key=(), bs=(), matrix=None):
    a = matrix if matrix is not None else cartan_matrix(letter, n)
    t = list(range(len(a)))
    for x, y in tau:
        t[x - 1], t[y - 1] = y - 1, x - 1
    return Template(family, len(a), tuple(tuple(r) for r in a), frozenset(b - 1 for b in black),
                    tuple(t), tuple(k - 1 for k in key), tuple(b - 1 for b in bs))


def _flip(n):
    return [(i, n + 1 - i) for i in range(1, n // 2 + 1)]


@lru_cache(maxsize=None)
def rank1_templates(size: int) -> list:
    """Rank-one templates with the given number of nodes."""
    out = []
    if size == 1:
        out.append(_template("AI1", "A", 1, key=(1,), bs=(1,)))
    if size == 2:
        out.append(_template("AIII11", None, 2, tau=[(1, 2)], key=(1,), bs=(1, 2),
                             matrix=block_diagonal(cartan_matrix("A", 1), cartan_matrix("A", 1))))
    if size >= 2:
        n = size
        up = list(range(1, n + 1))
        out.append(_template(f"AIV{n}", "A", n, black=range(2, n), tau=_flip(n), key=(1,),
                             bs=up + up[-2::-1]))
        out.append(_template(f"BII{n}", "B", n, black=range(2, n + 1), key=(1,), bs=up + up[-2::-1]))
    if size == 3:
        out.append(_template("AII3", "A", 3, black=(1, 3), key=(2,), bs=(2, 1, 3, 2)))
    if size >= 3:
        n = size
        mid = list(range(2, n + 1)) + list(range(n - 1, 1, -1))
        out.append(_template(f"CII{n}", "C", n, black=[1] + list(range(3, n + 1)), key=(2,),
                             bs=mid + [1] + mid))
    if size >= 4:
        n = size
        bs = list(range(1, n - 1)) + [n - 1, n] + list(range(n - 2, 0, -1))
        out.append(_template(f"DII{n}", "D", n, black=range(2, n + 1), key=(1,), bs=bs,
                             tau=[(n - 1, n)] if n % 2 == 0 else ()))
    if size == 4:
        out.append(_template("FII", "F", 4, black=(1, 2, 3), key=(4,),
                             bs=(4, 3, 2, 3, 1, 2, 3, 4, 3, 2, 3, 1, 2, 3, 4)))
    return out


@lru_cache(maxsize=None)
def rank2_templates(size: int) -> list:
    """Rank-two templates; key = (i0, j0) for the closed formula T_i0(B_j0)."""
    out = []
    n = size
    if n == 2:
        out.append(_template("AI2", "A", 2, key=(2, 1)))
        out.append(_template("CI2", "C", 2, key=(1, 2)))
        out.append(_template("G2", "G", 2, key=(1, 2)))
    if n >= 3:
        out.append(_template(f"BI{n}", "B", n, black=range(3, n + 1), key=(2, 1)))
        out.append(_template(f"AIII{n}", "A", n, black=range(3, n - 1), tau=_flip(n), key=(2, 1))
                   if n >= 4 else _template("AIII3", "A", 3, tau=[(1, 3)], key=(1, 2)))
    if n >= 4:
        out.append(_template(f"DI{n}", "D", n, black=range(3, n + 1), key=(2, 1),
                             tau=[(n - 1, n)] if n % 2 else ()))
    if n == 4:
        out.append(_template("DIII4", "D", 4, black=(3, 4), key=(2, 1)))
        out.append(_template("CII4", "C", 4, black=(1, 3), key=(2, 4)))
        out.append(_template("CII4", "C", 4, black=(1, 3), key=(4, 2)))
    if n == 5:
        out.append(_template("AII5", "A", 5, black=(1, 3, 5), key=(4, 2)))
        out.append(_template("DIII5", "D", 5, black=(1, 3), tau=[(4, 5)], key=(4, 2)))
    if n >= 5:
        out.append(_template(f"CII{n}", "C", n, black=[1, 3] + list(range(5, n + 1)), key=(4, 2)))
    if n == 6:
        out.append(_template("EIV", "E", 6, black=(2, 3, 4, 6), key=(1, 5)))
        out.append(_template("EIII", "E", 6, black=(2, 3, 4), tau=[(1, 5), (2, 4)], key=(1, 6)))
        out.append(_template("EIII", "E", 6, black=(2, 3, 4), tau=[(1, 5), (2, 4)], key=(6, 1)))
    return out


def _isomorphisms(t: Template, sd: SatakeDiagram, nodes: list, fixed: dict):
    """All bijections template -> nodes preserving Cartan entries, colours and tau, in lex order."""
    a = sd.cartan.a
    nodes = sorted(nodes)
    if len(nodes) != t.n:
        return
    order = list(range(t.n))
    assign: dict = {}
    used: set = set()

    def ok(x, y):
        if (x in t.black) != (y in sd.black):
            return False
        if t.a[x][x] != a[y][y]:
            return False
        for x2, y2 in assign.items():
            if t.a[x][x2] != a[y][y2] or t.a[x2][x] != a[y2][y]:
                return False
        tx = t.tau[x]
        if tx in assign and assign[tx] != sd.tau[y]:
            return False
        if tx == x and sd.tau[y] != y:
            return False
        return True

    def rec(k):
        if k == len(order):
            yield tuple(assign[x] for x in range(t.n))
            return
        x = order[k]
        cands = [fixed[x]] if x in fixed else nodes
        for y in cands:
            if y in used or y not in nodes:
                continue
            if ok(x, y):
                assign[x] = y
                used.add(y)
                yield from rec(k + 1)
                del assign[x]
                used.discard(y)

    yield from rec(0)


def local_nodes(sd: SatakeDiagram, marked) -> list:
    """Union of the components of I_black + marked (tau-closed) that meet the marked nodes."""
    marked = set(marked) | {sd.tau[m] for m in marked}
    comps = sd.cartan.components(set(sd.black) | marked)
    out = []
    for comp in comps:
        if marked & set(comp):
            out.extend(comp)
    return sorted(out)


def local_rank1(sd: SatakeDiagram, i: int) -> LocalMatch | None:
    return _local_rank1(sd, i)


@lru_cache(maxsize=None)
def _local_rank1(sd, i):
    nodes = local_nodes(sd, [i])
    for t in rank1_templates(len(nodes)):
        for phi in _isomorphisms(t, sd, nodes, {t.key[0]: i}):
            return LocalMatch(t, phi, tuple(phi[x] for x in t.bs_word))
    return None


def require_rank1(sd: SatakeDiagram, i: int) -> LocalMatch:
    m = local_rank1(sd, i)
    if m is None:
        raise DiagramError(f"local rank-one diagram at node {i + 1} matches no template")
    return m


def is_commuting_pair(sd: SatakeDiagram, i: int, j: int) -> bool:
    """True when the local diagrams of i and j lie in different components."""
    ni = set(local_nodes(sd, [i]))
    nj = set(local_nodes(sd, [j]))
    if ni & nj:
        return False
    a = sd.cartan.a
    return all(a[x][y] == 0 for x in ni for y in nj)


def local_rank2(sd: SatakeDiagram, i: int, j: int):
    """Match of the rank-two subdiagram of (i, j) with phi(i0) = i and phi(j0) = j."""
    return _local_rank2(sd, i, j)


@lru_cache(maxsize=None)
def _local_rank2(sd, i, j):
    nodes = local_nodes(sd, [i, j])
    for t in rank2_templates(len(nodes)):
        i0, j0 = t.key
        for phi in _isomorphisms(t, sd, nodes, {i0: i, j0: j}):
            return LocalMatch(t, phi, ())
    return None


def is_diagonal_pair(sd: SatakeDiagram, i: int, j: int) -> bool:
    """Rank-two subdiagram of diagonal type: two isomorphic copies swapped by tau, no black nodes."""
    nodes = local_nodes(sd, [i, j])
    if any(x in sd.black for x in nodes):
        return False
    comps = sd.cartan.components(nodes)
    if len(comps) != 2:
        return False
    c1, c2 = comps
    return {sd.tau[x] for x in c1} == set(c2) and len(c1) == 2


def classify_pair(sd: SatakeDiagram, i: int, j: int) -> str:
    if is_commuting_pair(sd, i, j):
        return "commuting"
    if is_diagonal_pair(sd, i, j):
        return "diagonal"
    m = local_rank2(sd, i, j)
    if m is not None:
        return m.template.family
    for jj in {j, sd.tau[j]}:
        m = local_rank2(sd, i, jj)
        if m is not None:
            return m.template.family + "*"
    return "unmatched"
