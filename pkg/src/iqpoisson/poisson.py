"""Semi-classical limit of U^i: polynomial Poisson algebras and braid actions.

The classical generators are the limits of the IPBW generators: one b per
i-root vector, f and e per black positive root, and k per basis vector of
Y^i (Laurent).  Brackets of generators are computed in U as
(xy - yx) / (2(v - 1)), expanded in the IPBW basis and specialized at v = 1;
everything else follows by the Leibniz rule.
"""
from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .iqg import (Gen, IExpr, Tor, eval_U, integrality_certificate, ipbw_basis,
                  ipbw_coordinates, relative_T, twist)
from .rootdata import DiagramError, SatakeDiagram
from .scalarfield import GaussianRational, ONE, V, specialize_at_one


# ------------------------------------------------------------------ polynomials

class PoissonElement:
    """Laurent polynomial over Q(i) in named commuting generators."""

    __slots__ = ("names", "terms")

    def __init__(self, names: tuple, terms: dict | None = None):
        self.names = tuple(names)
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    # construction
    @classmethod
    def zero(cls, names):
        return cls(names)

    @classmethod
    def const(cls, names, c):
        c = _gauss(c)
        return cls(names, {(0,) * len(names): c} if c else {})

    @classmethod
    def gen(cls, names, name: str, power: int = 1):
        e = [0] * len(names)
        e[list(names).index(name)] = power
        return cls(names, {tuple(e): GaussianRational(1)})

    # arithmetic
    def _like(self, other):
        if isinstance(other, PoissonElement):
            if other.names != self.names:
                raise ValueError("elements of different polynomial rings")
            return other
        return PoissonElement.const(self.names, other)

    def __add__(self, other):
        other = self._like(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, GaussianRational(0)) + c
        return PoissonElement(self.names, out)

    __radd__ = __add__

    def __neg__(self):
        return PoissonElement(self.names, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._like(other))

    def __rsub__(self, other):
        return self._like(other) - self

    def __mul__(self, other):
        other = self._like(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, GaussianRational(0)) + c1 * c2
        return PoissonElement(self.names, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials are invertible")
            (m, c), = self.terms.items()
            inv = PoissonElement(self.names, {tuple(-x for x in m): GaussianRational(1) / c})
            return inv ** (-n)
        out = PoissonElement.const(self.names, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, PoissonElement):
            try:
                other = self._like(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.names == other.names and self.terms == other.terms

    def __hash__(self):
        return hash((self.names, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def derivative(self, k: int) -> "PoissonElement":
        out = {}
        for m, c in self.terms.items():
            if m[k]:
                e = list(m)
                e[k] -= 1
                out[tuple(e)] = c * m[k]
        return PoissonElement(self.names, out)

    def degree(self) -> int:
        return max((sum(abs(x) for x in m) for m in self.terms), default=0)

    def is_integral(self) -> bool:
        return all(c.is_integer() for c in self.terms.values())

    def substitute(self, images: dict) -> "PoissonElement":
        """Replace every generator by images[name] (monomial images when exponents are negative)."""
        names = None
        out = None
        for m, c in self.terms.items():
            term = None
            for k, e in enumerate(m):
                if not e:
                    continue
                img = images[self.names[k]] ** e
                term = img if term is None else term * img
            if term is None:
                if names is None:
                    names = next(iter(images.values())).names
                term = PoissonElement.const(names, 1)
            term = term * c
            out = term if out is None else out + term
        if out is None:
            names = next(iter(images.values())).names
            return PoissonElement.zero(names)
        return out

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda mc: _monomial_key(mc[0]))

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"PoissonElement({self})"


def _gauss(c) -> GaussianRational:
    return c if isinstance(c, GaussianRational) else GaussianRational(Fraction(c))


def _monomial_key(m):
    return (-sum(abs(x) for x in m), tuple(-x for x in m))


def _fmt_coeff(c: GaussianRational) -> str:
    s = str(c)
    return f"({s})" if c.re and c.im else s


def format_poly(p: PoissonElement) -> str:
    if not p.terms:
        return "0"
    parts = []
    for m, c in p.sorted_terms():
        factors = []
        for k, e in enumerate(m):
            if e == 1:
                factors.append(p.names[k])
            elif e:
                factors.append(f"{p.names[k]}^{e}")
        neg = not c.im and c.re < 0
        mag = -c if neg else c
        body = "*".join(factors)
        if not body:
            text = _fmt_coeff(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{_fmt_coeff(mag)}*{body}"
        parts.append(("-" if neg else "+", text))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, text in parts[1:]:
        out += f" {sign} {text}"
    return out


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^()/]))")


def parse_poly(text: str, names) -> PoissonElement:
    """Parse e.g. "2*b12*(k + k^-1 - 1) - b1^2*b3" over the given generator names."""
    names = tuple(names)
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
        toks.append(m.group(1) or m.group(2) or ("^" if m.group(3) == "**" else m.group(3)))
        pos = m.end()
    toks.append(None)
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        i += 1
        return toks[i - 1]

    def atom():
        t = take()
        if t == "(":
            v = expr()
            if take() != ")":
                raise ValueError("unbalanced parentheses")
            return v
        if t == "-":
            return -power()
        if t is not None and t.isdigit():
            return PoissonElement.const(names, int(t))
        if t in names:
            return PoissonElement.gen(names, t)
        raise ValueError(f"unknown symbol {t!r}")

    def power():
        b = atom()
        if peek() == "^":
            take()
            sign = 1
            if peek() == "-":
                take()
                sign = -1
            e = take()
            if e == "(":
                if peek() == "-":
                    take()
                    sign = -sign
                e = take()
                take()
            b = b ** (sign * int(e))
        return b

    def term():
        v = power()
        while peek() in ("*", "/"):
            op = take()
            rhs = power()
            if op == "*":
                v = v * rhs
            else:
                (m, c), = rhs.terms.items()
                if any(m):
                    raise ValueError("division by non-constants is not supported")
                v = v * (GaussianRational(1) / c)
        return v

    def expr():
        if peek() == "-":
            take()
            v = -term()
        else:
            if peek() == "+":
                take()
            v = term()
        while peek() in ("+", "-"):
            op = take()
            rhs = term()
            v = v + rhs if op == "+" else v - rhs
        return v

    out = expr()
    if peek() is not None:
        raise ValueError(f"trailing input in {text!r}")
    return out


# ------------------------------------------------------------------ generators

# names following the worked examples; roots in the order of the default relative word
TABLE_NAMES = {
    "AI2": ["b1", "b12", "b2"],
    "CI2": ["b1", "b12", "b121", "b2"],
    "AIII3": ["b1", "b3", "b132", "b23", "b12", "b2"],
    "AIV2": ["b1", "b2", "b3"],
}


def _root_name(prefix, beta):
    if max(beta) < 10:
        return prefix + "".join(str(x) for x in beta)
    return prefix + "_" + "_".join(str(x) for x in beta)


@dataclass
class ClassicalGenerator:
    name: str
    kind: str            # "b", "f", "e" or "k"
    expr: IExpr
    weight: tuple


@dataclass
class PoissonContext:
    """Generators of P together with the IPBW data they come from."""

    sd: SatakeDiagram
    gens: list
    basis: object
    _lock: threading.RLock = field(default_factory=threading.RLock)
    _table: dict = field(default_factory=dict)

    @property
    def names(self) -> tuple:
        return tuple(g.name for g in self.gens)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def gen(self, name: str) -> PoissonElement:
        return PoissonElement.gen(self.names, name)

    def from_ipbw(self, coords: dict) -> PoissonElement:
        """Specialize an IPBW expansion at v = 1."""
        nb = len(self.basis.b_roots)
        nf = len(self.basis.black_roots)
        kdim = len(self.sd.y_iota_basis)
        out: dict = {}
        for mono, c in coords.items():
            yc, mu_i, mu_c = self.sd.split_weight(mono.k_weight)
            if any(mu_c):
                raise ArithmeticError("torus weight outside Y^i in an IPBW monomial")
            e = tuple(mono.b_exponents) + tuple(mono.f_bullet) + tuple(mono.e_bullet) + tuple(yc)
            assert len(e) == nb + 2 * nf + kdim
            val = specialize_at_one(c)
            if val:
                out[e] = out.get(e, GaussianRational(0)) + val
        return PoissonElement(self.names, out)

    def classical(self, x) -> PoissonElement:
        """Limit at v = 1 of an integral element of U^i."""
        u = eval_U(x, self.sd) if isinstance(x, IExpr) else x
        return self.from_ipbw(ipbw_coordinates(u, self.basis))


@lru_cache(maxsize=None)
def poisson_context(sd: SatakeDiagram, w0circ_word=None) -> PoissonContext:
    basis = ipbw_basis(sd, w0circ_word)
    names = TABLE_NAMES.get(sd.name) if w0circ_word is None else None
    gens = []
    for k, v in enumerate(basis.vectors):
        nm = names[k] if names else _root_name("b", v.beta)
        gens.append(ClassicalGenerator(nm, "b", v.expr, v.beta))
    for k, beta in enumerate(basis.black_roots):
        gens.append(ClassicalGenerator(_root_name("f", beta), "f", basis.f_black[k], beta))
    for k, beta in enumerate(basis.black_roots):
        gens.append(ClassicalGenerator(_root_name("e", beta), "e", basis.e_black[k], beta))
    ybasis = sd.y_iota_basis
    for k, mu in enumerate(ybasis):
        nm = "k" if len(ybasis) == 1 else f"k{k + 1}"
        gens.append(ClassicalGenerator(nm, "k", Tor(tuple(mu)), tuple(mu)))
    if len(set(g.name for g in gens)) != len(gens):
        raise DiagramError("classical generator names collide")
    return PoissonContext(sd, gens, basis)


# ------------------------------------------------------------------ brackets

class InexactDivision(ArithmeticError):
    pass


def semiclassical_bracket(a, b, ctx: PoissonContext, check_integral: bool = True) -> PoissonElement:
    """{a, b} = ((ab - ba) / (2(v - 1))) at v = 1."""
    sd = ctx.sd
    ua = eval_U(a, sd) if isinstance(a, IExpr) else a
    ub = eval_U(b, sd) if isinstance(b, IExpr) else b
    if check_integral:
        for u in (ua, ub):
            if not integrality_certificate(u, sd).integral:
                raise ArithmeticError("bracket arguments must be integral")
    comm = ua * ub - ub * ua
    coords = ipbw_coordinates(comm, ctx.basis)
    scale = ONE / ((V - ONE) * 2)
    scaled = {m: c * scale for m, c in coords.items()}
    try:
        return ctx.from_ipbw(scaled)
    except ArithmeticError as exc:
        raise InexactDivision(f"commutator is not divisible by 2(v - 1): {exc}") from None


def generator_bracket(ctx: PoissonContext, x: str, y: str) -> PoissonElement:
    key = (x, y)
    got = ctx._table.get(key)
    if got is not None:
        return got
    if x == y:
        val = PoissonElement.zero(ctx.names)
    else:
        other = ctx._table.get((y, x))
        if other is not None:
            val = -other
        else:
            gx = ctx.gens[ctx.index(x)]
            gy = ctx.gens[ctx.index(y)]
            val = semiclassical_bracket(gx.expr, gy.expr, ctx, check_integral=False)
    with ctx._lock:
        ctx._table[key] = val
    return val


def bracket(p: PoissonElement, r: PoissonElement, ctx: PoissonContext) -> PoissonElement:
    """Leibniz extension of the generator table."""
    out = PoissonElement.zero(ctx.names)
    n = len(ctx.names)
    dp = [p.derivative(k) for k in range(n)]
    dr = [r.derivative(k) for k in range(n)]
    for a in range(n):
        if dp[a].is_zero():
            continue
        for b in range(n):
            if dr[b].is_zero() or a == b:
                continue
            out = out + dp[a] * dr[b] * generator_bracket(ctx, ctx.names[a], ctx.names[b])
    return out


@dataclass
class BracketTable:
    names: tuple
    entries: dict        # (x, y) -> PoissonElement for x before y in generator order
    weights: dict

    def get(self, x: str, y: str) -> PoissonElement:
        if x == y:
            return PoissonElement.zero(self.names)
        if (x, y) in self.entries:
            return self.entries[(x, y)]
        return -self.entries[(y, x)]

    def to_text(self) -> str:
        lines = ["generators: " + ", ".join(self.names)]
        for (x, y), v in self.entries.items():
            lines.append(f"{{{x}, {y}}} = {v}")
        return "\n".join(lines) + "\n"

    def to_doc(self) -> dict:
        return {
            "generators": [{"name": n, "weight": list(self.weights[n])} for n in self.names],
            "brackets": [{"pair": [x, y], "value": str(v),
                          "terms": [{"coefficient": str(c), "exponents": list(m)} for m, c in v.sorted_terms()]}
                         for (x, y), v in self.entries.items()],
        }


def bracket_table(sd: SatakeDiagram, w0circ_word=None) -> BracketTable:
    ctx = poisson_context(sd, w0circ_word)
    names = ctx.names
    entries = {}
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            entries[(names[a], names[b])] = generator_bracket(ctx, names[a], names[b])
    return BracketTable(names, entries, {g.name: g.weight for g in ctx.gens})


def jacobi_check(ctx: PoissonContext, x: str, y: str, z: str) -> PoissonElement:
    gx, gy, gz = ctx.gen(x), ctx.gen(y), ctx.gen(z)
    return (bracket(gx, bracket(gy, gz, ctx), ctx) + bracket(gy, bracket(gz, gx, ctx), ctx)
            + bracket(gz, bracket(gx, gy, ctx), ctx))


def jacobi_failures(ctx: PoissonContext) -> list:
    names = ctx.names
    bad = []
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            for c in range(b + 1, len(names)):
                if not jacobi_check(ctx, names[a], names[b], names[c]).is_zero():
                    bad.append((names[a], names[b], names[c]))
    return bad


# ------------------------------------------------------------------ braid actions

def induced_braid_automorphism(sd: SatakeDiagram, i: int, inverse: bool = False,
                               w0circ_word=None) -> dict:
    """Images of the classical generators under the limit of T_i^{+-1} (white i) or T_i^{+-1} (black i)."""
    ctx = poisson_context(sd, w0circ_word)
    out = {}
    for g in ctx.gens:
        if g.kind == "k":
            mu = sd.bs(sd.rep_of(i))(g.weight) if i not in sd.black else sd.cartan.reflect(i, g.weight)
            yc, _, mu_c = sd.split_weight(mu)
            if any(mu_c):
                raise ArithmeticError("braid image of a Y^i weight left Y^i")
            img = PoissonElement.const(ctx.names, 1)
            for k, e in enumerate(yc):
                img = img * PoissonElement.gen(ctx.names, f"k{k + 1}" if len(yc) > 1 else "k", e)
            out[g.name] = img
            continue
        if i in sd.black:
            x = twist(((i, -1 if inverse else 1),), g.expr)
        else:
            x = relative_T(sd, i, g.expr, inverse=inverse)
        u = eval_U(x, sd)
        if not integrality_certificate(u, sd).integral:
            raise ArithmeticError(f"braid image of {g.name} is not integral")
        out[g.name] = ctx.classical(u)
    return out


def is_poisson_morphism(sd: SatakeDiagram, images: dict, w0circ_word=None) -> list:
    """Generator pairs where sigma({x, y}) != {sigma x, sigma y}."""
    ctx = poisson_context(sd, w0circ_word)
    bad = []
    names = ctx.names
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            x, y = names[a], names[b]
            lhs = generator_bracket(ctx, x, y).substitute(images)
            rhs = bracket(images[x], images[y], ctx)
            if lhs != rhs:
                bad.append((x, y))
    return bad


def compose(first: dict, second: dict) -> dict:
    """Generator images of second o first."""
    return {k: v.substitute(second) for k, v in first.items()}


def poisson_braid_check(sd: SatakeDiagram, i: int, j: int, w0circ_word=None) -> bool:
    ctx = poisson_context(sd, w0circ_word)
    m = sd.braid_order_relative(i, j)
    si = induced_braid_automorphism(sd, i, w0circ_word=w0circ_word)
    sj = induced_braid_automorphism(sd, j, w0circ_word=w0circ_word)
    ident = {n: ctx.gen(n) for n in ctx.names}

    def word(a, b):
        # sigma_a sigma_b sigma_a ... (m factors); images of x are sigma_a(sigma_b(...(x)))
        cur = ident
        seq = [a if k % 2 == 0 else b for k in range(m)]
        for s in seq:
            # cur = cur o s  (apply s first, then the already composed maps)
            cur = {n: s[n].substitute(cur) for n in ctx.names}
        return cur
    return word(si, sj) == word(sj, si)


# ------------------------------------------------------------------ golden files and cross-checks

def golden_path(name: str):
    from importlib import resources
    return resources.files(__package__).joinpath("golden").joinpath(f"{name}.yaml")


def has_golden(name: str) -> bool:
    return golden_path(name).is_file()


def load_golden(name: str) -> dict:
    import yaml
    return yaml.safe_load(golden_path(name).read_text())


@dataclass
class GoldenEntry:
    pair: tuple
    expected: PoissonElement
    computed: PoissonElement

    @property
    def ok(self) -> bool:
        return self.expected == self.computed


def compare_golden(table: BracketTable, doc: dict) -> list:
    """One GoldenEntry per reference bracket, in file order."""
    if tuple(doc["generators"]) != tuple(table.names) and set(doc["generators"]) != set(table.names):
        raise ValueError("golden generators do not match the computed generators")
    out = []
    for item in doc["brackets"]:
        x, y = item["pair"]
        out.append(GoldenEntry((x, y), parse_poly(str(item["value"]), table.names), table.get(x, y)))
    return out


def direct_bracket_check(ctx: PoissonContext, left, right) -> bool:
    """Compare {prod(left), prod(right)} computed in U with its Leibniz value."""
    from .iqg import iprod

    def lift(names):
        return iprod(*[ctx.gens[ctx.index(n)].expr for n in names])

    def cls(names):
        out = PoissonElement.const(ctx.names, 1)
        for n in names:
            out = out * ctx.gen(n)
        return out
    direct = semiclassical_bracket(lift(left), lift(right), ctx, check_integral=False)
    return direct == bracket(cls(left), cls(right), ctx)


__all__ = [
    "golden_path", "has_golden", "load_golden", "GoldenEntry", "compare_golden", "direct_bracket_check",
    "PoissonElement", "parse_poly", "format_poly", "ClassicalGenerator", "PoissonContext",
    "poisson_context", "semiclassical_bracket", "generator_bracket", "bracket", "BracketTable",
    "bracket_table", "jacobi_check", "jacobi_failures", "induced_braid_automorphism",
    "is_poisson_morphism", "compose", "poisson_braid_check", "TABLE_NAMES", "InexactDivision",
]
