"""Exact arithmetic in Q(i)(v), where v = q^(1/2).

An element is stored as (A + B*i)/D with A, B, D in Q[v], D monic and
gcd(A, B, D) = 1.  Since Q(i)(v) = Q(v) + Q(v)*i this form is canonical,
so equality is equality of the three polynomials.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

import flint

_P = flint.fmpq_poly
_PZERO = _P([])
_PONE = _P([1])


def _poly(x) -> flint.fmpq_poly:
    if isinstance(x, _P):
        return x
    if isinstance(x, Fraction):
        return _P([flint.fmpq(x.numerator, x.denominator)])
    return _P([x])


def _is_zero(p: flint.fmpq_poly) -> bool:
    return p.degree() < 0


class GaussianRational:
    """a + b*i with a, b rational.  Values of scalars at v = 1."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        other = _as_gauss(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_as_gauss(other))

    def __rsub__(self, other):
        return _as_gauss(other) - self

    def __mul__(self, other):
        o = _as_gauss(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_gauss(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero")
        return self * GaussianRational(o.re / n, -o.im / n)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_integer(self) -> bool:
        return self.re.denominator == 1 and self.im.denominator == 1

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return _fmt_imag(self.im)
        sign = "-" if self.im < 0 else "+"
        return f"{self.re}{sign}{_fmt_imag(abs(self.im))}"


def _fmt_imag(x: Fraction) -> str:
    if x == 1:
        return "I"
    if x == -1:
        return "-I"
    return f"{x}*I"


def _as_gauss(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    return GaussianRational(x)


class Scalar:
    __slots__ = ("a", "b", "d", "_hash")

    def __init__(self, a=0, b=0, d=1, _reduced: bool = False):
        a, b, d = _poly(a), _poly(b), _poly(d)
        if not _reduced:
            if _is_zero(d):
                raise ZeroDivisionError("zero denominator")
            if _is_zero(a) and _is_zero(b):
                d = _PONE
            else:
                g = d.gcd(a)
                if not _is_zero(b):
                    g = g.gcd(b)
                if g.degree() > 0:
                    a, b, d = a / g, b / g, d / g
                lc = d.leading_coefficient()
                if lc != 1:
                    a, b, d = a / lc, b / lc, d / lc
        self.a = a
        self.b = b
        self.d = d
        self._hash = None

    # construction helpers
    @staticmethod
    def vpow(k: int) -> "Scalar":
        return _vpow(k)

    @staticmethod
    def qpow(x) -> "Scalar":
        """q^x for x integer or half-integer."""
        k = Fraction(x) * 2
        if k.denominator != 1:
            raise ValueError(f"q^{x} is not a power of v")
        return _vpow(int(k))

    @staticmethod
    def laurent(coeffs: dict) -> "Scalar":
        """Sum of c * v^k over a {k: c} map."""
        if not coeffs:
            return ZERO
        lo = min(coeffs)
        top = max(coeffs) - lo
        cs = [0] * (top + 1)
        for k, c in coeffs.items():
            cs[k - lo] = flint.fmpq(Fraction(c).numerator, Fraction(c).denominator)
        num = _P(cs)
        if lo >= 0:
            return Scalar(num.left_shift(lo) if lo else num, 0, 1)
        return Scalar(num, 0, _P([0] * (-lo) + [1]))

    @property
    def numerator(self):
        return (self.a, self.b)

    @property
    def denominator(self):
        return self.d

    def is_zero(self) -> bool:
        return _is_zero(self.a) and _is_zero(self.b)

    def __bool__(self):
        return not self.is_zero()

    def is_real(self) -> bool:
        return _is_zero(self.b)

    # arithmetic
    def __add__(self, o):
        if not isinstance(o, Scalar):
            o = Scalar(o)
        if self.d == o.d:
            return Scalar(self.a + o.a, self.b + o.b, self.d)
        if o.d.is_one():
            return Scalar(self.a + o.a * self.d, self.b + o.b * self.d, self.d, _reduced=True)
        if self.d.is_one():
            return Scalar(self.a * o.d + o.a, self.b * o.d + o.b, o.d, _reduced=True)
        g = self.d.gcd(o.d)
        if g.is_one():
            return Scalar(self.a * o.d + o.a * self.d, self.b * o.d + o.b * self.d,
                          self.d * o.d, _reduced=True)
        s, t = self.d / g, o.d / g
        return Scalar(self.a * t + o.a * s, self.b * t + o.b * s, self.d * t)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.a, -self.b, self.d, _reduced=True)

    def __sub__(self, o):
        if not isinstance(o, Scalar):
            o = Scalar(o)
        return self + (-o)

    def __rsub__(self, o):
        return Scalar(o) - self

    def __mul__(self, o):
        if not isinstance(o, Scalar):
            if isinstance(o, int):
                if o == 0:
                    return ZERO
                return Scalar(self.a * o, self.b * o, self.d, _reduced=True)
            o = Scalar(o)
        if self.is_zero() or o.is_zero():
            return ZERO
        if _is_zero(self.b) and _is_zero(o.b):
            a, b = self.a * o.a, _PZERO
        else:
            a = self.a * o.a - self.b * o.b
            b = self.a * o.b + self.b * o.a
        if self.d.is_one() and o.d.is_one():
            return Scalar(a, b, _PONE, _reduced=True)
        return Scalar(a, b, self.d * o.d)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        if _is_zero(self.b):
            return Scalar(self.d, 0, self.a)
        n = self.a * self.a + self.b * self.b
        return Scalar(self.d * self.a, -(self.d * self.b), n)

    def __truediv__(self, o):
        if not isinstance(o, Scalar):
            o = Scalar(o)
        return self * o.inverse()

    def __rtruediv__(self, o):
        return Scalar(o) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        r = ONE
        x = self
        while n:
            if n & 1:
                r = r * x
            x = x * x
            n >>= 1
        return r

    def conjugate(self) -> "Scalar":
        return Scalar(self.a, -self.b, self.d, _reduced=True)

    def __eq__(self, o):
        if not isinstance(o, Scalar):
            if isinstance(o, (int, Fraction)):
                o = Scalar(o)
            else:
                return NotImplemented
        return self.a == o.a and self.b == o.b and self.d == o.d

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((str(self.a), str(self.b), str(self.d)))
        return self._hash

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return format_scalar(self)

    def specialize(self) -> GaussianRational:
        """Value at v = 1."""
        return specialize_at_one(self)


def _fmt_poly(p) -> str:
    return p.str(var="v").replace(" ", "")


def format_scalar(f: Scalar) -> str:
    if f.is_zero():
        return "0"
    if _is_zero(f.b):
        num = _fmt_poly(f.a)
    elif _is_zero(f.a):
        num = f"({_fmt_poly(f.b)})*I"
    else:
        num = f"({_fmt_poly(f.a)})+({_fmt_poly(f.b)})*I"
    if f.d.is_one():
        return num
    return f"({num})/({_fmt_poly(f.d)})"


@lru_cache(maxsize=None)
def _vpow(k: int) -> Scalar:
    if k >= 0:
        return Scalar(_P([0] * k + [1]), 0, _PONE, _reduced=True)
    return Scalar(_PONE, 0, _P([0] * (-k) + [1]), _reduced=True)


ZERO = Scalar(_PZERO, _PZERO, _PONE, _reduced=True)
ONE = Scalar(_PONE, _PZERO, _PONE, _reduced=True)
I = Scalar(_PZERO, _PONE, _PONE, _reduced=True)
V = _vpow(1)
Q = _vpow(2)


def scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, GaussianRational):
        return Scalar(_poly(x.re), _poly(x.im), 1)
    return Scalar(x)


@lru_cache(maxsize=None)
def quantum_integer(n: int, eps: int = 1) -> Scalar:
    if eps < 1:
        raise ValueError("eps must be positive")
    if n < 0:
        return -quantum_integer(-n, eps)
    # [n]_{q^eps} = sum_{k=0}^{n-1} q^{eps(n-1-2k)}
    return Scalar.laurent({2 * eps * (n - 1 - 2 * k): 1 for k in range(n)})


@lru_cache(maxsize=None)
def quantum_factorial(n: int, eps: int = 1) -> Scalar:
    r = ONE
    for k in range(1, n + 1):
        r = r * quantum_integer(k, eps)
    return r


@lru_cache(maxsize=None)
def quantum_binomial(n: int, r: int, eps: int = 1) -> Scalar:
    if r < 0 or r > n:
        return ZERO
    return quantum_factorial(n, eps) / (quantum_factorial(r, eps) * quantum_factorial(n - r, eps))


def divide_exact(f: Scalar, g: Scalar) -> Scalar:
    if g.is_zero():
        raise ZeroDivisionError("divide_exact by zero")
    return f / g


class PoleAtOne(ArithmeticError):
    """Raised when a scalar is not finite at v = 1."""


def specialize_at_one(f: Scalar) -> GaussianRational:
    den = f.d(1)
    if den == 0:
        raise PoleAtOne(f"element not semi-classically finite: {f}")
    re = f.a(1) / den
    im = f.b(1) / den
    return GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


# ---------------------------------------------------------------- integrality

def _primitive_int(p: flint.fmpq_poly) -> flint.fmpz_poly:
    """Primitive integer multiple of p with positive leading coefficient."""
    coeffs = [int(x) for x in p.numer().coeffs()]
    g = 0
    for x in coeffs:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero polynomial")
    if coeffs[-1] < 0:
        g = -g
    return flint.fmpz_poly([x // g for x in coeffs])


class IntegralityProfile:
    """Data deciding membership in A' for one diagram."""

    def __init__(self, eps, gaussian: bool = False):
        self.eps = tuple(sorted(set(int(e) for e in eps)))
        self.constant_ring = "Z[i]" if gaussian else "Z"
        self.allows_v_powers = True
        prod = flint.fmpz_poly([1, 0, 1])
        for e in self.eps:
            fac = quantum_factorial(e, 1)
            # clear the v-power from the numerator of [e]!
            num = fac.a
            while num.degree() > 0 and num.coeffs()[0] == 0:
                num = num.right_shift(1)
            prod = prod * _primitive_int(num)
        factors = []
        for f, _ in prod.factor()[1]:
            f = flint.fmpz_poly([int(x) for x in f.coeffs()])
            if int(f.coeffs()[-1]) < 0:
                f = -f
            if f not in factors:
                factors.append(f)
        self.allowed_factors = sorted(factors, key=lambda f: (f.degree(), [int(c) for c in f.coeffs()]))

    def __repr__(self):
        fs = ", ".join(str(f).replace("x", "v") for f in self.allowed_factors)
        return f"IntegralityProfile([{fs}], {self.constant_ring})"

    def _denominator_ok(self, d: flint.fmpq_poly) -> bool:
        z = _primitive_int(d)
        while z.degree() > 0 and int(z.coeffs()[0]) == 0:
            z = flint.fmpz_poly([int(c) for c in z.coeffs()[1:]])
        for f in self.allowed_factors:
            while z.degree() > 0:
                qt, r = divmod(z, f)
                if r != 0:
                    break
                z = qt
        return z.degree() == 0 and abs(int(z.coeffs()[0])) == 1

    def contains(self, f: Scalar) -> bool:
        if f.is_zero():
            return True
        if not self._denominator_ok(f.d):
            return False
        # numerator over the primitive denominator must have integral coefficients
        z = _primitive_int(f.d)
        scale = flint.fmpq_poly([int(c) for c in z.coeffs()]) / f.d
        if scale.degree() != 0:
            raise AssertionError("denominator normalization failed")
        s = scale.coeffs()[0]
        for part in (f.a, f.b):
            for c in (part * s).coeffs():
                if int(c.q) != 1:
                    return False
        if self.constant_ring == "Z" and not _is_zero(f.b):
            return False
        return True


def is_in_A_prime(f: Scalar, profile: IntegralityProfile) -> bool:
    return profile.contains(f)


def has_only_v_power_denominator(f: Scalar) -> bool:
    """True iff f lies in Z[i][v, 1/v], i.e. no localized factors are needed."""
    if f.is_zero():
        return True
    d = f.d
    cs = d.coeffs()
    if any(c != 0 for c in cs[:-1]):
        return False
    return all(int(c.q) == 1 for part in (f.a, f.b) for c in part.coeffs())


def parse_scalar(text: str) -> Scalar:
    """Parse the output of format_scalar (and simple expressions in v, q and I)."""
    import re
    toks = re.findall(r"\d+|[vqI]|[+\-*/^()]", text.replace(" ", ""))
    if "".join(toks) != text.replace(" ", ""):
        raise ValueError(f"cannot parse scalar {text!r}")
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take():
        nonlocal pos
        pos += 1
        return toks[pos - 1]

    def atom():
        t = take()
        if t == "(":
            x = expr()
            if take() != ")":
                raise ValueError("missing ')'")
            return x
        if t == "-":
            return -power()
        if t == "v":
            return V
        if t == "q":
            return Q
        if t == "I":
            return I
        if t.isdigit():
            return Scalar(int(t))
        raise ValueError(f"unexpected token {t!r}")

    def power():
        x = atom()
        if peek() == "^":
            take()
            sign = 1
            if peek() == "-":
                take()
                sign = -1
            x = x ** (sign * int(take()))
        return x

    def term():
        x = power()
        while peek() in ("*", "/"):
            op = take()
            y = power()
            x = x * y if op == "*" else x / y
        return x

    def expr():
        x = term()
        while peek() in ("+", "-"):
            op = take()
            y = term()
            x = x + y if op == "+" else x - y
        return x

    out = expr()
    if pos != len(toks):
        raise ValueError(f"trailing input in scalar {text!r}")
    return out
