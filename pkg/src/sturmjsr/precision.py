"""Exact and error-tracked arithmetic, and the rotation-number constants.

Three number types live here:

* ``QuadraticIrrational`` -- exact ``p + q*sqrt(d)`` with rational ``p, q``;
  supports exact floor/ceiling, which is what Sturmian coding needs.
* ``BigReal`` -- an mpmath value with a conservative absolute error radius.
* plain ``fractions.Fraction`` for the rational recursions.

``alpha_star`` and ``alpha_double_star`` evaluate the two explicit inverse
rotation-number constants in log space, since the underlying powers are far
too large to form directly.
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import mpmath

__all__ = [
    "BigReal",
    "ConvergenceError",
    "QuadraticIrrational",
    "alpha_double_star",
    "alpha_star",
    "constant_details",
    "constant_value",
    "ratio_estimate",
    "parse_quadratic",
    "recursion_term",
]

Rational = Union[int, Fraction]

MAX_WORKING_BITS = 2**16


class ConvergenceError(ArithmeticError):
    """Raised when an iteration fails to reach the requested accuracy."""


# ---------------------------------------------------------------------------
# Quadratic irrationals
# ---------------------------------------------------------------------------


def _squarefree_split(d: int) -> tuple[int, int]:
    """Return ``(k, r)`` with ``d == k*k*r`` and ``r`` squarefree."""
    k, r = 1, d
    f = 2
    while f * f <= r:
        while r % (f * f) == 0:
            r //= f * f
            k *= f
        f += 1
    return k, r


class QuadraticIrrational:
    """The exact real number ``p + q*sqrt(d)``.

    ``d`` is kept squarefree; a value with ``q == 0`` is rational and uses
    ``d == 1`` by convention.
    """

    __slots__ = ("p", "q", "d")

    def __init__(self, p: Rational = 0, q: Rational = 0, d: int = 1):
        p, q = Fraction(p), Fraction(q)
        if d < 0:
            raise ValueError("negative radicand")
        if q != 0 and d != 1:
            k, d = _squarefree_split(d)
            q *= k
        if d in (0, 1):
            p, q, d = p + q * d, Fraction(0), 1
        if q == 0:
            d = 1
        self.p, self.q, self.d = p, q, d

    @classmethod
    def from_abcd(cls, a: int, b: int, d: int, c: int) -> "QuadraticIrrational":
        """Build ``(a + b*sqrt(d)) / c``."""
        return cls(Fraction(a, c), Fraction(b, c), d)

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def _common(self, other) -> tuple["QuadraticIrrational", "QuadraticIrrational"]:
        if not isinstance(other, QuadraticIrrational):
            other = QuadraticIrrational(other)
        if self.q and other.q and self.d != other.d:
            raise ValueError(f"incompatible radicands sqrt{self.d} and sqrt{other.d}")
        return self, other

    def _d(self, other: "QuadraticIrrational") -> int:
        return self.d if self.q else other.d

    def __add__(self, other):
        a, b = self._common(other)
        return QuadraticIrrational(a.p + b.p, a.q + b.q, self._d(b))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticIrrational(-self.p, -self.q, self.d)

    def __sub__(self, other):
        return self + (-QuadraticIrrational._coerce(other))

    def __rsub__(self, other):
        return QuadraticIrrational._coerce(other) - self

    def __mul__(self, other):
        a, b = self._common(other)
        d = self._d(b)
        return QuadraticIrrational(a.p * b.p + a.q * b.q * d, a.p * b.q + a.q * b.p, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._common(other)
        d = self._d(b)
        norm = b.p * b.p - b.q * b.q * d
        if norm == 0:
            raise ZeroDivisionError("division by zero")
        conj = QuadraticIrrational(b.p / norm, -b.q / norm, d)
        return a * conj

    def __rtruediv__(self, other):
        return QuadraticIrrational._coerce(other) / self

    @staticmethod
    def _coerce(x) -> "QuadraticIrrational":
        return x if isinstance(x, QuadraticIrrational) else QuadraticIrrational(x)

    def __eq__(self, other):
        try:
            o = QuadraticIrrational._coerce(other)
        except TypeError:
            return NotImplemented
        return (self.p, self.q, self.d) == (o.p, o.q, o.d)

    def __hash__(self):
        return hash((self.p, self.q, self.d))

    def sign(self) -> int:
        """Exact sign of the value."""
        p, q = self.p, self.q
        if q == 0:
            return (p > 0) - (p < 0)
        if p >= 0 and q >= 0:
            return 1
        if p <= 0 and q <= 0:
            return -1
        # opposite signs: compare p^2 with q^2 d
        lhs, rhs = p * p, q * q * self.d
        if p > 0:
            return 1 if lhs > rhs else -1
        return 1 if rhs > lhs else -1

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def floor(self) -> int:
        # (a + b*sqrt d)/c with integer a, b and c > 0
        c = math.lcm(self.p.denominator, self.q.denominator)
        a = self.p.numerator * (c // self.p.denominator)
        b = self.q.numerator * (c // self.q.denominator)
        if b == 0:
            return a // c
        r = math.isqrt(b * b * self.d)
        floor_s = r if b > 0 else -r - 1
        return (a + floor_s) // c

    def __floor__(self) -> int:
        return self.floor()

    def ceil(self) -> int:
        return -((-self).floor())

    def __ceil__(self) -> int:
        return self.ceil()

    def frac(self) -> "QuadraticIrrational":
        return self - self.floor()

    def to_mpf(self, dps: int = 30) -> mpmath.mpf:
        with mpmath.workdps(dps + 5):
            v = mpmath.mpf(self.p.numerator) / self.p.denominator
            if self.q:
                v += mpmath.mpf(self.q.numerator) / self.q.denominator * mpmath.sqrt(self.d)
            return +v

    def __float__(self) -> float:
        return float(self.to_mpf(20))

    def __repr__(self):
        return f"QuadraticIrrational({self})"

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        rad = f"sqrt{self.d}"
        q = self.q
        qs = rad if q == 1 else f"-{rad}" if q == -1 else f"{q}*{rad}"
        if self.p == 0:
            return qs
        return f"{self.p}{'' if qs.startswith('-') else '+'}{qs}"


_SQRT_BARE = re.compile(r"sqrt\s*(\d+)")


def parse_quadratic(text: str) -> QuadraticIrrational:
    """Parse expressions like ``(3-sqrt5)/2``, ``1-sqrt(2)/2`` or ``0.25``.

    Decimal literals are read exactly. Only ``+ - * /``, parentheses,
    integer powers and ``sqrt`` of a non-negative integer are accepted.
    """
    src = _SQRT_BARE.sub(r"sqrt(\1)", text.strip()).replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse number {text!r}") from exc

    def ev(node) -> QuadraticIrrational:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            # re-read the literal text so 0.1 stays exactly 1/10
            lit = ast.get_source_segment(src, node) or repr(node.value)
            return QuadraticIrrational(Fraction(lit))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                base = ev(node.left)
                e = ev(node.right)
                if not e.is_rational or e.p.denominator != 1 or e.p < 0:
                    raise ValueError("only non-negative integer powers are supported")
                out = QuadraticIrrational(1)
                for _ in range(int(e.p)):
                    out = out * base
                return out
            ops = {ast.Add: "__add__", ast.Sub: "__sub__", ast.Mult: "__mul__", ast.Div: "__truediv__"}
            name = ops.get(type(node.op))
            if name is None:
                raise ValueError(f"unsupported operator in {text!r}")
            return getattr(ev(node.left), name)(ev(node.right))
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id == "sqrt"
            and len(node.args) == 1
        ):
            arg = ev(node.args[0])
            if not arg.is_rational or arg.p.denominator != 1 or arg.p < 0:
                raise ValueError("sqrt needs a non-negative integer argument")
            n = int(arg.p)
            r = math.isqrt(n)
            if r * r == n:
                return QuadraticIrrational(r)
            return QuadraticIrrational(0, 1, n)
        raise ValueError(f"unsupported syntax in {text!r}")

    return ev(tree)


# ---------------------------------------------------------------------------
# Error-tracked reals
# ---------------------------------------------------------------------------


def _ulp(x: mpmath.mpf) -> mpmath.mpf:
    # one unit in the last place at the current working precision
    if x == 0:
        return mpmath.mpf(0)
    return abs(x) * mpmath.mpf(2) ** (1 - mpmath.mp.prec)


@dataclass(frozen=True)
class BigReal:
    """A real number known to lie in ``[value - radius, value + radius]``.

    Arithmetic is carried out at the current mpmath precision and every
    operation widens the radius by the rounding it introduces.
    """

    value: mpmath.mpf
    radius: mpmath.mpf = mpmath.mpf(0)

    @classmethod
    def exact(cls, x) -> "BigReal":
        if isinstance(x, Fraction):
            v = mpmath.mpf(x.numerator) / x.denominator
            return cls(v, _ulp(v))
        if isinstance(x, QuadraticIrrational):
            v = x.to_mpf(mpmath.mp.dps)
            return cls(v, 2 * _ulp(v))
        v = mpmath.mpf(x)
        return cls(v, mpmath.mpf(0) if v == int(v) and abs(v) < 2**52 else _ulp(v))

    @staticmethod
    def _lift(x) -> "BigReal":
        return x if isinstance(x, BigReal) else BigReal.exact(x)

    # endpoints are formed exactly so comparisons never depend on mp.prec
    @property
    def lo(self) -> mpmath.mpf:
        return mpmath.fsub(self.value, self.radius, exact=True)

    @property
    def hi(self) -> mpmath.mpf:
        return mpmath.fadd(self.value, self.radius, exact=True)

    def __add__(self, other):
        o = BigReal._lift(other)
        v = self.value + o.value
        return BigReal(v, self.radius + o.radius + _ulp(v))

    __radd__ = __add__

    def __neg__(self):
        return BigReal(-self.value, self.radius)

    def __sub__(self, other):
        return self + (-BigReal._lift(other))

    def __rsub__(self, other):
        return BigReal._lift(other) - self

    def __mul__(self, other):
        o = BigReal._lift(other)
        v = self.value * o.value
        r = abs(self.value) * o.radius + abs(o.value) * self.radius + self.radius * o.radius
        return BigReal(v, r + _ulp(v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = BigReal._lift(other)
        if abs(o.value) <= o.radius:
            raise ZeroDivisionError("divisor interval contains zero")
        v = self.value / o.value
        denom = abs(o.value) - o.radius
        r = (self.radius + abs(v) * o.radius) / denom
        return BigReal(v, r + _ulp(v))

    def __rtruediv__(self, other):
        return BigReal._lift(other) / self

    def __abs__(self):
        return BigReal(abs(self.value), self.radius)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return (self.log() * k).exp()
        out = BigReal.exact(1)
        for _ in range(k):
            out = out * self
        return out

    def sqrt(self) -> "BigReal":
        if self.lo < 0:
            if self.value < 0:
                raise ValueError("sqrt of a negative interval")
            v = mpmath.sqrt(self.value)
            return BigReal(v, mpmath.sqrt(self.hi) - v + _ulp(v))
        v = mpmath.sqrt(self.value)
        lo = mpmath.sqrt(self.lo)
        hi = mpmath.sqrt(self.hi)
        return BigReal(v, max(v - lo, hi - v) + _ulp(v))

    def root(self, k: int) -> "BigReal":
        """Real ``k``-th root of a non-negative interval."""
        if k == 1:
            return self
        if self.value < 0:
            raise ValueError("root of a negative interval")
        v = mpmath.root(self.value, k)
        lo = mpmath.root(max(self.lo, mpmath.mpf(0)), k)
        hi = mpmath.root(self.hi, k)
        return BigReal(v, max(v - lo, hi - v) + 2 * _ulp(v))

    def log(self) -> "BigReal":
        if self.lo <= 0:
            raise ValueError("log of an interval touching zero")
        v = mpmath.log(self.value)
        return BigReal(v, self.radius / self.lo + _ulp(v) + _ulp(mpmath.mpf(1)))

    def exp(self) -> "BigReal":
        v = mpmath.exp(self.value)
        return BigReal(v, v * mpmath.expm1(self.radius) + _ulp(v))

    def contains(self, x) -> bool:
        x = mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x
        return self.lo <= x <= self.hi

    def overlaps(self, other: "BigReal") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def possibly_le(self, other) -> bool:
        """True unless ``self > other`` is certain."""
        o = BigReal._lift(other)
        return self.lo <= o.hi

    def __float__(self):
        return float(self.value)

    def digits(self, n: int) -> str:
        """Decimal string with ``n`` digits after the point (truncated)."""
        with mpmath.workdps(n + 20):
            scaled = mpmath.floor(abs(self.value) * mpmath.mpf(10) ** n)
        s = str(int(scaled)).rjust(n + 1, "0")
        sign = "-" if self.value < 0 else ""
        return f"{sign}{s[:-n]}.{s[-n:]}" if n else f"{sign}{s}"

    def __str__(self):
        return f"{mpmath.nstr(self.value, 20)} ± {mpmath.nstr(self.radius, 3)}"


# ---------------------------------------------------------------------------
# Recursions
# ---------------------------------------------------------------------------

_BASES = {"F": 0, "tau": -2, "G": 0, "t": -2}
_ALIASES = {"fibonacci": "F", "f": "F", "τ": "tau", "g": "G"}


class _Recursion:
    """Memoised exact terms of one of the four recursions."""

    def __init__(self, kind: str):
        self.kind = kind
        if kind == "F":
            self.terms = {0: 1, 1: 1}
        elif kind == "G":
            self.terms = {0: 1, 1: 2}
        elif kind == "tau":
            self.terms = {-2: 1, -1: 2, 0: 2}
        else:
            self.terms = {-2: Fraction(1), -1: Fraction(2), 0: Fraction(2)}
        self.top = max(self.terms)

    def __getitem__(self, n: int):
        T = self.terms
        while self.top < n:
            k = self.top  # compute term k + 1
            if self.kind == "F":
                T[k + 1] = T[k] + T[k - 1]
            elif self.kind == "G":
                T[k + 1] = 2 * T[k] + T[k - 1]
            elif self.kind == "tau":
                T[k + 1] = T[k] * T[k - 1] - T[k - 2]
            else:
                a, b, c = T[k], T[k - 1], T[k - 2]
                T[k + 1] = a * a * b - a * a / b - a * c / b - b
            self.top = k + 1
        return T[n]


@lru_cache(maxsize=None)
def _recursion(kind: str) -> _Recursion:
    return _Recursion(kind)


def recursion_term(kind: str, n: int) -> Fraction:
    """Exact term ``n`` of one of the recursions ``F``, ``tau``, ``G``, ``t``.

    ``F``: F0 = F1 = 1, F(n+1) = F(n) + F(n-1).
    ``G``: G0 = 1, G1 = 2, G(n+1) = 2 G(n) + G(n-1).
    ``tau``: tau(-2) = 1, tau(-1) = tau(0) = 2, tau(n+1) = tau(n) tau(n-1) - tau(n-2).
    ``t``: t(-2) = 1, t(-1) = t(0) = 2,
    t(n+1) = t(n)^2 t(n-1) - t(n)^2/t(n-1) - t(n) t(n-2)/t(n-1) - t(n-1).
    """
    kind = _ALIASES.get(kind, kind)
    if kind not in _BASES:
        raise ValueError(f"unknown recursion {kind!r}")
    if n < _BASES[kind]:
        raise ValueError(f"{kind} is defined for n >= {_BASES[kind]}, got {n}")
    return Fraction(_recursion(kind)[n])


# ---------------------------------------------------------------------------
# The two constants
# ---------------------------------------------------------------------------


def _logq(x: Fraction) -> mpmath.mpf:
    return mpmath.log(x.numerator) - mpmath.log(x.denominator)


def _ratio_log_star(n: int) -> mpmath.mpf:
    # log of (tau_n^F(n+2) / tau_(n+1)^F(n+1))^((-1)^n)
    F, tau = _recursion("F"), _recursion("tau")
    s = 1 if n % 2 == 0 else -1
    return s * (F[n + 2] * mpmath.log(tau[n]) - F[n + 1] * mpmath.log(tau[n + 1]))


def _ratio_log_dstar(n: int) -> mpmath.mpf:
    # log of (t_n^G(n+1) / t_(n+1)^G(n))^((-1)^n)
    G, t = _recursion("G"), _recursion("t")
    s = 1 if n % 2 == 0 else -1
    return s * (G[n + 1] * _logq(t[n]) - G[n] * _logq(t[n + 1]))


def _product_log_star(n_terms: int) -> mpmath.mpf:
    F, tau = _recursion("F"), _recursion("tau")
    acc = mpmath.mpf(0)
    for n in range(n_terms):
        s = -1 if n % 2 == 0 else 1
        factor = 1 - Fraction(tau[n - 2], tau[n - 1] * tau[n])
        acc += s * F[n + 1] * _logq(factor)
    return acc


def _product_log_dstar(n_terms: int) -> mpmath.mpf:
    G, t = _recursion("G"), _recursion("t")
    acc = -mpmath.log(2)
    for n in range(n_terms):
        s = 1 if n % 2 == 0 else -1
        acc += s * G[n] * _logq(t[n] ** 2 * t[n - 1] / t[n + 1])
    return acc


def ratio_estimate(which: str, n: int) -> Fraction:
    """Exact ``n``-th ratio estimate (only practical for small ``n``)."""
    s = 1 if n % 2 == 0 else -1
    if which == "alpha-star":
        F, tau = _recursion("F"), _recursion("tau")
        r = Fraction(tau[n] ** F[n + 2], tau[n + 1] ** F[n + 1])
    elif which == "alpha-double-star":
        G, t = _recursion("G"), _recursion("t")
        r = t[n] ** G[n + 1] / t[n + 1] ** G[n]
    else:
        raise ValueError(f"unknown constant {which!r}")
    return r if s == 1 else 1 / r


def _log_bound(n: int, which: str) -> mpmath.mpf:
    # magnitude of the log-space terms, for the rounding part of the radius
    if which == "alpha-star":
        F, tau = _recursion("F"), _recursion("tau")
        return F[n + 2] * mpmath.log(tau[n] + 1) + F[n + 1] * mpmath.log(tau[n + 1] + 1)
    G, t = _recursion("G"), _recursion("t")
    return G[n + 1] * abs(_logq(t[n])) + G[n] * abs(_logq(t[n + 1])) + 4


@dataclass(frozen=True)
class ConstantResult:
    """A computed constant together with its cross-check diagnostics."""

    value: BigReal
    iterations: int
    working_digits: int
    product_form: BigReal


def _compute_constant(which: str, target_digits: int) -> ConstantResult:
    if target_digits < 1:
        raise ValueError("target_digits must be >= 1")
    ratio = _ratio_log_star if which == "alpha-star" else _ratio_log_dstar
    product = _product_log_star if which == "alpha-star" else _product_log_dstar
    goal = mpmath.mpf(10) ** (-(target_digits + 5))
    dps = 4 * target_digits
    while True:
        bits = int(dps * 3.33) + 8
        if bits > MAX_WORKING_BITS:
            raise ConvergenceError(
                f"{which}: no agreement to {target_digits} digits within {MAX_WORKING_BITS} bits"
            )
        with mpmath.workdps(dps):
            prev = ratio(0)
            for n in range(1, 64):
                cur = ratio(n)
                rounding = _log_bound(n, which) * mpmath.mpf(10) ** (-dps) * 8
                diff = abs(cur - prev)
                if diff + rounding < goal:
                    # log radius -> value radius, via exp(x +- r)
                    log_val = BigReal(cur, diff + rounding)
                    val = log_val.exp()
                    prod_log = product(n + 2)
                    prod = BigReal(prod_log, abs(prod_log - product(n + 1)) + rounding).exp()
                    return ConstantResult(val, n, dps, prod)
                if rounding >= goal:
                    break
                prev = cur
        dps *= 2


@lru_cache(maxsize=64)
def _constant_cached(which: str, target_digits: int) -> ConstantResult:
    return _compute_constant(which, target_digits)


def alpha_star(target_digits: int = 50) -> BigReal:
    """The parameter whose BTV pair has golden-mean Sturmian extremal words.

    Returned with ``radius < 10**-target_digits``.
    """
    return _constant_cached("alpha-star", target_digits).value


def alpha_double_star(target_digits: int = 50) -> BigReal:
    """The parameter whose BTV pair has rotation number ``1 - sqrt(2)/2``."""
    return _constant_cached("alpha-double-star", target_digits).value


def constant_details(which: str, target_digits: int) -> ConstantResult:
    """Value plus product-form cross-check for ``alpha-star``/``alpha-double-star``."""
    if which not in ("alpha-star", "alpha-double-star"):
        raise ValueError(f"unknown constant {which!r}")
    return _constant_cached(which, target_digits)


CONSTANT_NAMES = {"alpha_star": "alpha-star", "alpha_double_star": "alpha-double-star"}


def constant_value(name: str, digits: int = 50) -> mpmath.mpf:
    """Numeric value of a named constant (``alpha_star``/``alpha_double_star``)."""
    key = CONSTANT_NAMES.get(name, name)
    return _constant_cached(key, digits).value.value
