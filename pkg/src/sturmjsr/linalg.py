"""Dense matrices with exact entries and high-precision norms.

Entries are exact: ``int``, ``Fraction`` or :class:`Poly`, a polynomial with
rational coefficients in the named constants ``alpha_star`` and
``alpha_double_star``.  A matrix may additionally carry a scalar factor, so
``alpha_star * [1,0;1,1]`` keeps its integer pattern; products of factored
matrices stay factored and long products never leave integer arithmetic.

Norms and spectral radii are evaluated numerically with mpmath at a chosen
number of digits and returned as :class:`~sturmjsr.precision.BigReal`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import mpmath
import numpy as np

from .precision import BigReal, ConvergenceError, constant_value

__all__ = [
    "Matrix",
    "MatrixFamily",
    "Poly",
    "identity",
    "kron",
    "multiply",
    "op_norm",
    "parse_matrix",
    "product_along",
    "spectral_radius",
    "zeros",
]

DEFAULT_DIGITS = 50


# ---------------------------------------------------------------------------
# Exact scalars
# ---------------------------------------------------------------------------

Monomial = tuple  # sorted tuple of (name, exponent)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for name, e in b:
        d[name] = d.get(name, 0) + e
    return tuple(sorted((k, v) for k, v in d.items() if v))


class Poly:
    """Polynomial with rational coefficients in named real constants.

    Instances are normalised so that a constant polynomial never survives
    arithmetic: it is returned as ``int`` or ``Fraction`` instead.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict):
        self.terms = {m: c for m, c in terms.items() if c != 0}

    @classmethod
    def symbol(cls, name: str, power: int = 1) -> "Poly":
        return cls({((name, power),): 1})

    @staticmethod
    def _wrap(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return Poly({(): x})

    def _norm(self):
        t = self.terms
        if not t:
            return 0
        if len(t) == 1 and () in t:
            c = t[()]
            return int(c) if isinstance(c, Fraction) and c.denominator == 1 else c
        return self

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        o = Poly._wrap(other)
        t = dict(self.terms)
        for m, c in o.terms.items():
            t[m] = t.get(m, 0) + c
        return Poly(t)._norm()

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-Poly._wrap(other))

    def __rsub__(self, other):
        return Poly._wrap(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return 0
            if other == 1:
                return self
            return Poly({m: c * other for m, c in self.terms.items()})._norm()
        o = Poly._wrap(other)
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                t[m] = t.get(m, 0) + c1 * c2
        return Poly(t)._norm()

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = 1
        for _ in range(k):
            out = self * out
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self._norm() == other if not isinstance(self._norm(), Poly) else False
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def evaluate(self, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
        with mpmath.workdps(digits + 10):
            total = mpmath.mpf(0)
            for mono, c in self.terms.items():
                v = mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpmath.mpf(c)
                for name, e in mono:
                    v *= constant_value(name, digits + 10) ** e
                total += v
            return +total

    def __float__(self):
        return float(self.evaluate(20))

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        parts = []
        for mono, c in sorted(self.terms.items()):
            syms = "*".join(n if e == 1 else f"{n}^{e}" for n, e in mono)
            if not syms:
                parts.append(str(c))
            elif c == 1:
                parts.append(syms)
            elif c == -1:
                parts.append(f"-{syms}")
            else:
                parts.append(f"{c}*{syms}")
        return "+".join(parts).replace("+-", "-")


Scalar = Union[int, Fraction, Poly]


def scalar_value(x, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """Numeric value of an exact scalar (or pass an mpf through)."""
    if isinstance(x, Poly):
        return x.evaluate(digits)
    if isinstance(x, Fraction):
        with mpmath.workdps(digits + 10):
            return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, Poly))


def parse_scalar(text: str) -> Scalar:
    """Parse ``3/2``, ``0.75``, ``alpha_star``, ``2*alpha_star^2``, sums thereof."""
    text = text.replace(" ", "")
    if not text:
        raise ValueError("empty scalar")
    total: Scalar = 0
    for sign, term in re.findall(r"([+-]?)([^+-]+)", text):
        val: Scalar = 1
        for factor in term.split("*"):
            m = re.fullmatch(r"([A-Za-z_]\w*)(?:\^(\d+))?", factor)
            if m:
                val = val * Poly.symbol(m.group(1), int(m.group(2) or 1))
            else:
                val = val * Fraction(factor)
        if isinstance(val, Fraction) and val.denominator == 1:
            val = int(val)
        total = total + (-val if sign == "-" else val)
    return total


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


def _normalise_entry(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    if isinstance(x, float):
        return Fraction(x)
    return x


class Matrix:
    """Dense matrix ``scale * pattern`` with exact entries.

    ``scale`` defaults to 1.  When the pattern is all-integer the matrix is
    said to be in factored form; :attr:`entries` always gives the expanded
    values.
    """

    __slots__ = ("rows", "cols", "pattern", "scale", "_expanded")

    def __init__(self, pattern: Sequence[Sequence], scale: Scalar = 1):
        rows = tuple(tuple(_normalise_entry(x) for x in r) for r in pattern)
        if not rows:
            raise ValueError("matrix needs at least one row")
        cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix rows")
        self.rows, self.cols = len(rows), cols
        self.pattern = rows
        self.scale = _normalise_entry(scale)
        self._expanded = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> tuple[tuple, ...]:
        if self._expanded is None:
            s = self.scale
            if isinstance(s, int) and s == 1:
                self._expanded = self.pattern
            else:
                self._expanded = tuple(tuple(_normalise_entry(s * x) if x else 0 for x in r) for r in self.pattern)
        return self._expanded

    @property
    def is_factored(self) -> bool:
        """True when the pattern is all-integer (scale may be anything)."""
        return all(isinstance(x, int) for r in self.pattern for x in r)

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(x) for r in self.pattern for x in r) and _is_exact(self.scale)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return multiply(self, other)

    def scaled(self, c: Scalar) -> "Matrix":
        return Matrix(self.pattern, _normalise_entry(c * self.scale))

    def expand(self) -> "Matrix":
        """Same matrix with the scale multiplied into the entries."""
        return Matrix(self.entries)

    def transpose(self) -> "Matrix":
        return Matrix(tuple(zip(*self.pattern)), self.scale)

    def block(self, bi: int, bj: int, size: int) -> "Matrix":
        e = self.entries
        return Matrix([row[bj * size:(bj + 1) * size] for row in e[bi * size:(bi + 1) * size]])

    def is_zero(self) -> bool:
        return self.scale == 0 or all(x == 0 for r in self.pattern for x in r)

    def numeric(self, digits: int = DEFAULT_DIGITS) -> mpmath.matrix:
        with mpmath.workdps(digits + 10):
            s = scalar_value(self.scale, digits)
            return mpmath.matrix([[scalar_value(x, digits) * s for x in r] for r in self.pattern])

    def to_numpy(self) -> np.ndarray:
        s = float(scalar_value(self.scale, 20))
        return np.array([[float(scalar_value(x, 20)) for x in r] for r in self.pattern]) * s

    def __repr__(self):
        return f"Matrix({format_matrix(self)})"

    def __str__(self):
        return format_matrix(self)


def identity(d: int) -> Matrix:
    return Matrix([[1 if i == j else 0 for j in range(d)] for i in range(d)])


def zeros(r: int, c: int | None = None) -> Matrix:
    return Matrix([[0] * (r if c is None else c) for _ in range(r)])


def _matmul_exact(a: tuple, b: tuple) -> list[list]:
    # zero-skipping dense product; entries may be int, Fraction, Poly or mpf
    n, k, m = len(a), len(b), len(b[0])
    b_rows = [[(j, x) for j, x in enumerate(row) if x != 0] for row in b]
    out = []
    for i in range(n):
        acc: list = [0] * m
        for t, x in enumerate(a[i]):
            if x == 0:
                continue
            for j, y in b_rows[t]:
                acc[j] = acc[j] + x * y
        out.append(acc)
    return out


def multiply(A: Matrix, B: Matrix) -> Matrix:
    """Matrix product ``A @ B``; factored operands give a factored result."""
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.shape} @ {B.shape}")
    if A.is_factored and B.is_factored:
        return Matrix(_matmul_exact(A.pattern, B.pattern), _normalise_entry(A.scale * B.scale))
    return Matrix(_matmul_exact(A.entries, B.entries))


def kron(G: Matrix, H: Matrix) -> Matrix:
    """Kronecker product; the scale of the result is the product of scales."""
    g, h = G.pattern, H.pattern
    rows = []
    for gi in g:
        for hi in h:
            rows.append([x * y for x in gi for y in hi])
    return Matrix(rows, _normalise_entry(G.scale * H.scale))


def block_matrix(blocks: Sequence[Sequence[Matrix | None]], size: int) -> Matrix:
    """Assemble square blocks of side ``size``; ``None`` is a zero block."""
    n = len(blocks)
    rows = [[0] * (n * size) for _ in range(n * size)]
    for bi, brow in enumerate(blocks):
        for bj, blk in enumerate(brow):
            if blk is None:
                continue
            e = blk.entries
            for i in range(size):
                for j in range(size):
                    rows[bi * size + i][bj * size + j] = e[i][j]
    return Matrix(rows)


# ---------------------------------------------------------------------------
# Norms and spectral radius
# ---------------------------------------------------------------------------


def _as_mp(M: Matrix, digits: int) -> mpmath.matrix:
    return M.numeric(digits)


def op_norm(M: Matrix, digits: int = DEFAULT_DIGITS) -> BigReal:
    """Euclidean operator norm, ``sqrt`` of the top eigenvalue of ``M^T M``.

    The Gram matrix is formed exactly when possible; its top eigenvalue comes
    from a symmetric (Jacobi) eigen-iteration, and the residual of the
    returned eigenpair bounds the eigenvalue error.
    """
    if M.is_zero():
        return BigReal(mpmath.mpf(0))
    if M.is_factored and not (isinstance(M.scale, int) and M.scale == 1):
        base = op_norm(Matrix(M.pattern), digits)
        with mpmath.workdps(digits + 10):
            s = BigReal(abs(scalar_value(M.scale, digits)), mpmath.mpf(10) ** (-(digits + 8)))
            return s * base
    if M.is_exact:
        T = M.transpose()
        gram = _as_mp(multiply(T, M), digits)
    else:
        with mpmath.workdps(digits + 10):
            A = _as_mp(M, digits)
            gram = A.T * A
    with mpmath.workdps(digits + 10):
        n = gram.rows
        if n == 1:
            lam = gram[0, 0]
            return BigReal(mpmath.sqrt(lam), mpmath.mpf(10) ** (-(digits + 5)))
        evals, evecs = mpmath.eigsy(gram)
        k = max(range(n), key=lambda i: evals[i])
        lam = evals[k]
        v = evecs[:, k]
        r = mpmath.norm(gram * v - lam * v) / mpmath.norm(v)
        tol = mpmath.mpf(10) ** (-(digits - 8)) * max(1, abs(lam))
        if r > tol:
            raise ConvergenceError(f"symmetric eigen-iteration residual {mpmath.nstr(r, 5)}")
        lam_iv = BigReal(lam, r + mpmath.mpf(10) ** (-(digits + 5)) * max(1, abs(lam)))
        if lam_iv.lo < 0:
            lam_iv = BigReal(max(lam, mpmath.mpf(0)), lam_iv.radius)
        return lam_iv.sqrt()


def _charpoly_exact(rows: tuple) -> list[Fraction]:
    """Characteristic polynomial coefficients (leading first), Faddeev-LeVerrier."""
    n = len(rows)
    A = [[Fraction(x) for x in r] for r in rows]
    coeffs = [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk = A @ M(k-1) + c(k-1) I
        if k == 1:
            Mk = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        else:
            AM = [[sum(A[i][t] * Mk[t][j] for t in range(n) if A[i][t]) for j in range(n)] for i in range(n)]
            Mk = [[AM[i][j] + (coeffs[-1] if i == j else 0) for j in range(n)] for i in range(n)]
        AM = [[sum(A[i][t] * Mk[t][j] for t in range(n) if A[i][t]) for j in range(n)] for i in range(n)]
        ck = -sum(AM[i][i] for i in range(n)) / k
        coeffs.append(ck)
    return coeffs


def _poly_divmod(num: list[Fraction], den: list[Fraction]) -> tuple[list, list]:
    num = list(num)
    q = []
    while len(num) >= len(den):
        f = num[0] / den[0]
        q.append(f)
        for i in range(len(den)):
            num[i] -= f * den[i]
        num.pop(0)
    while num and num[0] == 0:
        num.pop(0)
    return q, num


def _poly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    return [c / a[0] for c in a]


def _squarefree(p: list[Fraction]) -> list[Fraction]:
    n = len(p) - 1
    dp = [c * (n - i) for i, c in enumerate(p[:-1])]
    g = _poly_gcd(p, dp)
    q, r = _poly_divmod(p, g)
    assert not r
    return q


def spectral_radius(M: Matrix, digits: int = DEFAULT_DIGITS) -> BigReal:
    """Largest eigenvalue modulus.

    Integer and rational matrices go through the exact characteristic
    polynomial, reduced to its squarefree part so every root is simple; other
    matrices use a QR eigen-solver at ``digits`` precision.
    """
    if M.rows != M.cols:
        raise ValueError("spectral radius needs a square matrix")
    if M.is_zero():
        return BigReal(mpmath.mpf(0))
    if M.is_factored and not (isinstance(M.scale, int) and M.scale == 1):
        base = spectral_radius(Matrix(M.pattern), digits)
        with mpmath.workdps(digits + 10):
            s = BigReal(abs(scalar_value(M.scale, digits)), mpmath.mpf(10) ** (-(digits + 8)))
            return s * base
    exact_rational = all(isinstance(x, (int, Fraction)) for r in M.entries for x in r)
    with mpmath.workdps(digits + 10):
        if exact_rational:
            p = _squarefree(_charpoly_exact(M.entries))
            while len(p) > 1 and p[-1] == 0:
                # factor lambda out; zero roots never set the radius
                p.pop()
            if len(p) == 1:
                return BigReal(mpmath.mpf(0))
            coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in p]
            roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * digits + 40)
            rho = max(abs(z) for z in roots)
            return BigReal(rho, mpmath.mpf(10) ** (-(digits - 5)) * max(1, rho))
        A = _as_mp(M, digits)
        evals = mpmath.eig(A, left=False, right=False)
        rho = max(abs(z) for z in evals)
        # defective eigenvalues lose up to half the digits
        return BigReal(rho, mpmath.mpf(10) ** (-(digits // 2 - 2)) * max(1, rho))


# ---------------------------------------------------------------------------
# Families and word products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatrixFamily:
    """Indexed set of square matrices of one dimension; index = symbol."""

    members: tuple[Matrix, ...]
    tag: str = ""
    constants: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.members:
            raise ValueError("empty family")
        d = self.members[0].rows
        for M in self.members:
            if M.rows != M.cols or M.rows != d:
                raise ValueError("family members must be square of equal dimension")
        object.__setattr__(self, "members", tuple(self.members))

    @property
    def dimension(self) -> int:
        return self.members[0].rows

    @property
    def size(self) -> int:
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __getitem__(self, i: int) -> Matrix:
        return self.members[i]

    def __iter__(self):
        return iter(self.members)

    def scaled(self, c: Scalar) -> "MatrixFamily":
        return MatrixFamily(tuple(M.scaled(c) for M in self.members), f"{c}*{self.tag}")

    def to_numpy(self) -> np.ndarray:
        return np.stack([M.to_numpy() for M in self.members])


def product_along(fam: MatrixFamily, word: Iterable[int]) -> Matrix:
    """``A_{w_n} ... A_{w_1}``: the first symbol is applied first."""
    P = identity(fam.dimension)
    for s in word:
        s = int(s)
        if not 0 <= s < fam.size:
            raise ValueError(f"symbol {s} out of range for family of size {fam.size}")
        P = multiply(fam[s], P)
    return P


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def _fmt_entry(x) -> str:
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 30)
    return str(x)


def format_matrix(M: Matrix) -> str:
    """``1,1;0,1`` or ``alpha_star * [1,0;1,1]`` for a scaled pattern."""
    body = ";".join(",".join(_fmt_entry(x) for x in r) for r in M.pattern)
    if isinstance(M.scale, int) and M.scale == 1:
        return body
    return f"{M.scale} * [{body}]"


def parse_matrix(text: str) -> Matrix:
    """Inverse of :func:`format_matrix`."""
    text = text.strip()
    scale: Scalar = 1
    m = re.fullmatch(r"(.+?)\s*\*\s*\[(.*)\]", text, re.S)
    if m:
        scale = parse_scalar(m.group(1))
        text = m.group(2)
    elif text.startswith("[") and text.endswith("]"):
        text = text[1:-1]
    rows = [[parse_scalar(x) for x in r.split(",")] for r in text.split(";") if r.strip()]
    return Matrix(rows, scale)
