"""Constructors for the matrix families: BTV pairs, Kronecker products, block lifts."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import Matrix, MatrixFamily, Poly, Scalar, block_matrix, identity, kron, multiply, parse_scalar

__all__ = [
    "ALPHA_DOUBLE_STAR",
    "ALPHA_STAR",
    "BlockLayout",
    "JBPair",
    "REFERENCE_D_PATTERNS",
    "REFERENCE_D_SCALES",
    "btv_pair",
    "example_p2",
    "jb_pair",
    "kron_family",
    "reduced_generator",
    "toy_family",
]

ALPHA_STAR = Poly.symbol("alpha_star")
ALPHA_DOUBLE_STAR = Poly.symbol("alpha_double_star")

A0_PATTERN = ((1, 1), (0, 1))
A1_PATTERN = ((1, 0), (1, 1))

# integer patterns of D_0..D_3 of the p = 2 reference example
REFERENCE_D_PATTERNS = (
    ((1, 1, 1, 1), (0, 1, 0, 1), (0, 0, 1, 1), (0, 0, 0, 1)),
    ((1, 1, 0, 0), (0, 1, 0, 0), (1, 1, 1, 1), (0, 1, 0, 1)),
    ((1, 0, 1, 0), (1, 1, 1, 1), (0, 0, 1, 0), (0, 0, 1, 1)),
    ((1, 0, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0), (1, 1, 1, 1)),
)
REFERENCE_D_SCALES = (1, ALPHA_STAR, ALPHA_DOUBLE_STAR, ALPHA_STAR * ALPHA_DOUBLE_STAR)


def _as_scalar(alpha) -> Scalar:
    if isinstance(alpha, str):
        return parse_scalar(alpha)
    if isinstance(alpha, float):
        return Fraction(alpha)
    return alpha


def btv_pair(alpha) -> MatrixFamily:
    """``{[[1,1],[0,1]], alpha*[[1,0],[1,1]]}``.

    ``alpha`` may be a rational, a decimal string, or a named constant such as
    ``"alpha_star"``.  Values outside ``[0, 1]`` only trigger a warning.
    """
    a = _as_scalar(alpha)
    if isinstance(a, (int, Fraction)) and not 0 <= a <= 1:
        warnings.warn(f"alpha={a} lies outside [0, 1]", stacklevel=2)
    return MatrixFamily((Matrix(A0_PATTERN), Matrix(A1_PATTERN, a)), tag=f"btv({a})")


def kron_family(alphas: Sequence) -> MatrixFamily:
    """``2**p`` Kronecker products of BTV members, one factor per component.

    Member ``sum_j x_j 2**(j-1)`` is ``B^(1)_{x_1} (x) ... (x) B^(p)_{x_p}``
    with ``B^(j)`` the BTV pair for ``alphas[j-1]``.
    """
    if not alphas:
        raise ValueError("need at least one alpha")
    pairs = [btv_pair(a) for a in alphas]
    p = len(pairs)
    members = []
    for idx in range(2**p):
        bits = [(idx >> j) & 1 for j in range(p)]
        M = pairs[0][bits[0]]
        for j in range(1, p):
            M = kron(M, pairs[j][bits[j]])
        members.append(M)
    tag = "kron(" + ",".join(str(_as_scalar(a)) for a in alphas) + ")"
    return MatrixFamily(tuple(members), tag=tag)


@dataclass(frozen=True)
class BlockLayout:
    """``2m - 1`` blocks of side ``d``; block ``i`` spans ``[i*d, (i+1)*d)``."""

    m: int
    d: int

    @property
    def blocks(self) -> int:
        return 2 * self.m - 1

    @property
    def dimension(self) -> int:
        return self.blocks * self.d

    def span(self, i: int) -> range:
        if not 0 <= i < self.blocks:
            raise IndexError(f"block {i} outside 0..{self.blocks - 1}")
        return range(i * self.d, (i + 1) * self.d)


@dataclass(frozen=True)
class JBPair:
    """The lifted pair together with the family it encodes."""

    B0: Matrix
    B1: Matrix
    base: MatrixFamily
    layout: BlockLayout

    @property
    def m(self) -> int:
        return self.layout.m

    @property
    def family(self) -> MatrixFamily:
        return MatrixFamily((self.B0, self.B1), tag=f"jb({self.base.tag})")

    def __getitem__(self, i: int) -> Matrix:
        return (self.B0, self.B1)[i]


def jb_pair(fam: MatrixFamily) -> JBPair:
    """Block shift ``B0`` and block injection ``B1`` on ``2m - 1`` copies.

    ``B0(v_0 + ... + v_{2m-2}) = v_1 + ... + v_{2m-2} + 0`` and
    ``B1(v_0 + ... + v_{2m-2}) = 0 + ... + 0 + A_0 v_0 + ... + A_{m-1} v_{m-1}``.
    """
    m, d = fam.size, fam.dimension
    lay = BlockLayout(m, d)
    n = lay.blocks
    I = identity(d)
    b0 = [[I if j == i + 1 else None for j in range(n)] for i in range(n)]
    b1 = [[None] * n for _ in range(n)]
    for i in range(m):
        b1[m - 1 + i][i] = fam[i]
    return JBPair(block_matrix(b0, d), block_matrix(b1, d), fam, lay)


def _power(M: Matrix, k: int) -> Matrix:
    out = identity(M.rows)
    for _ in range(k):
        out = multiply(M, out)
    return out


def reduced_generator(pair: JBPair, j: int) -> Matrix:
    """``B0^j B1 B0^(m-1-j)``, which acts on block ``m-1`` as ``A_j``."""
    m = pair.m
    if not 0 <= j < m:
        raise ValueError(f"j={j} outside 0..{m - 1}")
    return multiply(_power(pair.B0, j), multiply(pair.B1, _power(pair.B0, m - 1 - j)))


def toy_family(values: Sequence[int]) -> MatrixFamily:
    """One-dimensional family ``{(v_0), ..., (v_{m-1})}``."""
    return MatrixFamily(tuple(Matrix([[v]]) for v in values), tag="toy(" + ",".join(map(str, values)) + ")")


def example_p2() -> tuple[MatrixFamily, JBPair]:
    """The explicit ``p = 2`` instance: the four ``D_i`` and the 28x28 lift.

    Raises ``AssertionError`` if the construction departs from the reference
    patterns.
    """
    D = kron_family(["alpha_star", "alpha_double_star"])
    for k, M in enumerate(D):
        if M.pattern != REFERENCE_D_PATTERNS[k] or M.scale != REFERENCE_D_SCALES[k]:
            raise AssertionError(f"D_{k} does not match the reference matrix")
    pair = jb_pair(D)
    if pair.B0.rows != 28:
        raise AssertionError("lifted pair must be 28x28")
    return D, pair
