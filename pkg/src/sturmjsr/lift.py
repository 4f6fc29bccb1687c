"""Binary encoding of ``m``-letter words for the lifted pair, and block bookkeeping.

A symbol ``k`` of the ``m``-letter word becomes a block of ``m`` binary
symbols with its single 1 at position ``m*i - k``.  The block-support
automaton follows which of the ``2m - 1`` direct summands a product of
``B0``/``B1`` factors has not yet annihilated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .families import JBPair, jb_pair, reduced_generator
from .linalg import Matrix, MatrixFamily, block_matrix, identity, multiply
from .words import SequenceSource, Word, shift

__all__ = [
    "BlockSupport",
    "Decoded",
    "Encoded",
    "LiftError",
    "block_step",
    "decode_word",
    "encode_word",
    "feqt_sides",
    "normalize_phase",
    "numeric_survives",
    "restricted_product_is_zero",
    "survives",
    "verify_encode_product",
    "verify_feqt",
]


class LiftError(ValueError):
    """A binary block does not contain exactly one 1, or no phase survives."""


class Encoded(SequenceSource):
    alphabet_size = 2

    def __init__(self, inner: SequenceSource, m: int):
        if m < 1:
            raise ValueError("m must be >= 1")
        if inner.alphabet_size > max(m, 2):
            raise ValueError(f"alphabet of size {inner.alphabet_size} does not fit in m={m}")
        self.inner, self.m = inner, m
        super().__init__()

    def _compute(self, start, stop):
        m = self.m
        self.inner._ensure((stop - 2) // m + 1)
        z = self.inner._cache
        out = []
        for j in range(start, stop):
            i = (j + m - 1) // m  # block holding position j
            if z[i - 1] >= m:
                raise ValueError(f"symbol {z[i - 1]} at position {i} outside 0..{m - 1}")
            out.append(1 if z[i - 1] == m * i - j else 0)
        return out

    def __repr__(self):
        return f"Encoded({self.inner!r}, m={self.m})"


class Decoded(SequenceSource):
    def __init__(self, inner: SequenceSource, m: int):
        if m < 1:
            raise ValueError("m must be >= 1")
        if inner.alphabet_size != 2:
            raise ValueError("decoding needs a binary source")
        self.inner, self.m = inner, m
        self.alphabet_size = max(m, 2)
        super().__init__()

    def _compute(self, start, stop):
        m = self.m
        self.inner._ensure((stop - 1) * m)
        x = self.inner._cache
        out = []
        for i in range(start, stop):
            block = x[m * (i - 1):m * i]
            if sum(block) != 1:
                raise LiftError(f"block {i} holds {sum(block)} ones, expected exactly one")
            # x_{m i - k} = 1  <=>  block index (m - 1 - k) is set
            out.append(m - 1 - block.index(1))
        return out

    def __repr__(self):
        return f"Decoded({self.inner!r}, m={self.m})"


def encode_word(z: SequenceSource | Word, m: int):
    """Binary sequence with ``x_{m i - z_i} = 1`` and every other symbol 0.

    A finite :class:`Word` gives a finite word of length ``m * len(z)``.
    """
    if isinstance(z, Word):
        out = [0] * (m * len(z))
        for i, k in enumerate(z.symbols, start=1):
            if not 0 <= k < m:
                raise ValueError(f"symbol {k} outside 0..{m - 1}")
            out[m * i - k - 1] = 1
        return Word(tuple(out), 2)
    return Encoded(z, m)


def decode_word(x: SequenceSource | Word, m: int):
    """Inverse of :func:`encode_word`; raises :class:`LiftError` on a bad block."""
    if isinstance(x, Word):
        if len(x) % m:
            raise ValueError("finite word length must be a multiple of m")
        syms = []
        for i in range(1, len(x) // m + 1):
            block = x.symbols[m * (i - 1):m * i]
            if sum(block) != 1:
                raise LiftError(f"block {i} holds {sum(block)} ones, expected exactly one")
            syms.append(m - 1 - block.index(1))
        return Word(tuple(syms), max(m, 2))
    return Decoded(x, m)


@dataclass(frozen=True)
class BlockSupport:
    m: int
    alive: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "alive", frozenset(self.alive))
        if any(not 0 <= j <= 2 * self.m - 2 for j in self.alive):
            raise ValueError("block index out of range")


def block_step(s: BlockSupport, symbol: int) -> BlockSupport:
    """Apply ``B0`` (symbol 0) or ``B1`` (symbol 1) to a block support."""
    m = s.m
    if symbol == 0:
        alive = {j - 1 for j in s.alive if j >= 1}
    elif symbol == 1:
        alive = {j + m - 1 for j in s.alive if j <= m - 1}
    else:
        raise ValueError("block_step takes a binary symbol")
    return BlockSupport(m, frozenset(alive))


def survives(x: Word | Iterable[int], m: int, start_block: int) -> bool:
    """Whether a product along ``x`` can leave ``V_start_block`` nonzero.

    Assumes nonzero members act injectively on the tracked block.
    """
    s = BlockSupport(m, frozenset({start_block}))
    for sym in x:
        s = block_step(s, sym)
        if not s.alive:
            return False
    return True


def numeric_survives(pair: JBPair, x: Sequence[int], j: int) -> bool:
    """Exact check that ``B_{x_n} ... B_{x_1}`` is nonzero on block ``j``."""
    P = identity(pair.B0.rows)
    for sym in x:
        P = multiply(pair[sym], P)
    cols = pair.layout.span(j)
    return any(P.entries[r][c] != 0 for r in range(P.rows) for c in cols)


def normalize_phase(x: SequenceSource, m: int, probe_length: int) -> int:
    """Smallest ``k <= 2m-2`` with ``sigma^k x`` surviving from block ``m-1``."""
    if probe_length < 2 * m:
        raise ValueError("probe_length must be at least 2m")
    for k in range(0, 2 * m - 1):
        if survives(shift(x, k).prefix_list(probe_length), m, m - 1):
            return k
    raise LiftError("no surviving phase: every allowed shift annihilates block m-1")


def _shifted_block_product(fam: MatrixFamily, w: Sequence[int], offset: int) -> Matrix | None:
    # A_{w_n + offset} ... A_{w_1 + offset}, None when some index leaves 0..m-1
    P = identity(fam.dimension)
    for s in w:
        t = s + offset
        if not 0 <= t < fam.size:
            return None
        P = multiply(fam[t], P)
    return P


def feqt_sides(fam: MatrixFamily, w: Sequence[int], pair: JBPair | None = None) -> tuple[Matrix, Matrix]:
    """Both sides of the block-diagonal identity for ``D_{w_n} ... D_{w_1}``."""
    pair = pair or jb_pair(fam)
    m, d = fam.size, fam.dimension
    gens = [reduced_generator(pair, j) for j in range(m)]
    left = identity(pair.B0.rows)
    for s in w:
        left = multiply(gens[s], left)
    n = 2 * m - 1
    blocks: list[list] = [[None] * n for _ in range(n)]
    for i in range(n):
        blocks[i][i] = _shifted_block_product(fam, w, i - m + 1)
    right = block_matrix(blocks, d)
    return left, right


def verify_feqt(fam: MatrixFamily, w: Word | Sequence[int], pair: JBPair | None = None) -> bool:
    """Exact equality of the reduced-generator product and its block-diagonal form."""
    left, right = feqt_sides(fam, list(w), pair)
    return left == right


def verify_encode_product(fam: MatrixFamily, z: Word | Sequence[int], pair: JBPair | None = None) -> bool:
    """``B_{x_{mn}} ... B_{x_1} == D_{z_n} ... D_{z_1}`` for ``x = encode(z)``."""
    pair = pair or jb_pair(fam)
    m = fam.size
    zw = z if isinstance(z, Word) else Word(tuple(z), max(m, 2))
    x = encode_word(zw, m)
    left = identity(pair.B0.rows)
    for s in x:
        left = multiply(pair[s], left)
    gens = [reduced_generator(pair, j) for j in range(m)]
    right = identity(pair.B0.rows)
    for s in zw:
        right = multiply(gens[s], right)
    return left == right


def restricted_product_is_zero(P: Matrix, pair: JBPair, j: int) -> bool:
    cols = pair.layout.span(j)
    return all(P.entries[r][c] == 0 for r in range(P.rows) for c in cols)

