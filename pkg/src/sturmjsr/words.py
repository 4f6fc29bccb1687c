"""Symbolic sequences: rotation codings, products, factor complexity.

Infinite sequences are :class:`SequenceSource` objects indexed from 1.  They
are lazily evaluated and cache the prefix they have produced, so repeated
complexity counts over growing windows reuse earlier work.

Product alphabets are linearised with component ``j`` (1-based) contributing
``x^(j) * 2**(j-1)``; this matches the member indexing of
:func:`sturmjsr.families.kron_family`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .precision import QuadraticIrrational, parse_quadratic

__all__ = [
    "ComplexityProfile",
    "Periodic",
    "PrefixExtended",
    "Product",
    "SequenceSource",
    "Shifted",
    "Sturmian",
    "SturmianSpec",
    "WindowPolicy",
    "Word",
    "complexity_profile",
    "generate_prefix",
    "is_balanced",
    "one_frequency",
    "recurs_in_window",
    "shift",
    "subword_complexity",
    "symbol_at",
]


@dataclass(frozen=True)
class Word:
    """Finite word over ``{0, ..., alphabet_size - 1}``."""

    symbols: tuple[int, ...]
    alphabet_size: int = 2

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        if self.alphabet_size < 1:
            raise ValueError("alphabet size must be >= 1")
        for s in self.symbols:
            if not 0 <= s < self.alphabet_size:
                raise ValueError(f"symbol {s} outside alphabet of size {self.alphabet_size}")

    @classmethod
    def parse(cls, text: str, alphabet_size: int | None = None) -> "Word":
        """Read a digit string (``"0110"``) or comma-separated integers."""
        text = text.strip()
        if "," in text:
            syms = tuple(int(t) for t in text.split(",") if t.strip())
        else:
            syms = tuple(int(ch) for ch in text)
        m = alphabet_size if alphabet_size is not None else max(2, max(syms, default=0) + 1)
        return cls(syms, m)

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return Word(self.symbols[k], self.alphabet_size)
        return self.symbols[k]

    def __str__(self):
        if self.alphabet_size <= 10:
            return "".join(map(str, self.symbols))
        return ",".join(map(str, self.symbols))

    def as_bytes(self) -> bytes:
        if self.alphabet_size > 256:
            raise ValueError("byte view needs alphabet size <= 256")
        return bytes(self.symbols)


# ---------------------------------------------------------------------------
# Sources
# ---------------------------------------------------------------------------


class SequenceSource:
    """An infinite sequence ``x_1 x_2 ...`` over a finite alphabet."""

    alphabet_size: int = 2

    def __init__(self):
        self._cache = bytearray() if self.alphabet_size <= 256 else []

    def _compute(self, start: int, stop: int) -> list[int]:
        """Symbols at 1-based indices ``start .. stop - 1``."""
        raise NotImplementedError

    def _ensure(self, n: int) -> None:
        have = len(self._cache)
        if have < n:
            # grow geometrically to amortise per-call overhead
            target = max(n, min(2 * have, n + 4096))
            self._cache.extend(self._compute(have + 1, target + 1))

    def __getitem__(self, i: int) -> int:
        if i < 1:
            raise IndexError("sequence indices start at 1")
        self._ensure(i)
        return self._cache[i - 1]

    def prefix(self, L: int) -> Word:
        return Word(self.prefix_bytes(L), self.alphabet_size)

    def prefix_bytes(self, L: int) -> bytes:
        if L < 0:
            raise ValueError("negative length")
        self._ensure(L)
        return bytes(self._cache[:L])

    def prefix_list(self, L: int) -> list[int]:
        self._ensure(L)
        return list(self._cache[:L])


@dataclass(frozen=True)
class SturmianSpec:
    """Rotation ``gamma`` with offset ``z``; ``variant`` is floor or ceil."""

    gamma: QuadraticIrrational
    z: QuadraticIrrational = field(default_factory=lambda: QuadraticIrrational(0))
    variant: str = "floor"

    def __post_init__(self):
        g = self.gamma if isinstance(self.gamma, QuadraticIrrational) else parse_quadratic(str(self.gamma))
        z = self.z if isinstance(self.z, QuadraticIrrational) else parse_quadratic(str(self.z))
        if g.is_rational:
            raise ValueError(f"rotation number must be irrational, got {g}")
        if not (0 < g < 1):
            raise ValueError(f"rotation number must lie in (0, 1), got {g}")
        if not z.is_rational and z.d != g.d:
            raise ValueError("offset must be rational or lie in the same quadratic field as gamma")
        if self.variant not in ("floor", "ceil"):
            raise ValueError("variant must be 'floor' or 'ceil'")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "z", z - z.floor())


def symbol_at(spec: SturmianSpec, i: int) -> int:
    """``x_i = floor((i+1)g + z) - floor(i g + z)`` (or the ceiling version)."""
    if i < 1:
        raise IndexError("sequence indices start at 1")
    g, z = spec.gamma, spec.z
    if spec.variant == "floor":
        return (g * (i + 1) + z).floor() - (g * i + z).floor()
    return (g * (i + 1) + z).ceil() - (g * i + z).ceil()


class Sturmian(SequenceSource):
    """Coding of the rotation by ``gamma`` started at ``z``."""

    alphabet_size = 2

    def __init__(self, spec: SturmianSpec | None = None, **kw):
        self.spec = spec if spec is not None else SturmianSpec(**kw)
        g, z = self.spec.gamma, self.spec.z
        # i*g + z == (A*i + B + (C*i + D) sqrt(d)) / den
        d = g.d
        den = math.lcm(g.p.denominator, g.q.denominator, z.p.denominator, z.q.denominator)
        self._lin = (
            int(g.p * den), int(z.p * den), int(g.q * den), int(z.q * den), d, den,
        )
        super().__init__()

    def _floor_at(self, i: int) -> int:
        A, B, C, D, d, den = self._lin
        a, b = A * i + B, C * i + D
        if b == 0:
            return a // den
        r = math.isqrt(b * b * d)
        return (a + (r if b > 0 else -r - 1)) // den

    def _compute(self, start, stop):
        if self.spec.variant == "floor":
            f = self._floor_at
        else:
            def f(i):
                # ceil(v) == floor(v) + 1 except at integers, which only occur for rational values
                A, B, C, D, d, den = self._lin
                if C * i + D == 0:
                    return -((-(A * i + B)) // den)
                return self._floor_at(i) + 1
        prev = f(start)
        out = []
        for i in range(start, stop):
            nxt = f(i + 1)
            out.append(nxt - prev)
            prev = nxt
        return out

    def __repr__(self):
        s = self.spec
        return f"Sturmian(gamma={s.gamma}, z={s.z}, variant={s.variant})"


class Periodic(SequenceSource):
    """Periodic extension of a nonempty word."""

    def __init__(self, word: Word | str | Sequence[int], alphabet_size: int | None = None):
        if isinstance(word, str):
            word = Word.parse(word, alphabet_size)
        elif not isinstance(word, Word):
            word = Word(tuple(word), alphabet_size or max(2, max(word) + 1))
        if not len(word):
            raise ValueError("periodic source needs a nonempty word")
        self.word = word
        self.alphabet_size = word.alphabet_size
        super().__init__()

    def _compute(self, start, stop):
        w, p = self.word.symbols, len(self.word)
        return [w[(i - 1) % p] for i in range(start, stop)]

    def __repr__(self):
        return f"Periodic({self.word})"


class PrefixExtended(SequenceSource):
    """An explicit finite prefix followed by padding (``zero`` or ``cycle``)."""

    def __init__(self, word: Word, padding: str = "zero"):
        if padding not in ("zero", "cycle"):
            raise ValueError("padding must be 'zero' or 'cycle'")
        if padding == "cycle" and not len(word):
            raise ValueError("cannot cycle an empty word")
        self.word, self.padding = word, padding
        self.alphabet_size = word.alphabet_size
        super().__init__()

    def _compute(self, start, stop):
        w, n = self.word.symbols, len(self.word)
        out = []
        for i in range(start, stop):
            if i <= n:
                out.append(w[i - 1])
            else:
                out.append(0 if self.padding == "zero" else w[(i - 1) % n])
        return out


class Product(SequenceSource):
    """Cartesian product of binary sequences, linearised as ``sum x^(j) 2^(j-1)``."""

    def __init__(self, components: Sequence[SequenceSource]):
        if not components:
            raise ValueError("product needs at least one component")
        for c in components:
            if c.alphabet_size != 2:
                raise ValueError("product components must be binary")
        self.components = tuple(components)
        self.alphabet_size = 2 ** len(self.components)
        super().__init__()

    def _compute(self, start, stop):
        acc = np.zeros(stop - start, dtype=np.int64)
        for j, c in enumerate(self.components):
            c._ensure(stop - 1)
            acc += np.frombuffer(bytes(c._cache[start - 1:stop - 1]), dtype=np.uint8).astype(np.int64) << j
        return acc.tolist()

    def __repr__(self):
        return f"Product({', '.join(map(repr, self.components))})"


class Shifted(SequenceSource):
    """``sigma^k`` applied to a source: ``y_i = x_{i+k}``."""

    def __init__(self, inner: SequenceSource, k: int):
        if k < 0:
            raise ValueError("shift must be non-negative")
        # flatten nested shifts
        if isinstance(inner, Shifted):
            inner, k = inner.inner, inner.k + k
        self.inner, self.k = inner, k
        self.alphabet_size = inner.alphabet_size
        super().__init__()

    def _compute(self, start, stop):
        self.inner._ensure(stop - 1 + self.k)
        return list(self.inner._cache[start - 1 + self.k:stop - 1 + self.k])

    def __repr__(self):
        return f"Shifted({self.inner!r}, {self.k})"


def shift(source: SequenceSource, k: int) -> SequenceSource:
    """The shifted sequence ``(sigma^k x)_i = x_{i+k}``."""
    if k == 0:
        return source
    return Shifted(source, k)


def generate_prefix(source: SequenceSource, L: int) -> Word:
    """``source[1..L]`` as a :class:`Word`."""
    return source.prefix(L)


# ---------------------------------------------------------------------------
# Word statistics
# ---------------------------------------------------------------------------


def _as_bytes(w) -> bytes:
    if isinstance(w, (bytes, bytearray)):
        return bytes(w)
    if isinstance(w, Word):
        return w.as_bytes()
    if isinstance(w, str):
        return Word.parse(w).as_bytes()
    return bytes(w)


def subword_complexity(w: Word | str | bytes, n: int) -> int:
    """Number of distinct length-``n`` windows of a finite word."""
    data = _as_bytes(w)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > len(data):
        raise ValueError("window exceeds word")
    return len({data[i:i + n] for i in range(len(data) - n + 1)})


@dataclass(frozen=True)
class WindowPolicy:
    initial: int = 1024
    cap: int = 10**6


@dataclass
class ComplexityProfile:
    """``n -> (count, window, saturated)`` from windowed factor counts."""

    entries: dict[int, tuple[int, int, bool]] = field(default_factory=dict)

    def count(self, n: int) -> int:
        return self.entries[n][0]

    def counts(self) -> list[int]:
        return [self.entries[n][0] for n in sorted(self.entries)]

    @property
    def all_saturated(self) -> bool:
        return all(e[2] for e in self.entries.values())

    def to_csv(self) -> str:
        lines = ["n,count,window,saturated"]
        for n in sorted(self.entries):
            c, L, s = self.entries[n]
            lines.append(f"{n},{c},{L},{str(s).lower()}")
        return "\n".join(lines) + "\n"


def complexity_profile(
    source: SequenceSource, n_max: int, window_policy: WindowPolicy | None = None
) -> ComplexityProfile:
    """Windowed factor counts for ``n = 1..n_max``.

    For each ``n`` the window doubles until the count agrees across one
    doubling (``saturated``) or the cap is reached.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    pol = window_policy or WindowPolicy()
    profile = ComplexityProfile()
    L0 = max(pol.initial, 1)
    for n in range(1, n_max + 1):
        L = max(L0, 2 * n)
        if L > pol.cap:
            L = pol.cap
        data = source.prefix_bytes(L)
        count = subword_complexity(data, n) if L >= n else 0
        saturated = False
        while 2 * L <= pol.cap:
            L2 = 2 * L
            c2 = subword_complexity(source.prefix_bytes(L2), n)
            L = L2
            if c2 == count:
                saturated = True
                break
            count = c2
        profile.entries[n] = (count, L, saturated)
        # the next n needs at least as long a window
        L0 = max(L0, L // 2)
    return profile


@dataclass(frozen=True)
class BalanceResult:
    balanced: bool
    n: int | None = None
    u: str | None = None
    v: str | None = None

    def __bool__(self):
        return self.balanced


def is_balanced(w: Word | str) -> BalanceResult:
    """Check every pair of equal-length windows differs by at most one 1.

    On failure the shortest offending length is reported with a window of
    minimal weight ``u`` and one of maximal weight ``v``.
    """
    if isinstance(w, str):
        w = Word.parse(w, 2)
    if w.alphabet_size != 2:
        raise ValueError("balance is defined for binary words")
    x = np.frombuffer(w.as_bytes(), dtype=np.uint8).astype(np.int64)
    cs = np.concatenate(([0], np.cumsum(x)))
    L = len(x)
    for n in range(1, L + 1):
        sums = cs[n:] - cs[:-n]
        lo, hi = sums.min(), sums.max()
        if hi - lo > 1:
            i, j = int(sums.argmin()), int(sums.argmax())
            s = str(w)
            return BalanceResult(False, n, s[i:i + n], s[j:j + n])
    return BalanceResult(True)


def one_frequency(w: Word | str) -> Fraction:
    """Exact proportion of 1s in a nonempty binary word."""
    if isinstance(w, str):
        w = Word.parse(w, 2)
    if not len(w):
        raise ValueError("frequency of an empty word")
    if w.alphabet_size != 2:
        raise ValueError("one_frequency needs a binary word")
    return Fraction(sum(w.symbols), len(w))


def recurs_in_window(w: Word | str, n: int) -> bool:
    """Every factor of length ``<= n`` of ``w`` occurs at least twice in ``w``.

    This is a finite stand-in for recurrence; it certifies nothing about the
    infinite sequence.
    """
    data = _as_bytes(w)
    for k in range(1, n + 1):
        seen: dict[bytes, int] = {}
        for i in range(len(data) - k + 1):
            f = data[i:i + k]
            seen[f] = seen.get(f, 0) + 1
        if any(c < 2 for c in seen.values()):
            return False
    return True


def from_iterable(symbols: Iterable[int], alphabet_size: int) -> Word:
    return Word(tuple(symbols), alphabet_size)
