"""Joint spectral radius bounds by exhaustive enumeration, and growth diagnostics.

Enumeration runs in float64 with numpy, one complete level of products at a
time.  The reported lower bound is then recomputed from the exact witness
product at high precision; the upper bound carries a relative rounding
radius.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .linalg import MatrixFamily, product_along, spectral_radius
from .precision import BigReal
from .words import SequenceSource, Word

__all__ = [
    "GrowthReport",
    "JsrBounds",
    "KronCheck",
    "extremality_diagnostic",
    "growth_report",
    "jsr_bounds",
    "kron_jsr_check",
]

log = logging.getLogger(__name__)

# float64 products of length k in dimension d lose at most ~k*d ulps in norm;
# this radius is far above that for every depth we enumerate
FLOAT_REL_RADIUS = 1e-11
DEFAULT_BUDGET = 5_000_000
DIAGNOSTIC_TOL = 1e-3
RENORM_EVERY = 32


@dataclass(frozen=True)
class JsrBounds:
    lower: BigReal
    upper: BigReal
    depth: int
    witness_word: Word
    partial: bool = False
    levels: tuple = ()  # (k, max rho^(1/k), max norm^(1/k)) per completed level

    def as_dict(self, digits: int = 12) -> dict:
        return {
            "lower": mpmath.nstr(self.lower.value, digits),
            # the upper bound comes from float64 norms; more digits would be noise
            "upper": mpmath.nstr(self.upper.value, min(digits, 15)),
            "lower_radius": mpmath.nstr(self.lower.radius, 3),
            "upper_radius": mpmath.nstr(self.upper.radius, 3),
            "depth": self.depth,
            "witness": str(self.witness_word),
            "partial": self.partial,
        }


def _batch_norms(P: np.ndarray) -> np.ndarray:
    if P.shape[-1] == 1:
        return np.abs(P[:, 0, 0])
    return np.linalg.norm(P, ord=2, axis=(1, 2))


def _batch_rho(P: np.ndarray) -> np.ndarray:
    if P.shape[-1] == 1:
        return np.abs(P[:, 0, 0])
    return np.abs(np.linalg.eigvals(P)).max(axis=1)


def _necklace_mask(keys: np.ndarray, m: int, k: int) -> np.ndarray:
    # keep words that are the lexicographically least of their rotations
    hi = m ** (k - 1)
    best = keys.copy()
    rot = keys.copy()
    for _ in range(k - 1):
        rot = (rot % hi) * m + rot // hi
        np.minimum(best, rot, out=best)
    return best == keys


def _decode(key: int, m: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        out.append(key % m)
        key //= m
    return tuple(reversed(out))


def jsr_bounds(
    fam: MatrixFamily,
    max_depth: int,
    budget: int = DEFAULT_BUDGET,
    digits: int = 30,
) -> JsrBounds:
    """Bracket the joint spectral radius from complete enumeration to ``max_depth``.

    lower = max over words of length ``k <= max_depth`` of rho(product)^(1/k),
    upper = min over ``k`` of max over words of ||product||^(1/k).
    Eigenvalues are skipped for products whose norm already sits below the
    current lower bound, and only one word per rotation class is examined.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    mats = fam.to_numpy()
    m, d = mats.shape[0], mats.shape[1]
    level = np.eye(d)[None, :, :]
    keys = np.zeros(1, dtype=np.int64)
    best_val, best_word = -1.0, (0,)
    upper = math.inf
    levels = []
    partial = False
    done = 0
    for k in range(1, max_depth + 1):
        count = m**k
        if done + count > budget:
            partial = True
            log.warning("product budget %d exhausted before depth %d", budget, k)
            break
        # word w + s has key key(w)*m + s; product A_s @ P_w
        nxt = np.einsum("sij,wjk->wsik", mats, level).reshape(count, d, d)
        keys = (keys[:, None] * m + np.arange(m)[None, :]).reshape(-1)
        done += count
        norms = _batch_norms(nxt)
        lvl_upper = float(norms.max()) ** (1.0 / k) if norms.max() > 0 else 0.0
        upper = min(upper, lvl_upper)

        cand = _necklace_mask(keys, m, k)
        thresh = best_val**k if best_val > 0 else -1.0
        cand &= norms > thresh * (1 - 1e-12)
        lvl_best = 0.0
        if cand.any():
            idx = np.nonzero(cand)[0]
            rhos = _batch_rho(nxt[idx]) ** (1.0 / k)
            lvl_best = float(rhos.max())
            if lvl_best > best_val * (1 + 1e-12):
                ties = idx[rhos >= lvl_best * (1 - 1e-12)]
                best_word = min(_decode(int(keys[i]), m, k) for i in ties)
                best_val = lvl_best
        levels.append((k, lvl_best, lvl_upper))
        level = nxt

    depth = levels[-1][0] if levels else 0
    if not levels:
        raise ValueError("budget too small for depth 1")
    with mpmath.workdps(digits + 10):
        witness = Word(best_word, m)
        rho = spectral_radius(product_along(fam, best_word), digits)
        lower = rho.root(len(best_word))
        up = mpmath.mpf(upper)
        upper_b = BigReal(up, up * FLOAT_REL_RADIUS)
    return JsrBounds(lower, upper_b, depth, witness, partial, tuple(levels))


@dataclass(frozen=True)
class KronCheck:
    family_bounds: JsrBounds
    component_bounds: tuple[JsrBounds, ...]
    product_lower: BigReal
    product_upper: BigReal

    @property
    def intersects(self) -> bool:
        f = self.family_bounds
        return f.lower.possibly_le(self.product_upper) and self.product_lower.possibly_le(f.upper)

    def as_dict(self) -> dict:
        f = self.family_bounds
        return {
            "family": [mpmath.nstr(f.lower.value, 12), mpmath.nstr(f.upper.value, 12)],
            "product": [mpmath.nstr(self.product_lower.value, 12), mpmath.nstr(self.product_upper.value, 12)],
            "intersects": self.intersects,
        }


def kron_jsr_check(pairs: Sequence[MatrixFamily], depth: int, budget: int = DEFAULT_BUDGET) -> KronCheck:
    """Compare brute-force bounds of the Kronecker family with products of pair bounds."""
    from .linalg import kron

    if not pairs:
        raise ValueError("need at least one pair")
    p = len(pairs)
    members = []
    for idx in range(2**p):
        M = pairs[0][idx & 1]
        for j in range(1, p):
            M = kron(M, pairs[j][(idx >> j) & 1])
        members.append(M)
    fam = MatrixFamily(tuple(members), tag="kron-check")
    fb = jsr_bounds(fam, depth, budget)
    comps = tuple(jsr_bounds(P, depth, budget) for P in pairs)
    lo, hi = BigReal.exact(1), BigReal.exact(1)
    for c in comps:
        lo = lo * c.lower
        hi = hi * c.upper
    return KronCheck(fb, comps, lo, hi)


# ---------------------------------------------------------------------------
# Growth along a sequence
# ---------------------------------------------------------------------------


@dataclass
class GrowthReport:
    n: np.ndarray
    log_norm: np.ndarray
    r_n: np.ndarray
    residual: np.ndarray
    rho_hat: float
    annihilated_at: int | None = None
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = ["n,log_norm,r_n,residual"]
        for n, ln, r, res in zip(self.n, self.log_norm, self.r_n, self.residual):
            lines.append(f"{int(n)},{ln:.12g},{r:.12g},{res:.12g}")
        return "\n".join(lines) + "\n"


def growth_report(
    fam: MatrixFamily, source: SequenceSource | Word | Sequence[int], N: int, rho_hat
) -> GrowthReport:
    """Norms of ``P_n = A_{x_n} ... A_{x_1}`` for ``n = 1..N`` against ``rho_hat**n``.

    The running product is rescaled every few steps and the scale is carried
    in log form, so ``N`` in the tens of thousands is fine.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    rho = float(rho_hat.value if isinstance(rho_hat, BigReal) else rho_hat)
    if rho <= 0:
        raise ValueError("rho_hat must be positive")
    if isinstance(source, SequenceSource):
        word = source.prefix_list(N)
    else:
        word = list(source)[:N]
        if len(word) < N:
            raise ValueError("finite word shorter than N")
    mats = fam.to_numpy()
    d = mats.shape[1]
    P = np.eye(d)
    log_scale = 0.0
    store = np.empty((N, d, d))
    scales = np.empty(N)
    dead = None
    for i, s in enumerate(word):
        P = mats[s] @ P
        if (i + 1) % RENORM_EVERY == 0:
            mx = np.abs(P).max()
            if mx == 0:
                dead = i + 1
                break
            P = P / mx
            log_scale += math.log(mx)
        store[i] = P
        scales[i] = log_scale
        if not P.any():
            dead = i + 1
            break
    n_ok = N if dead is None else dead - 1
    norms = _batch_norms(store[:n_ok]) if n_ok else np.empty(0)
    ns = np.arange(1, n_ok + 1)
    with np.errstate(divide="ignore"):
        log_norm = np.log(norms) + scales[:n_ok]
    r_n = np.exp(log_norm / ns) if n_ok else np.empty(0)
    residual = log_norm - ns * math.log(rho)
    rep = GrowthReport(ns, log_norm, r_n, residual, rho, dead)
    if n_ok:
        finite = np.isfinite(residual)
        slope = float(np.polyfit(ns[finite], log_norm[finite], 1)[0]) if finite.sum() > 1 else float("nan")
        # slope of the residuals: about log(growth rate) - log(rho_hat)
        rep.summary = {
            "min_residual": float(residual.min()),
            "max_residual": float(residual.max()),
            "band": float(residual.max() - residual.min()),
            "slope": slope - math.log(rho),
            "log_norm_slope": slope,
            "log_rho_hat": math.log(rho),
        }
    return rep


def extremality_diagnostic(
    fam: MatrixFamily,
    source: SequenceSource | Word,
    N: int,
    bounds: JsrBounds,
    tol: float = DIAGNOSTIC_TOL,
    drift_tol: float = 1.0,
) -> str:
    """Classify finite growth data against a JSR bracket.

    ``inconsistent`` when the late ``r_n`` all fall below ``lower - tol``;
    otherwise ``consistent-with-strong`` when the residuals against the lower
    bound set no new low in the second half of the run (deeper than
    ``drift_tol``), and ``consistent-with-weak-only`` when they do.  None of
    these verdicts is a proof.
    """
    lower = float(bounds.lower.value)
    rep = growth_report(fam, source, N, max(lower, 1e-300))
    if rep.annihilated_at is not None:
        return "inconsistent"
    half = len(rep.n) // 2
    late = rep.r_n[half:] if half else rep.r_n
    if late.max() < lower - tol:
        return "inconsistent"
    res = rep.residual
    if half and res[half:].min() < res[:half].min() - drift_tol:
        return "consistent-with-weak-only"
    return "consistent-with-strong"
