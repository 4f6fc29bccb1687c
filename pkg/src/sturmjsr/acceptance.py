"""End-to-end checks of the explicit constructions, one function per criterion.

Each check returns a :class:`CriterionResult` whose ``detail`` holds only
deterministic data, so two runs of a suite serialise identically.  Wall-clock
durations are kept separately in ``seconds``.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable

import mpmath

from .families import REFERENCE_D_PATTERNS, REFERENCE_D_SCALES, btv_pair, example_p2, jb_pair, kron_family, toy_family
from .jsr import extremality_diagnostic, growth_report, jsr_bounds, kron_jsr_check
from .lift import encode_word, numeric_survives, survives, verify_encode_product, verify_feqt
from .linalg import Matrix, identity, kron, multiply, op_norm, spectral_radius
from . import precision
from .precision import alpha_double_star, alpha_star, parse_quadratic
from .words import Periodic, Product, Sturmian, WindowPolicy, complexity_profile, subword_complexity

__all__ = ["CriterionResult", "CRITERIA", "run_suite"]

ALPHA_STAR_REFERENCE = "0.749326546330367557943961948091344672091327"
ALPHA_DSTAR_REFERENCE = "0.569279286584142330986485601616004654998409"
GOLDEN_GAMMA = "(3-sqrt5)/2"
BETA = "1-sqrt2/2"
SEED = 20240601


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def payload(self) -> dict:
        return {"id": self.id, "name": self.name, "passed": self.passed, "detail": self.detail}


def _significant_match(value: mpmath.mpf, ref_text: str, digits: int) -> bool:
    with mpmath.workdps(digits + 20):
        ref = mpmath.mpf(ref_text)
        return abs(value - ref) <= mpmath.mpf(10) ** (-digits) * abs(ref)


def check_constants() -> CriterionResult:
    detail, ok = {}, True
    # time a cold computation, not a cache hit
    precision._constant_cached.cache_clear()
    for name, fn, ref_text in (
        ("alpha_star", alpha_star, ALPHA_STAR_REFERENCE),
        ("alpha_double_star", alpha_double_star, ALPHA_DSTAR_REFERENCE),
    ):
        t0 = time.perf_counter()
        v = fn(40)
        dt = time.perf_counter() - t0
        match = _significant_match(v.value, ref_text, 40) and v.radius < mpmath.mpf(10) ** -40
        fast = dt < 10.0
        detail[name] = {"digits": v.digits(42), "match_40": match, "under_10s": fast}
        ok &= match and fast
    return CriterionResult(1, "constants to 40 significant digits", ok, detail)


def check_explicit_matrices() -> CriterionResult:
    D = kron_family(["alpha_star", "alpha_double_star"])
    d_ok = [M.pattern == REFERENCE_D_PATTERNS[k] and M.scale == REFERENCE_D_SCALES[k] for k, M in enumerate(D)]
    pair = jb_pair(D)
    I4 = identity(4)
    b_ok = pair.B0.rows == 28 and pair.B1.rows == 28
    for bi in range(7):
        for bj in range(7):
            blk0 = pair.B0.block(bi, bj, 4)
            want0 = I4 if bj == bi + 1 else Matrix([[0] * 4] * 4)
            blk1 = pair.B1.block(bi, bj, 4)
            want1 = D[bj].expand() if (bi >= 3 and bj == bi - 3) else Matrix([[0] * 4] * 4)
            b_ok &= blk0 == want0 and blk1 == want1
    unit_entries = sum(1 for r in pair.B0.entries for x in r if x == 1)
    ok = all(d_ok) and b_ok and unit_entries == 24
    return CriterionResult(
        2, "reference D0-D3 and 28x28 pair", ok,
        {"D_match": d_ok, "pair_blocks_match": b_ok, "B0_unit_entries": unit_entries},
    )


def check_sturmian_complexity() -> CriterionResult:
    t0 = time.perf_counter()
    pol = WindowPolicy(initial=1024, cap=10**6)
    g = Sturmian(gamma=parse_quadratic(GOLDEN_GAMMA))
    prof = complexity_profile(g, 100, pol)
    sturm_ok = all(prof.entries[n][0] == n + 1 and prof.entries[n][2] for n in range(1, 101))
    prod = Product([Sturmian(gamma=parse_quadratic(GOLDEN_GAMMA)), Sturmian(gamma=parse_quadratic(BETA))])
    pp = complexity_profile(prod, 10, pol)
    prod_ok = all(pp.entries[n][0] == (n + 1) ** 2 for n in range(1, 11))
    fast = time.perf_counter() - t0 < 60.0
    return CriterionResult(
        3, "Sturmian and product complexity", sturm_ok and prod_ok and fast,
        {"sturmian_n_plus_1_to_100": sturm_ok, "product_square_to_10": prod_ok,
         "product_counts": pp.counts(), "under_60s": fast},
    )


def _rel_close(a: mpmath.mpf, b: mpmath.mpf, rel: float) -> bool:
    scale = max(abs(a), abs(b))
    if scale == 0:
        return True
    return abs(a - b) <= rel * scale


def check_kronecker_laws(trials: int = 200) -> CriterionResult:
    rng = random.Random(SEED)

    def rand2():
        return Matrix([[rng.randint(-9, 9) for _ in range(2)] for _ in range(2)])

    mixed = norm = rho = 0
    for _ in range(trials):
        G1, G2, H1, H2 = rand2(), rand2(), rand2(), rand2()
        mixed += multiply(kron(G1, G2), kron(H1, H2)) == kron(multiply(G1, H1), multiply(G2, H2))
        K = kron(G1, G2)
        norm += _rel_close(op_norm(K, 30).value, op_norm(G1, 30).value * op_norm(G2, 30).value, 1e-8)
        rho += _rel_close(spectral_radius(K, 30).value,
                          spectral_radius(G1, 30).value * spectral_radius(G2, 30).value, 1e-8)
    ok = mixed == norm == rho == trials
    return CriterionResult(4, "Kronecker product laws", ok,
                           {"trials": trials, "mixed_exact": mixed, "norm_rel_1e-8": norm, "rho_rel_1e-8": rho})


def check_jsr_brackets() -> CriterionResult:
    phi = (1 + mpmath.sqrt(5)) / 2
    b = jsr_bounds(btv_pair(1), 12)
    btv_ok = b.lower.lo <= phi + b.lower.radius and phi <= b.upper.hi and (b.upper.value - b.lower.value) < 0.05
    toy = toy_family([2, 3])
    bA = jsr_bounds(toy, 12)
    bB = jsr_bounds(jb_pair(toy).family, 12)
    up2, lo2 = bB.upper * bB.upper, bB.lower * bB.lower
    lift_ok = bA.lower.possibly_le(up2) and lo2.possibly_le(bA.upper)
    kc = kron_jsr_check([btv_pair("alpha_star"), btv_pair("alpha_double_star")], 8)
    ok = btv_ok and lift_ok and kc.intersects
    return CriterionResult(5, "JSR brackets", ok, {
        "btv1": b.as_dict(10),
        "toy_A": bA.as_dict(10),
        "toy_B": bB.as_dict(10),
        "lift_interval_ok": lift_ok,
        "kron_check": kc.as_dict(),
    })


def check_block_identities() -> CriterionResult:
    rng = random.Random(SEED)
    toy = toy_family([2, 3])
    tp = jb_pair(toy)
    toy_ok = 0
    for _ in range(100):
        w = [rng.randrange(2) for _ in range(rng.randint(0, 8))]
        toy_ok += verify_feqt(toy, w, tp) and verify_encode_product(toy, w, tp)
    D, P = example_p2()
    p2_ok = 0
    for _ in range(20):
        w = [rng.randrange(4) for _ in range(rng.randint(0, 5))]
        p2_ok += verify_feqt(D, w, P) and verify_encode_product(D, w, P)
    return CriterionResult(6, "block-product identities", toy_ok == 100 and p2_ok == 20,
                           {"toy_words_ok": toy_ok, "example_p2_words_ok": p2_ok})


def check_support_automaton() -> CriterionResult:
    detail, ok = {}, True
    for m, vals in ((2, [2, 3]), (3, [2, 3, 5])):
        pair = jb_pair(toy_family(vals))
        checked = agree = 0
        for n in range(0, 3 * m + 1):
            for x in itertools.product((0, 1), repeat=n):
                for j in range(2 * m - 1):
                    checked += 1
                    agree += survives(x, m, j) == numeric_survives(pair, x, j)
        detail[f"m={m}"] = {"checked": checked, "agree": agree}
        ok &= checked == agree
    return CriterionResult(7, "support automaton vs exact products", ok, detail)


def check_one_per_block() -> CriterionResult:
    detail, ok = {}, True
    for m in range(1, 5):
        surviving = good = 0
        for n in range(0, 4 * m + 1):
            for x in itertools.product((0, 1), repeat=n):
                if not survives(x, m, m - 1):
                    continue
                surviving += 1
                blocks = [x[i:i + m] for i in range(0, n - n % m, m)]
                good += all(sum(b) == 1 for b in blocks)
        detail[f"m={m}"] = {"surviving_words": surviving, "one_per_block": good}
        ok &= surviving == good
    return CriterionResult(8, "one 1 per block on surviving words", ok, detail)


def check_complexity_transfer(Lz: int = 2**15) -> CriterionResult:
    z = Product([Sturmian(gamma=parse_quadratic(GOLDEN_GAMMA)), Sturmian(gamma=parse_quadratic(BETA))])
    x = encode_word(z, 4)
    zb = z.prefix_bytes(Lz)
    xb = x.prefix_bytes(4 * Lz)
    transfer = []
    for n in range(1, 11):
        pz_n = subword_complexity(zb, n)
        pz_n1 = subword_complexity(zb, n + 1)
        px_4n = subword_complexity(xb, 4 * n)
        px_4n1 = subword_complexity(xb, 4 * n + 1)
        transfer.append(px_4n >= pz_n and px_4n1 <= 4 * pz_n1)
    sandwich = []
    for n in range(1, 41):
        c = subword_complexity(xb, n)
        lo = (n // 4 + 1) ** 2
        hi = 4 * (math.ceil(n / 4) + 2) ** 2
        sandwich.append(lo <= c <= hi)
    ok = all(transfer) and all(sandwich)
    return CriterionResult(9, "complexity transfer through the encoding", ok,
                           {"transfer_n_1_10": all(transfer), "sandwich_n_1_40": all(sandwich), "window_z": Lz})


def check_growth() -> CriterionResult:
    phi = float((1 + mpmath.sqrt(5)) / 2)
    btv1 = btv_pair(1)
    rep = growth_report(btv1, Periodic("01"), 2000, phi)
    band_ok = rep.summary["band"] < 2
    b1 = jsr_bounds(btv1, 12)
    verdict0 = extremality_diagnostic(btv1, Periodic("0"), 2000, b1)
    fam = btv_pair("alpha_star")
    bs = jsr_bounds(fam, 12)
    g = Sturmian(gamma=parse_quadratic(GOLDEN_GAMMA))
    rs = growth_report(fam, g, 5000, bs.lower)
    drift = float(abs(rs.r_n[2499:] - rs.r_n[-1]).max())
    ok = band_ok and verdict0 == "inconsistent" and drift < 1e-2
    return CriterionResult(10, "growth diagnostics", ok, {
        "periodic_01_band": round(rep.summary["band"], 9),
        "periodic_0_verdict": verdict0,
        "sturmian_r_n_drift_lt_1e-2": drift < 1e-2,
    })


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: check_constants,
    2: check_explicit_matrices,
    3: check_sturmian_complexity,
    4: check_kronecker_laws,
    5: check_jsr_brackets,
    6: check_block_identities,
    7: check_support_automaton,
    8: check_one_per_block,
    9: check_complexity_transfer,
    10: check_growth,
}


def run_suite(ids=None) -> list[CriterionResult]:
    out = []
    for i in ids or sorted(CRITERIA):
        t0 = time.perf_counter()
        res = CRITERIA[i]()
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out
