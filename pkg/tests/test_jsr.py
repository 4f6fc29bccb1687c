import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sturmjsr.families import btv_pair, jb_pair, toy_family
from sturmjsr.jsr import extremality_diagnostic, growth_report, jsr_bounds, kron_jsr_check
from sturmjsr.linalg import Matrix, MatrixFamily
from sturmjsr.precision import parse_quadratic
from sturmjsr.words import Periodic, Sturmian

PHI = (1 + math.sqrt(5)) / 2


def _bruteforce(mats, depth):
    # independent oracle: plain recursion over all words
    lower, upper = 0.0, math.inf
    level = [np.eye(mats[0].shape[0])]
    for k in range(1, depth + 1):
        level = [A @ P for P in level for A in mats]
        lower = max(lower, max(max(abs(np.linalg.eigvals(P))) for P in level) ** (1 / k))
        upper = min(upper, max(np.linalg.norm(P, 2) for P in level) ** (1 / k))
    return lower, upper


def test_singleton():
    b = jsr_bounds(MatrixFamily((Matrix([[2]]),)), 1)
    assert b.lower.contains(2) and b.upper.contains(2)


def test_btv_one_depth_12():
    b = jsr_bounds(btv_pair(1), 12)
    assert b.lower.value <= PHI + 1e-12 <= b.upper.value + 2e-12
    assert float(b.upper.value - b.lower.value) < 0.05
    assert str(b.witness_word) == "01"
    with mpmath.workdps(40):
        assert b.lower.contains(mpmath.sqrt((3 + mpmath.sqrt(5)) / 2))


def test_lifted_toy_bounds():
    b = jsr_bounds(jb_pair(toy_family([2, 3])).family, 12)
    assert b.lower.value <= math.sqrt(3) + 1e-12 <= b.upper.value
    assert abs(float(b.lower.value) - math.sqrt(3)) < 1e-12


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=8, max_size=8), st.integers(1, 6))
def test_against_bruteforce(entries, depth):
    mats = [Matrix([entries[0:2], entries[2:4]]), Matrix([entries[4:6], entries[6:8]])]
    fam = MatrixFamily(tuple(mats))
    lo, up = _bruteforce([M.to_numpy() for M in mats], depth)
    b = jsr_bounds(fam, depth)
    assert abs(float(b.lower.value) - lo) <= 1e-7 * max(1, lo)
    assert abs(float(b.upper.value) - up) <= 1e-9 * max(1, up)


@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=8, max_size=8))
def test_depth_refinement_is_monotone(entries):
    fam = MatrixFamily((Matrix([entries[0:2], entries[2:4]]), Matrix([entries[4:6], entries[6:8]])))
    prev = None
    for depth in range(1, 7):
        b = jsr_bounds(fam, depth)
        assert b.lower.value <= b.upper.value * (1 + 1e-9) + 1e-12
        if prev is not None:
            assert b.lower.value >= prev.lower.value * (1 - 1e-12)
            assert b.upper.value <= prev.upper.value * (1 + 1e-12)
        prev = b


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 5), st.lists(st.integers(-3, 3), min_size=8, max_size=8))
def test_scaling_law(c, entries):
    fam = MatrixFamily((Matrix([entries[0:2], entries[2:4]]), Matrix([entries[4:6], entries[6:8]])))
    a, b = jsr_bounds(fam, 5), jsr_bounds(fam.scaled(c), 5)
    assert abs(float(b.lower.value) - c * float(a.lower.value)) <= 1e-8 * max(1, c * float(a.lower.value))
    assert abs(float(b.upper.value) - c * float(a.upper.value)) <= 1e-8 * max(1, c * float(a.upper.value))


def test_budget_marks_partial():
    b = jsr_bounds(btv_pair(1), 12, budget=100)
    assert b.partial and b.depth == 5


def test_kron_check_p1():
    kc = kron_jsr_check([btv_pair(1)], 6)
    assert kc.intersects
    assert kc.product_lower.overlaps(kc.family_bounds.lower)


def test_kron_check_constants():
    kc = kron_jsr_check([btv_pair("alpha_star"), btv_pair("alpha_double_star")], 8)
    assert kc.intersects


def test_kron_check_ones():
    kc = kron_jsr_check([btv_pair(1), btv_pair(1)], 10)
    phi2 = PHI**2
    for lo, hi in ((kc.family_bounds.lower.value, kc.family_bounds.upper.value),
                   (kc.product_lower.value, kc.product_upper.value)):
        assert lo <= phi2 + 1e-9 and phi2 <= hi + 1e-9


def test_growth_periodic_witness_band():
    rep = growth_report(btv_pair(1), Periodic("01"), 2000, PHI)
    assert rep.summary["band"] < 2


def test_growth_unipotent_slope():
    rep = growth_report(btv_pair(1), Periodic("0"), 100, PHI)
    assert rep.summary["slope"] < 0
    # ||A_0^n|| grows linearly; compare with the closed form at n = 100
    n = 100
    exact = math.sqrt((n * n + 2 + n * math.sqrt(n * n + 4)) / 2)
    assert abs(rep.log_norm[-1] - math.log(exact)) < 1e-9


def test_growth_identity_family_residuals_zero():
    fam = MatrixFamily((Matrix([[1, 0], [0, 1]]), Matrix([[1, 0], [0, 1]])))
    rep = growth_report(fam, Periodic("0110"), 300, 1.0)
    assert np.allclose(rep.residual, 0)


def test_growth_csv_header():
    rep = growth_report(btv_pair(1), Periodic("01"), 3, PHI)
    assert rep.to_csv().splitlines()[0] == "n,log_norm,r_n,residual"


def test_growth_annihilation():
    fam = MatrixFamily((Matrix([[0, 1], [0, 0]]), Matrix([[1, 0], [0, 1]])))
    rep = growth_report(fam, Periodic("0"), 10, 1.0)
    assert rep.annihilated_at == 2


def test_growth_rejects_bad_rho():
    with pytest.raises(ValueError):
        growth_report(btv_pair(1), Periodic("0"), 10, 0.0)


def test_diagnostic_verdicts():
    fam = btv_pair(1)
    b = jsr_bounds(fam, 12)
    assert extremality_diagnostic(fam, Periodic("01"), 2000, b) == "consistent-with-strong"
    assert extremality_diagnostic(fam, Periodic("0"), 2000, b) == "inconsistent"
    two = MatrixFamily((Matrix([[2, 0], [0, 2]]),))
    assert extremality_diagnostic(two, Periodic("0", 1), 500, jsr_bounds(two, 3)) == "consistent-with-strong"


def test_sturmian_growth_settles():
    fam = btv_pair("alpha_star")
    b = jsr_bounds(fam, 12)
    rep = growth_report(fam, Sturmian(gamma=parse_quadratic("(3-sqrt5)/2")), 5000, b.lower)
    assert float(np.abs(rep.r_n[2499:] - rep.r_n[-1]).max()) < 1e-2
