import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sturmjsr.families import ALPHA_STAR, btv_pair
from sturmjsr.linalg import (
    Matrix,
    MatrixFamily,
    Poly,
    format_matrix,
    identity,
    kron,
    multiply,
    op_norm,
    parse_matrix,
    parse_scalar,
    product_along,
    spectral_radius,
    zeros,
)

A0 = Matrix([[1, 1], [0, 1]])
A1 = Matrix([[1, 0], [1, 1]])
with mpmath.workdps(80):
    PHI = (1 + mpmath.sqrt(5)) / 2
    SQRT5 = mpmath.sqrt(5)
    PHI_SQ = (3 + SQRT5) / 2


def close(a, b, tol):
    with mpmath.workdps(80):
        return abs(mpmath.mpf(a) - mpmath.mpf(b)) < tol


small_ints = st.integers(-6, 6)
mat2 = st.lists(st.lists(small_ints, min_size=2, max_size=2), min_size=2, max_size=2).map(Matrix)


def test_multiply_by_hand():
    assert multiply(A0, A1) == Matrix([[2, 1], [1, 1]])


def test_identity_and_zero():
    M = Matrix([[3, -1], [4, 2]])
    assert multiply(identity(2), M) == M
    assert multiply(zeros(2), M).is_zero()


def test_op_norm_identity():
    for d in (1, 3, 5):
        assert op_norm(identity(d)).contains(1)


def test_op_norm_unipotent_is_golden_ratio():
    n = op_norm(A0)
    assert close(n.value, PHI, 1e-40)
    assert n.contains(PHI)


def test_spectral_radius_examples():
    assert spectral_radius(A0).contains(1)
    r = spectral_radius(Matrix([[2, 1], [1, 1]]))
    assert close(r.value, PHI_SQ, 1e-40)
    assert spectral_radius(Matrix([[-7, 0], [0, 4]])).contains(7)


def test_spectral_radius_zero_and_nilpotent():
    assert spectral_radius(zeros(3)).value == 0
    N = Matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert spectral_radius(N).value == 0


def test_spectral_radius_repeated_root():
    # (x-2)^2 (x+1): squarefree reduction keeps the roots well conditioned
    M = Matrix([[2, 1, 0], [0, 2, 0], [0, 0, -1]])
    assert abs(spectral_radius(M).value - 2) < 1e-40


def test_spectral_radius_against_numpy():
    rng = random.Random(7)
    for _ in range(30):
        d = rng.randint(1, 5)
        M = Matrix([[rng.randint(-5, 5) for _ in range(d)] for _ in range(d)])
        ref = max(abs(np.linalg.eigvals(M.to_numpy())))
        assert abs(float(spectral_radius(M).value) - ref) < 1e-7 * max(1, ref)


def test_op_norm_against_numpy_svd():
    rng = random.Random(11)
    for _ in range(30):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        M = Matrix([[rng.randint(-5, 5) for _ in range(c)] for _ in range(r)])
        ref = np.linalg.norm(M.to_numpy(), 2)
        assert abs(float(op_norm(M).value) - ref) < 1e-9 * max(1, ref)


def test_kron_of_unipotents_is_reference_pattern():
    assert kron(A0, A0).entries == ((1, 1, 1, 1), (0, 1, 0, 1), (0, 0, 1, 1), (0, 0, 0, 1))


def test_kron_identity_is_block_diagonal():
    M = Matrix([[1, 2], [3, 4]])
    assert kron(identity(2), M).entries == ((1, 2, 0, 0), (3, 4, 0, 0), (0, 0, 1, 2), (0, 0, 3, 4))


@settings(max_examples=60)
@given(mat2, mat2, mat2, mat2)
def test_mixed_product_law(G1, G2, H1, H2):
    assert multiply(kron(G1, G2), kron(H1, H2)) == kron(multiply(G1, H1), multiply(G2, H2))


@settings(max_examples=40, deadline=None)
@given(mat2, mat2)
def test_norm_and_radius_multiply_under_kron(G, H):
    K = kron(G, H)
    with mpmath.workdps(40):
        n_prod = op_norm(G, 30).value * op_norm(H, 30).value
        assert abs(op_norm(K, 30).value - n_prod) <= 1e-20 * max(1, n_prod)
        r_prod = spectral_radius(G, 30).value * spectral_radius(H, 30).value
        assert abs(spectral_radius(K, 30).value - r_prod) <= 1e-8 * max(1, r_prod)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small_ints, min_size=3, max_size=3), min_size=3, max_size=3))
def test_norm_dominates_radius(rows):
    M = Matrix(rows)
    assert spectral_radius(M, 30).possibly_le(op_norm(M, 30))


def test_product_along_order():
    fam = btv_pair(1)
    # the first letter acts first: A_1 A_0
    assert product_along(fam, [0, 1]) == Matrix([[1, 1], [1, 2]])
    assert product_along(fam, []) == identity(2)
    assert product_along(fam, [0] * 9) == Matrix([[1, 9], [0, 1]])


def test_factored_products_stay_factored():
    a = Matrix(((1, 0), (1, 1)), ALPHA_STAR)
    P = multiply(a, a)
    assert P.is_factored
    assert P.scale == ALPHA_STAR * ALPHA_STAR
    assert P.pattern == ((1, 0), (2, 1))


def test_factored_norm_uses_constant_value():
    a = Matrix(((1, 0), (1, 1)), ALPHA_STAR)
    n = op_norm(a, 40)
    with mpmath.workdps(80):
        expect = PHI * mpmath.mpf("0.749326546330367557943961948091344672091327")
    assert close(n.value, expect, 1e-38)


def test_poly_arithmetic():
    x = Poly.symbol("alpha_star")
    y = Poly.symbol("alpha_double_star")
    assert (x * y) == (y * x)
    assert (x + 1) * (x - 1) == x * x - 1
    assert (x - x) == 0


def test_parse_scalar_variants():
    assert parse_scalar("3/4") == Fraction(3, 4)
    assert parse_scalar("0.5") == Fraction(1, 2)
    assert parse_scalar("alpha_star") == Poly.symbol("alpha_star")


def test_matrix_text_format_round_trip():
    assert format_matrix(A0) == "1,1;0,1"
    fac = Matrix(((1, 0), (1, 1)), ALPHA_STAR)
    assert format_matrix(fac) == "alpha_star * [1,0;1,1]"
    assert parse_matrix(format_matrix(fac)) == fac
    assert parse_matrix("1/2,0;0,-3") == Matrix([[Fraction(1, 2), 0], [0, -3]])


def test_family_rejects_mixed_dimensions():
    with pytest.raises(ValueError):
        MatrixFamily((identity(2), identity(3)))
