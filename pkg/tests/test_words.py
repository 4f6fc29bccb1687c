from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sturmjsr.precision import parse_quadratic
from sturmjsr.words import (
    Periodic,
    PrefixExtended,
    Product,
    Sturmian,
    SturmianSpec,
    WindowPolicy,
    Word,
    complexity_profile,
    generate_prefix,
    is_balanced,
    one_frequency,
    recurs_in_window,
    shift,
    subword_complexity,
    symbol_at,
)

GOLDEN = parse_quadratic("(3-sqrt5)/2")
BETA = parse_quadratic("1-sqrt2/2")


def golden():
    return Sturmian(gamma=GOLDEN)


def _mp_sturmian(gamma_expr, L, z=0):
    # oracle: floors evaluated with 60 significant digits
    with mpmath.workdps(60):
        g = gamma_expr()
        return [int(mpmath.floor((i + 1) * g + z) - mpmath.floor(i * g + z)) for i in range(1, L + 1)]


def test_symbol_at_first_two():
    spec = SturmianSpec(GOLDEN)
    assert symbol_at(spec, 1) == 0
    assert symbol_at(spec, 2) == 1


def test_small_gamma_starts_with_zero():
    spec = SturmianSpec(parse_quadratic("sqrt2-1"))
    assert symbol_at(spec, 1) == 0


def test_prefix_examples():
    assert generate_prefix(Periodic("01"), 5).symbols == (0, 1, 0, 1, 0)
    assert generate_prefix(golden(), 6).symbols == (0, 1, 0, 0, 1, 0)


def test_product_of_constant_words():
    # component 1 is the low bit: (0, 1) -> 0 + 1*2
    p = Product([Periodic("0"), Periodic("1")])
    assert generate_prefix(p, 3).symbols == (2, 2, 2)
    assert p.alphabet_size == 4


def test_sturmian_matches_high_precision_oracle():
    got = golden().prefix_list(3000)
    assert got == _mp_sturmian(lambda: (3 - mpmath.sqrt(5)) / 2, 3000)


def test_sturmian_beta_with_offset_matches_oracle():
    z = Fraction(1, 3)
    got = Sturmian(gamma=BETA, z=parse_quadratic("1/3")).prefix_list(2000)
    assert got == _mp_sturmian(lambda: 1 - mpmath.sqrt(2) / 2, 2000, z=mpmath.mpf(z.numerator) / z.denominator)


def test_ceil_variant_differs_only_by_coding():
    f = Sturmian(gamma=GOLDEN).prefix_list(500)
    c = Sturmian(gamma=GOLDEN, variant="ceil").prefix_list(500)
    # with z = 0 and irrational gamma, i*gamma is never an integer for i >= 1
    assert f == c


def test_spec_validation():
    with pytest.raises(ValueError):
        SturmianSpec(parse_quadratic("1/2"))
    with pytest.raises(ValueError):
        SturmianSpec(parse_quadratic("sqrt2"))
    with pytest.raises(ValueError):
        SturmianSpec(GOLDEN, parse_quadratic("sqrt3"))


def test_sturmian_far_index_is_exact():
    s = golden()
    with mpmath.workdps(60):
        g = (3 - mpmath.sqrt(5)) / 2
        i = 10**15
        expect = int(mpmath.floor((i + 1) * g) - mpmath.floor(i * g))
    assert symbol_at(s.spec, i) == expect


def test_subword_complexity_examples():
    assert subword_complexity(Periodic("01").prefix(100), 5) == 2
    assert subword_complexity(golden().prefix(10**4), 10) == 11
    assert subword_complexity("000", 3) == 1
    with pytest.raises(ValueError):
        subword_complexity("01", 3)


def _naive_complexity(s, n):
    return len({tuple(s[i:i + n]) for i in range(len(s) - n + 1)})


@given(st.lists(st.integers(0, 2), min_size=1, max_size=60), st.integers(1, 10))
def test_subword_complexity_matches_naive(symbols, n):
    n = min(n, len(symbols))
    assert subword_complexity(Word(tuple(symbols), 3), n) == _naive_complexity(symbols, n)


def test_profile_golden_is_n_plus_one():
    prof = complexity_profile(golden(), 20)
    assert prof.counts() == [n + 1 for n in range(1, 21)]
    assert prof.all_saturated


def test_profile_product_is_square():
    prof = complexity_profile(Product([Sturmian(gamma=GOLDEN), Sturmian(gamma=BETA)]), 10, WindowPolicy(cap=10**6))
    assert prof.counts() == [(n + 1) ** 2 for n in range(1, 11)]


def test_profile_periodic():
    prof = complexity_profile(Periodic("0110"), 6)
    assert prof.count(6) == 4


def test_profile_csv_header():
    csv = complexity_profile(Periodic("01"), 2).to_csv()
    assert csv.splitlines()[0] == "n,count,window,saturated"
    assert csv.splitlines()[1].startswith("1,2,")


def test_profile_cap_reports_unsaturated():
    prof = complexity_profile(golden(), 3, WindowPolicy(initial=8, cap=8))
    assert not prof.all_saturated


def test_balance_examples():
    assert is_balanced(golden().prefix(500))
    r = is_balanced("0011")
    assert not r.balanced
    assert (r.n, r.u, r.v) == (2, "00", "11")
    assert is_balanced("0101")


def test_frequency_examples():
    assert one_frequency("0101") == Fraction(1, 2)
    assert one_frequency("000") == 0
    assert abs(float(one_frequency(golden().prefix(10**4))) - 0.381966) < 1e-3


def test_shift_examples():
    assert shift(Periodic("01"), 1).prefix_list(4) == [1, 0, 1, 0]
    s = golden()
    assert shift(s, 0).prefix_list(50) == s.prefix_list(50)


@given(st.integers(0, 30), st.integers(0, 30))
def test_shift_composes(a, b):
    s = golden()
    assert shift(shift(s, a), b).prefix_list(40) == shift(s, a + b).prefix_list(40)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 10**6), st.integers(0, 10**6), st.integers(1, 400))
def test_sturmian_prefixes_balanced(num, zn, L):
    # gamma = (num mod 997) / 997 * ... keeps it irrational by adding sqrt2/1000
    g = parse_quadratic(f"{num % 997}/1000 + sqrt2/1000")
    z = parse_quadratic(f"{zn}/1000000")
    w = Sturmian(gamma=g, z=z).prefix(L)
    assert is_balanced(w)


def test_prefix_extended_padding():
    w = Word.parse("011")
    assert PrefixExtended(w).prefix_list(5) == [0, 1, 1, 0, 0]
    assert PrefixExtended(w, "cycle").prefix_list(7) == [0, 1, 1, 0, 1, 1, 0]


def test_word_serialisation():
    assert str(Word((1, 0, 3), 4)) == "103"
    assert str(Word((11, 0), 12)) == "11,0"
    assert Word.parse("11,0", 12).symbols == (11, 0)


def test_recurrence_window():
    assert recurs_in_window(golden().prefix(200), 5)
    assert not recurs_in_window("0111111", 2)
