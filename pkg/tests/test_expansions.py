import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polarfractal.expansions import (ExpansionSpec, Variant, bits_of_index,
                                     complement_expansion, digit_density,
                                     expansion_to_real, hamming_weight,
                                     is_dyadic, is_simply_normal,
                                     parse_rational, real_to_expansion,
                                     row_index)

rationals = st.builds(
    lambda p, q: Fraction(p % (q + 1), q),
    st.integers(min_value=0, max_value=10**6),
    st.integers(min_value=1, max_value=10**6))


class TestRealToExpansion:
    def test_half_terminating(self):
        spec = real_to_expansion(Fraction(1, 2), Variant.TERMINATING)
        assert (spec.preamble, spec.period) == ((1,), ())

    def test_half_non_terminating(self):
        spec = real_to_expansion(Fraction(1, 2), Variant.NON_TERMINATING)
        assert (spec.preamble, spec.period) == ((0,), (1,))

    def test_two_thirds(self):
        spec = real_to_expansion(Fraction(2, 3))
        assert (spec.preamble, spec.period) == ((), (1, 0))

    def test_one_seventh(self):
        spec = real_to_expansion(Fraction(1, 7))
        assert (spec.preamble, spec.period) == ((), (0, 0, 1))

    def test_one_sixth(self):
        spec = real_to_expansion(Fraction(1, 6))
        assert (spec.preamble, spec.period) == ((0,), (0, 1))

    def test_endpoints(self):
        for variant in Variant:
            assert real_to_expansion(Fraction(0), variant) == ExpansionSpec((), ())
            assert real_to_expansion(Fraction(1), variant) == ExpansionSpec((), (1,))

    def test_domain_error(self):
        with pytest.raises(ValueError):
            real_to_expansion(Fraction(3, 2))


class TestExpansionToReal:
    def test_known_values(self):
        assert expansion_to_real(ExpansionSpec((), (0, 1))) == Fraction(1, 3)
        assert expansion_to_real(ExpansionSpec((1,), ())) == Fraction(1, 2)
        assert expansion_to_real(ExpansionSpec((), (1, 0))) == Fraction(2, 3)
        assert expansion_to_real(ExpansionSpec((), (1,))) == 1
        assert expansion_to_real(ExpansionSpec((), ())) == 0


def test_canonicalization():
    # Period reduced to its minimal repeating unit.
    assert ExpansionSpec((), (0, 1, 0, 1)).period == (0, 1)
    # All-zero period collapses to the terminating form.
    assert ExpansionSpec((1,), (0, 0)) == ExpansionSpec((1,), ())
    # Preamble tail absorbed into the period rotation.
    assert ExpansionSpec((1, 0), (1, 0)) == ExpansionSpec((), (1, 0))
    # Trailing zeros stripped from terminating forms.
    assert ExpansionSpec((1, 0, 0), ()).preamble == (1,)
    # All-ones tail after absorption is the x = 1 form.
    assert ExpansionSpec((1,), (1,)) == ExpansionSpec((), (1,))


def test_round_trip_random_rationals():
    rng = random.Random(1234)
    for _ in range(1000):
        q = rng.randrange(1, 10**6)
        p = rng.randrange(0, q + 1)
        x = Fraction(p, q)
        for variant in Variant:
            assert expansion_to_real(real_to_expansion(x, variant)) == x


@given(rationals)
def test_round_trip_property(x):
    assert expansion_to_real(real_to_expansion(x)) == x


@given(rationals)
def test_complement_is_one_minus_x(x):
    spec = real_to_expansion(x)
    assert expansion_to_real(complement_expansion(spec)) == 1 - x


def test_dyadic_forms_complement_each_other():
    # Flipping the digits of one dyadic expansion yields the other form of
    # the complement.
    x = Fraction(3, 8)
    term = real_to_expansion(x, Variant.TERMINATING)
    assert complement_expansion(term) == real_to_expansion(
        1 - x, Variant.NON_TERMINATING)


def _multiplicative_order(base: int, modulus: int) -> int:
    value, order = base % modulus, 1
    while value != 1:
        value = value * base % modulus
        order += 1
    return order


def test_period_divides_order_of_two():
    rng = random.Random(99)
    for _ in range(200):
        q = rng.randrange(3, 5000)
        p = rng.randrange(1, q)
        x = Fraction(p, q)
        if is_dyadic(x):
            continue
        odd = x.denominator
        while odd % 2 == 0:
            odd //= 2
        spec = real_to_expansion(x)
        assert _multiplicative_order(2, odd) % len(spec.period) == 0


class TestRowIndex:
    def test_examples(self):
        assert row_index([1, 1]) == 3
        assert row_index([]) == 0

    @given(st.lists(st.integers(min_value=0, max_value=1), max_size=20))
    def test_prepend_zero_keeps_index(self, bits):
        assert row_index([0] + bits) == row_index(bits)

    @given(st.lists(st.integers(min_value=0, max_value=1), max_size=20))
    def test_prepend_one_adds_msb(self, bits):
        assert row_index([1] + bits) == row_index(bits) + (1 << len(bits))

    @given(st.integers(min_value=0, max_value=2**16 - 1))
    def test_bits_round_trip(self, h):
        assert row_index(bits_of_index(h, 16)) == h


def test_hamming_weight():
    assert hamming_weight([]) == 0
    assert hamming_weight([1, 0, 1]) == 2
    assert hamming_weight([1] * 9) == 9


class TestSimpleNormality:
    def test_one_third_simply_normal(self):
        assert is_simply_normal(real_to_expansion(Fraction(1, 3)))

    def test_one_seventh_not(self):
        assert not is_simply_normal(real_to_expansion(Fraction(1, 7)))

    def test_dyadics_never(self):
        for x in (Fraction(1, 2), Fraction(3, 4), Fraction(5, 8)):
            for variant in Variant:
                assert not is_simply_normal(real_to_expansion(x, variant))

    def test_density_values(self):
        assert digit_density(real_to_expansion(Fraction(1, 7))) == Fraction(1, 3)
        assert digit_density(ExpansionSpec((1, 1), ())) == 0


class TestParsing:
    def test_fraction_and_decimal(self):
        assert parse_rational("2/3") == Fraction(2, 3)
        assert parse_rational("0.25") == Fraction(1, 4)
        assert parse_rational("1") == 1

    @pytest.mark.parametrize("bad", ["3/2", "-0.1", "abc", "1/0"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_str_format():
    assert str(real_to_expansion(Fraction(1, 3))) == "0.[01]"
    assert str(real_to_expansion(Fraction(1, 2))) == "0.1"
    assert str(real_to_expansion(Fraction(1, 2), Variant.NON_TERMINATING)) == "0.0[1]"
    assert str(real_to_expansion(Fraction(1, 6))) == "0.0[01]"
