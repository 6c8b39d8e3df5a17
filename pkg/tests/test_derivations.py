"""
Tests for derivations, iterates and derivation sequences.
"""

import random
from fractions import Fraction

import pytest

from derivations import (
    DerivationSequence,
    DerivationSpec,
    IterateTerm,
    SumTerm,
    add_derivation_to_last,
    apply,
    canonical_sequence,
    iterate,
)
from errors import InputError
from field_core import get_field, parse_expr, random_element
from models import GammaVector

T = get_field(("t",))
ST = get_field(("s", "t"))


def q(text, field=T):
    return parse_expr(text, field)


def spec(value, field=T, **values):
    if field is T:
        return DerivationSpec.from_mapping(T, {"t": value})
    return DerivationSpec.from_mapping(field, values)


class TestApply:
    """Test the Leibniz extension of generator values."""

    def test_derivative_of_square(self):
        """Test d(t)=1 gives d(t^2)=2t."""
        assert apply(spec("1"), q("t^2")) == q("2*t")

    def test_derivative_of_reciprocal(self):
        """Test d(1/t) = -1/t^2."""
        assert apply(spec("1"), q("1/t")) == q("-1/t^2")

    def test_euler_derivation(self):
        """Test d(t)=t gives d(t^2)=2t^2."""
        assert apply(spec("t"), q("t^2")) == q("2*t^2")

    def test_vanishes_on_rationals(self):
        """Test any derivation kills rationals."""
        for value in ["1", "t^2", "1/(t+1)"]:
            assert apply(spec(value), q("5/7")).is_zero

    def test_quotient_rule(self):
        """Test d((t^2+1)/(t-1)) against the quotient rule."""
        expected = q("(2*t*(t-1) - (t^2+1))/(t-1)^2")

        assert apply(spec("1"), q("(t^2+1)/(t-1)")) == expected

    def test_two_generators(self):
        """Test a derivation of QQ(s, t) given by s -> -t, t -> s."""
        d = spec(None, ST, s="-t", t="s")

        assert apply(d, q("s^2 + t^2", ST)).is_zero
        assert apply(d, q("s*t", ST)) == q("s^2 - t^2", ST)

    def test_leibniz_rule_on_samples(self):
        """Test d(xy) = x d(y) + y d(x) on seeded random pairs."""
        d = spec(None, ST, s="t^2", t="1/s")
        rng = random.Random(17)
        for _ in range(30):
            x, y = random_element(ST, rng), random_element(ST, rng)
            assert apply(d, x * y) == x * apply(d, y) + y * apply(d, x)

    def test_additive_on_samples(self):
        """Test d(x + y) = d(x) + d(y) on seeded random pairs."""
        d = spec(None, ST, s="t^2", t="1/s")
        rng = random.Random(23)
        for _ in range(30):
            x, y = random_element(ST, rng), random_element(ST, rng)
            assert apply(d, x + y) == apply(d, x) + apply(d, y)

    def test_rational_homogeneity_on_samples(self):
        """Test d(c x) = c d(x) for rational c."""
        d = spec("t^2 + 1")
        rng = random.Random(29)
        for c in [Fraction(3), Fraction(-2, 7), Fraction(5, 9)]:
            for _ in range(10):
                x = random_element(T, rng)
                assert apply(d, x * c) == apply(d, x) * c

    def test_spec_requires_every_generator(self):
        """Test generator values must match the field exactly."""
        with pytest.raises(InputError):
            DerivationSpec.from_mapping(ST, {"t": "1"})
        with pytest.raises(InputError):
            DerivationSpec.from_mapping(T, {"t": "1", "u": "0"})

    def test_spec_from_another_field(self):
        """Test elements of a different field are refused."""
        with pytest.raises(InputError):
            apply(spec("1"), q("s", ST))


class TestIterate:
    """Test iterated derivations."""

    def test_second_derivative(self):
        """Test d^2(t^3) = 6t."""
        assert iterate(spec("1"), 2, q("t^3")) == q("6*t")

    def test_zero_order_is_identity(self):
        """Test d^0 = id."""
        x = q("(t+1)/(t-2)")

        assert iterate(spec("t^2"), 0, x) == x

    def test_iterate_of_square_field(self):
        """Test d(t)=t^2 gives d^2(t) = 2t^3."""
        assert iterate(spec("t^2"), 2, q("t")) == q("2*t^3")

    def test_semigroup_on_samples(self):
        """Test d^(a+b) = d^a after d^b for a, b <= 4."""
        d = spec("t^2")
        rng = random.Random(31)
        for _ in range(3):
            x = random_element(T, rng, max_degree=3)
            powers = [iterate(d, k, x) for k in range(9)]
            for a in range(5):
                for b in range(5):
                    assert powers[a + b] == iterate(d, a, powers[b])

    def test_negative_order(self):
        """Test negative orders are rejected."""
        with pytest.raises(InputError):
            iterate(spec("1"), -1, q("t"))


class TestSequences:
    """Test sequence terms and canonical sequences."""

    def test_canonical_factorial_is_iterates(self):
        """Test gamma(k)=k! gives e_k = d^k."""
        d = spec("t^2")
        sequence = canonical_sequence(d, GammaVector.factorial(4))
        x = q("(t+1)/t^2")

        for k in range(5):
            assert sequence.evaluate(k, x) == iterate(d, k, x)

    def test_canonical_unit_gamma(self):
        """Test gamma = 1 gives e_2(t^2) = 1."""
        sequence = canonical_sequence(spec("1"), GammaVector((1, 1, 1)))

        assert sequence.evaluate(2, q("t^2")) == 1

    def test_canonical_of_zero_derivation(self):
        """Test d = 0 gives e_k = 0 for k >= 1."""
        sequence = canonical_sequence(DerivationSpec.zero(T), GammaVector.factorial(3))

        assert all(value.is_zero for value in sequence.values(q("t^3 + 1/t"))[1:])

    def test_sequence_helpers(self):
        """Test n, prefix, extend and vanishes_on_rationals."""
        d = spec("1")
        sequence = canonical_sequence(d, GammaVector.factorial(3))

        assert sequence.n == 3
        assert sequence.prefix(1).n == 1
        assert sequence.prefix(2).extend(IterateTerm(d, 3)).values(q("t^3")) == sequence.values(q("t^3"))
        assert sequence.vanishes_on_rationals()

    def test_prefix_out_of_range(self):
        """Test prefix orders beyond n are rejected."""
        with pytest.raises(InputError):
            canonical_sequence(spec("1"), GammaVector.factorial(2)).prefix(3)

    def test_first_term_must_be_identity(self):
        """Test d_0 must be the identity term."""
        with pytest.raises(InputError):
            DerivationSequence(T, (IterateTerm(spec("1"), 1),))

    def test_sum_term(self):
        """Test rational combinations of terms."""
        d = spec("1")
        term = SumTerm(((1, IterateTerm(d, 2)), (Fraction(-1, 2), IterateTerm(d, 1))))

        assert term(q("t^3")) == q("6*t - 3/2*t^2")

    def test_add_derivation_to_last(self):
        """Test (id, d, d^2 + delta) changes only the last term."""
        d = spec("1")
        sequence = canonical_sequence(d, GammaVector.factorial(2))
        perturbed = add_derivation_to_last(sequence, spec("t"))

        assert perturbed.evaluate(1, q("t^2")) == q("2*t")
        assert perturbed.evaluate(2, q("t^2")) == q("2 + 2*t^2")

    def test_iterate_with_own_base(self):
        """Test an iterate term keeps the base it was built with."""
        term = IterateTerm(spec("t"), 2, Fraction(1, 2))

        assert term(q("t^3")) == q("9/2*t^3")
        assert term.to_dict()["base"]["values"] == {"t": "t"}
