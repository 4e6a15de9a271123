"""Tests for Hilbert symbols, local square classes and the solvability oracle."""

import random
from fractions import Fraction

import pytest

from selmer_pairing.exceptions import InvalidInputError, PrecisionExhaustedError
from selmer_pairing.models import AlgebraClass, Place
from selmer_pairing.symbols import (
    algebra_symbol,
    hilbert_symbol,
    inject_symbol_fault,
    is_local_square,
    local_class,
    reciprocity_check,
    reciprocity_places,
    smallest_nonresidue,
    solvability_oracle,
    solvability_oracle_auto,
)

REAL = Place.real()
PLACES = [REAL] + [Place.finite(p) for p in (2, 3, 5, 7, 11, 13)]


def _random_rational(rng, bound=200):
    return Fraction(rng.choice([-1, 1]) * rng.randint(1, bound), rng.randint(1, bound))


class TestPlace:
    """Tests for the Place model."""

    def test_labels(self):
        """Test labels and ordering keys."""
        assert REAL.label == "inf"
        assert Place.finite(7).label == "7"
        assert Place.finite(2).is_dyadic
        assert sorted([Place.finite(3), REAL, Place.finite(2)], key=lambda v: v.sort_key)[0] == REAL

    def test_composite_prime_rejected(self):
        """Test that finite places need a prime."""
        with pytest.raises(ValueError):
            Place.finite(15)


class TestHilbertSymbol:
    """Tests for the closed-form Hilbert symbol."""

    def test_documented_values(self):
        """Test the documented examples."""
        for v in PLACES:
            assert hilbert_symbol(1, 7, v) == 1
        assert hilbert_symbol(-1, -1, REAL) == -1
        assert hilbert_symbol(-1, -1, Place.finite(2)) == -1
        assert hilbert_symbol(2, 7, Place.finite(7)) == 1

    def test_odd_prime_values(self):
        """Test values determined by a single Legendre symbol."""
        assert hilbert_symbol(2, 5, Place.finite(5)) == -1
        assert hilbert_symbol(5, 5, Place.finite(5)) == 1  # (5, 5) = (5, -1) and -1 is a square mod 5
        assert hilbert_symbol(3, 3, Place.finite(3)) == -1  # (3, -1)_3 = (-1/3)
        assert hilbert_symbol(2, 3, Place.finite(2)) == -1

    def test_zero_rejected(self):
        """Test that zero arguments are rejected."""
        with pytest.raises(InvalidInputError, match="nonzero"):
            hilbert_symbol(0, 3, REAL)

    def test_symmetry_and_bilinearity(self):
        """Test symmetry, bilinearity and square invariance on random arguments."""
        rng = random.Random(3)
        for _ in range(150):
            a, a2, b = _random_rational(rng), _random_rational(rng), _random_rational(rng)
            c = _random_rational(rng)
            for v in PLACES:
                assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)
                assert hilbert_symbol(a * a2, b, v) == hilbert_symbol(a, b, v) * hilbert_symbol(a2, b, v)
                assert hilbert_symbol(a * c * c, b, v) == hilbert_symbol(a, b, v)

    def test_unit_triviality(self):
        """Test that odd-prime symbols of units are trivial."""
        rng = random.Random(5)
        for _ in range(100):
            p = rng.choice([3, 5, 7, 11, 13])
            a, b = rng.randint(1, 500), rng.randint(1, 500)
            if a % p and b % p:
                assert hilbert_symbol(a, b, Place.finite(p)) == 1


class TestAlgebraSymbol:
    """Tests for symbols on the split algebra."""

    def test_identity(self):
        """Test that the identity class pairs trivially."""
        delta = AlgebraClass.from_reps(-1, 2, -2)
        for v in PLACES:
            assert algebra_symbol(AlgebraClass.identity(), delta, v) == 1

    def test_documented_values(self):
        """Test the documented real-place values."""
        g = AlgebraClass.from_reps(-1, -1, 1)
        assert algebra_symbol(g, g, REAL) == 1
        minus = AlgebraClass.from_reps(-1, -1, -1)
        assert algebra_symbol(minus, minus, REAL) == -1


class TestReciprocity:
    """Tests for the global product formula."""

    def test_documented_values(self):
        """Test the documented pairs."""
        assert reciprocity_check(-1, -1) == 1
        assert reciprocity_check(1, 30) == 1
        assert reciprocity_check(2, 5) == 1

    def test_place_set(self):
        """Test that the place set covers 2ab."""
        labels = [v.label for v in reciprocity_places(Fraction(3, 5), 7)]
        assert labels == ["inf", "2", "3", "5", "7"]

    def test_random_pairs(self):
        """Test reciprocity for seeded random pairs."""
        rng = random.Random(0)
        for _ in range(200):
            a, b = _random_rational(rng, 10**4), _random_rational(rng, 10**4)
            assert reciprocity_check(a, b) == 1

    def test_injected_fault_breaks_reciprocity(self):
        """Test that the fault hook flips symbols at the chosen prime."""
        with inject_symbol_fault(5):
            assert reciprocity_check(2, 5) == -1
        assert reciprocity_check(2, 5) == 1


class TestLocalSquares:
    """Tests for local squares and square-class representatives."""

    def test_is_local_square(self):
        """Test squares in Q_2, Q_7 and R."""
        assert is_local_square(17, Place.finite(2))
        assert not is_local_square(5, Place.finite(2))
        assert is_local_square(2, Place.finite(7))
        assert is_local_square(Fraction(1, 4), Place.finite(2))
        assert not is_local_square(-1, REAL)

    def test_local_class_representatives(self):
        """Test the small representatives of local classes."""
        assert local_class(3, Place.finite(2)).rep == 3
        assert local_class(7, Place.finite(2)).rep == -1
        assert local_class(14, Place.finite(2)).rep == -2
        assert local_class(12, Place.finite(2)).rep == 3
        assert local_class(18, Place.finite(3)).rep == 2
        assert local_class(-2, REAL).rep == -1

    def test_local_class_matches_symbol(self):
        """Test that replacing q by its local representative keeps every symbol."""
        rng = random.Random(9)
        for _ in range(100):
            q, b = _random_rational(rng), _random_rational(rng)
            for v in PLACES:
                assert hilbert_symbol(local_class(q, v).rep, b, v) == hilbert_symbol(q, b, v)

    def test_smallest_nonresidue(self):
        """Test the least quadratic non-residue."""
        assert smallest_nonresidue(3) == 2
        assert smallest_nonresidue(7) == 3
        assert smallest_nonresidue(71) == 7


class TestSolvabilityOracle:
    """Tests for the residue-disc solvability oracle."""

    def test_documented_values(self):
        """Test the documented examples."""
        assert solvability_oracle(5, 3, REAL) == 1
        assert solvability_oracle(-1, -1, Place.finite(2), 3) == -1
        assert solvability_oracle(2, 7, Place.finite(7), 2) == 1

    def test_insufficient_precision_is_an_error(self):
        """Test that an undecided search raises instead of answering."""
        with pytest.raises(PrecisionExhaustedError):
            solvability_oracle(-1, -1, Place.finite(2), 1)

    def test_agrees_with_formula(self):
        """Test oracle equivalence on small primes."""
        rng = random.Random(1)
        for p in (2, 3, 5, 7, 11):
            v = Place.finite(p)
            for _ in range(40):
                a, b = _random_rational(rng, 10**3), _random_rational(rng, 10**3)
                assert solvability_oracle_auto(a, b, v) == hilbert_symbol(a, b, v)
