"""Tests for exact rational and square-class arithmetic."""

import random
from fractions import Fraction

import pytest

from selmer_pairing.arith import (
    class_vector,
    echelon_basis,
    f2_rank,
    factorize,
    in_span,
    is_prime,
    is_rational_square,
    legendre_symbol,
    matrix_rank,
    prime_support,
    rational_sqrt,
    span_coordinates,
    square_class,
    squarefree_part,
    valuation,
    vector_class,
)
from selmer_pairing.exceptions import FactorizationError, InvalidInputError


class TestSquarefreePart:
    """Tests for squarefree_part and square classes."""

    @pytest.mark.parametrize(
        "q, rep, root",
        [
            (18, 2, Fraction(3)),
            (Fraction(-4, 9), -1, Fraction(2, 3)),
            (1, 1, Fraction(1)),
            ("-50/7", -14, Fraction(5, 7)),
        ],
    )
    def test_examples(self, q, rep, root):
        """Test the documented decompositions."""
        s, r = squarefree_part(q)
        assert s.rep == rep
        assert r == root

    def test_recombines(self):
        """Test that s * r^2 reproduces q for random rationals."""
        rng = random.Random(7)
        for _ in range(200):
            q = Fraction(rng.randint(-5000, 5000) or 1, rng.randint(1, 5000))
            s, r = squarefree_part(q)
            assert s.rep * r * r == q
            assert r > 0

    def test_zero_rejected(self):
        """Test that zero has no square class."""
        with pytest.raises(InvalidInputError, match="zero"):
            squarefree_part(0)

    def test_square_class_multiplication(self):
        """Test that classes multiply modulo squares."""
        assert (square_class(6) * square_class(10)).rep == 15
        assert (square_class(-3) * square_class(-3)).rep == 1

    def test_rational_squares(self):
        """Test exact square recognition."""
        assert is_rational_square("9/4")
        assert not is_rational_square(-1)
        assert not is_rational_square(8)
        assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
        with pytest.raises(InvalidInputError):
            rational_sqrt(Fraction(2))


class TestValuation:
    """Tests for p-adic valuations."""

    def test_examples(self):
        """Test the documented valuations."""
        assert valuation(18, 3) == 2
        assert valuation(Fraction(-4, 9), 3) == -2
        assert valuation(5, 2) == 0

    def test_zero_rejected(self):
        """Test that v_p(0) is rejected."""
        with pytest.raises(InvalidInputError):
            valuation(0, 3)

    def test_non_prime_rejected(self):
        """Test that a composite modulus is rejected."""
        with pytest.raises(InvalidInputError, match="not a prime"):
            valuation(12, 4)

    def test_string_input(self):
        """Test that rationals given as strings are accepted."""
        assert valuation("8/27", 2) == 3

    def test_bad_string_rejected(self):
        """Test that malformed rationals raise InvalidInputError."""
        with pytest.raises(InvalidInputError, match="not a rational"):
            valuation("one half", 2)


class TestLegendreSymbol:
    """Tests for the Legendre symbol."""

    def test_examples(self):
        """Test the documented values."""
        assert legendre_symbol(2, 7) == 1
        assert legendre_symbol(2, 5) == -1
        assert legendre_symbol(14, 7) == 0

    def test_even_prime_rejected(self):
        """Test that p = 2 is rejected."""
        with pytest.raises(InvalidInputError, match="odd prime"):
            legendre_symbol(3, 2)

    def test_composite_rejected(self):
        """Test that composite moduli are rejected."""
        with pytest.raises(InvalidInputError):
            legendre_symbol(2, 9)

    def test_multiplicative(self):
        """Test (ab/p) = (a/p)(b/p) for p not dividing ab."""
        rng = random.Random(11)
        primes = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31]
        for _ in range(300):
            p = rng.choice(primes)
            a, b = rng.randint(1, 1000), rng.randint(1, 1000)
            if (a * b) % p == 0:
                continue
            assert legendre_symbol(a * b, p) == legendre_symbol(a, p) * legendre_symbol(b, p)


class TestFactorize:
    """Tests for integer factorization."""

    def test_examples(self):
        """Test the documented factorizations."""
        assert factorize(360).factors == ((2, 3), (3, 2), (5, 1))
        minus_seven = factorize(-7)
        assert minus_seven.sign == -1
        assert minus_seven.factors == ((7, 1),)
        assert factorize(1).factors == ()

    def test_reconstructs(self):
        """Test that factorizations multiply back to the input."""
        for n in (-360, 97, 2**10 * 3**4, -1, 999_983 * 2):
            assert factorize(n).value() == n

    def test_zero_rejected(self):
        """Test that zero cannot be factored."""
        with pytest.raises(InvalidInputError):
            factorize(0)

    def test_prime_support(self):
        """Test the support helper."""
        assert prime_support(-360) == [2, 3, 5]

    def test_large_composite_cofactor_rejected(self, monkeypatch):
        """Test that a composite cofactor above the trial bound is an explicit error."""
        from selmer_pairing import arith

        monkeypatch.setattr(arith, "factorint", lambda n, limit: {n: 1})
        arith._factor_abs.cache_clear()
        try:
            with pytest.raises(FactorizationError):
                arith.factorize(1_000_003 * 1_000_033)
        finally:
            arith._factor_abs.cache_clear()

    def test_is_prime(self):
        """Test the primality wrapper on small and Mersenne inputs."""
        assert is_prime(2)
        assert is_prime(2**61 - 1)
        assert not is_prime(1)
        assert not is_prime(561)


class TestF2Algebra:
    """Tests for F2 linear algebra on square-class vectors."""

    def test_class_vector_roundtrip(self):
        """Test bitmask encoding over a support."""
        support = [-1, 2, 3]
        assert class_vector(-6, support) == 0b111
        assert vector_class(0b111, support) == -6
        assert class_vector(1, support) == 0

    def test_class_vector_outside_support(self):
        """Test that primes outside the support are rejected."""
        with pytest.raises(InvalidInputError, match="not supported"):
            class_vector(5, [-1, 2])

    def test_echelon_basis(self):
        """Test the reduced echelon basis is canonical."""
        assert echelon_basis([3, 1, 2]) == [1, 2]
        assert echelon_basis([2, 3]) == [1, 2]
        assert f2_rank([1, 2, 3]) == 2

    def test_span_coordinates(self):
        """Test coordinates in a basis."""
        assert span_coordinates([1, 2], 3) == [1, 1]
        assert span_coordinates([3, 1], 2) == [1, 1]
        assert span_coordinates([1, 2], 4) is None

    def test_in_span(self):
        """Test span membership."""
        assert in_span([1, 2], 3)
        assert in_span([], 0)
        assert not in_span([3], 1)

    def test_matrix_rank(self):
        """Test the rank of 0/1 matrices."""
        assert matrix_rank([[0, 1], [1, 0]]) == 2
        assert matrix_rank([[1, 1], [1, 1]]) == 1
        assert matrix_rank([[0, 0], [0, 0]]) == 0
