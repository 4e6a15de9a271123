"""Exact rational and square-class arithmetic.

Rationals are :class:`fractions.Fraction`; factorization, primality and
Legendre symbols come from sympy. Square-class vectors over F2 are encoded
as integer bitmasks over an ordered support ``[-1, p1, p2, ...]``.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import sympy
from sympy import factorint, multiplicity

from .config import FACTOR_TRIAL_BOUND
from .exceptions import FactorizationError, InvalidInputError
from .models import SquareClass

logger = logging.getLogger(__name__)

RationalLike = Union[int, Fraction, str]


def as_fraction(q: RationalLike) -> Fraction:
    """Coerce an int, Fraction or string such as '-4/9' to a Fraction."""
    if isinstance(q, Fraction):
        return q
    try:
        return Fraction(q)
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidInputError(f"not a rational number: {q!r}") from e


def is_prime(n: int) -> bool:
    """Deterministic primality test (Miller-Rabin below 2^64, strong BPSW above)."""
    return n > 1 and bool(sympy.isprime(n))


def _require_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise InvalidInputError(f"{p!r} is not a prime")


@dataclass(frozen=True)
class Factorization:
    """Signed prime factorization: n = sign * prod(p**e)."""

    sign: int
    factors: Tuple[Tuple[int, int], ...]

    @property
    def primes(self) -> List[int]:
        return [p for p, _ in self.factors]

    def value(self) -> int:
        out = self.sign
        for p, e in self.factors:
            out *= p**e
        return out


@lru_cache(maxsize=4096)
def _factor_abs(n: int) -> Tuple[Tuple[int, int], ...]:
    raw = factorint(n, limit=FACTOR_TRIAL_BOUND)
    for p in raw:
        if not is_prime(p):
            raise FactorizationError(
                f"cannot factor {n}: composite cofactor {p} above trial bound {FACTOR_TRIAL_BOUND}"
            )
    return tuple(sorted(raw.items()))


def factorize(n: int) -> Factorization:
    """Factor a nonzero integer into primes with strictly increasing primes.

    Raises:
        InvalidInputError: If n is zero.
        FactorizationError: If a composite cofactor survives trial division.
    """
    if n == 0:
        raise InvalidInputError("cannot factor zero")
    return Factorization(sign=1 if n > 0 else -1, factors=_factor_abs(abs(n)))


def prime_support(n: int) -> List[int]:
    """Primes dividing a nonzero integer."""
    return factorize(n).primes


def valuation(q: RationalLike, p: int) -> int:
    """The exponent of p in q.

    Raises:
        InvalidInputError: For q == 0 or non-prime p.
    """
    q = as_fraction(q)
    if q == 0:
        raise InvalidInputError("valuation of zero is undefined")
    _require_prime(p)
    return _val_int(q.numerator, p) - _val_int(q.denominator, p)


def _val_int(n: int, p: int) -> int:
    return int(multiplicity(p, abs(n)))


def padic_split(q: Fraction, p: int) -> Tuple[int, Fraction]:
    """Write q = p^v * u with u a p-adic unit. q must be nonzero; p is trusted prime."""
    v = _val_int(q.numerator, p) - _val_int(q.denominator, p)
    if v >= 0:
        return v, q / p**v
    return v, q * p ** (-v)


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, with value 0 when p | a.

    Raises:
        InvalidInputError: If p is even or composite.
    """
    if p == 2:
        raise InvalidInputError("Legendre symbol needs an odd prime")
    _require_prime(p)
    return int(sympy.legendre_symbol(a % p, p))


def squarefree_part(q: RationalLike) -> Tuple[SquareClass, Fraction]:
    """Return (s, r) with q = s * r^2, s squarefree and r > 0.

    Examples:
        18 -> (2, 3); -4/9 -> (-1, 2/3); 1 -> (1, 1)
    """
    q = as_fraction(q)
    if q == 0:
        raise InvalidInputError("zero has no square class")
    n = q.numerator * q.denominator
    f = factorize(n)
    s, t = f.sign, 1
    for p, e in f.factors:
        if e % 2:
            s *= p
        t *= p ** (e // 2)
    return SquareClass.trusted(s), Fraction(t, q.denominator)


def square_class(q: RationalLike) -> SquareClass:
    """Square class of a nonzero rational."""
    return squarefree_part(q)[0]


def is_rational_square(q: RationalLike) -> bool:
    """True iff q is the square of a rational (0 included)."""
    q = as_fraction(q)
    if q < 0:
        return False
    a, b = q.numerator, q.denominator
    return isqrt(a) ** 2 == a and isqrt(b) ** 2 == b


def rational_sqrt(q: Fraction) -> Fraction:
    """Exact square root of a rational square."""
    if not is_rational_square(q):
        raise InvalidInputError(f"{q} is not a rational square")
    return Fraction(isqrt(q.numerator), isqrt(q.denominator))


# ---------------------------------------------------------------------------
# F2 linear algebra on square-class vectors
# ---------------------------------------------------------------------------


def class_vector(rep: int, support: Sequence[int]) -> int:
    """Bitmask of a squarefree integer over ``support`` (-1 first, then primes).

    Raises:
        InvalidInputError: If rep involves a prime outside the support.
    """
    mask = 0
    n = abs(rep)
    for i, p in enumerate(support):
        if p == -1:
            if rep < 0:
                mask |= 1 << i
        elif n % p == 0:
            mask |= 1 << i
            n //= p
    if n != 1:
        raise InvalidInputError(f"{rep} is not supported on {list(support)}")
    return mask


def vector_class(mask: int, support: Sequence[int]) -> int:
    """Inverse of class_vector."""
    rep = 1
    for i, p in enumerate(support):
        if (mask >> i) & 1:
            rep *= p
    return rep


def echelon_basis(vectors: Iterable[int]) -> List[int]:
    """Reduced row-echelon basis of the F2-span of the given bitmasks.

    The result is canonical for the span: sorted by leading bit, each pivot
    bit cleared from every other row.
    """
    pivots: dict = {}
    for v in vectors:
        for bit in sorted(pivots, reverse=True):
            if (v >> bit) & 1:
                v ^= pivots[bit]
        if v:
            lead = v.bit_length() - 1
            for bit in list(pivots):
                if (pivots[bit] >> lead) & 1:
                    pivots[bit] ^= v
            pivots[lead] = v
    return [pivots[b] for b in sorted(pivots)]


def f2_rank(rows: Iterable[int]) -> int:
    """Rank over F2 of bitmask rows."""
    return len(echelon_basis(rows))


def span_coordinates(basis: Sequence[int], target: int) -> Optional[List[int]]:
    """Coordinates of target in the F2-span of independent ``basis``, or None."""
    # each reduced row remembers which basis vectors it combines
    rows: List[Tuple[int, int]] = []
    for i, b in enumerate(basis):
        rows.append((b, 1 << i))
    reduced: List[Tuple[int, int]] = []
    for v, tag in rows:
        for r, rtag in reduced:
            if v & (1 << (r.bit_length() - 1)):
                v ^= r
                tag ^= rtag
        if v:
            reduced.append((v, tag))
            reduced.sort(key=lambda item: -item[0].bit_length())
    coords = 0
    for r, rtag in reduced:
        if target & (1 << (r.bit_length() - 1)):
            target ^= r
            coords ^= rtag
    if target:
        return None
    return [(coords >> i) & 1 for i in range(len(basis))]


def in_span(basis: Sequence[int], target: int) -> bool:
    return span_coordinates(basis, target) is not None


def matrix_rank(entries: Sequence[Sequence[int]]) -> int:
    """F2 rank of a 0/1 matrix given as rows."""
    rows = []
    for row in entries:
        mask = 0
        for j, bit in enumerate(row):
            if bit:
                mask |= 1 << j
        rows.append(mask)
    return f2_rank(rows)
