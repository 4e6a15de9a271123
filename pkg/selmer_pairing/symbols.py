"""Quadratic Hilbert symbols at the places of Q.

:func:`hilbert_symbol` uses the closed formulas; :func:`solvability_oracle`
decides the same question by a bounded residue-disc search and is used to
cross-check the formulas. Symbol values are the integers +1 and -1.
"""

import logging
import threading
from contextlib import contextmanager
from fractions import Fraction
from functools import lru_cache
from typing import Generator, List, Optional, Set, Tuple

import sympy
from sympy import multiplicity

from .arith import RationalLike, as_fraction, prime_support
from .config import MAX_PRECISION_DOUBLINGS, ORACLE_PRECISION_DYADIC, ORACLE_PRECISION_ODD
from .exceptions import InvalidInputError, PrecisionExhaustedError
from .metrics import record_precision_retry, record_symbol_evaluation
from .models import AlgebraClass, Place, SquareClass

logger = logging.getLogger(__name__)

SymbolValue = int

_fault_lock = threading.Lock()
_faulty_primes: Set[int] = set()


@contextmanager
def inject_symbol_fault(prime: int) -> Generator[None, None, None]:
    """Test hook: flip every Hilbert symbol at ``prime`` while active."""
    with _fault_lock:
        _faulty_primes.add(prime)
    logger.warning(f"Hilbert symbol fault injected at p={prime}")
    try:
        yield
    finally:
        with _fault_lock:
            _faulty_primes.discard(prime)


def _split_int(n: int, p: int) -> Tuple[int, int]:
    v = int(multiplicity(p, abs(n)))
    return v, n // p**v


def _integer_rep(q: Fraction) -> int:
    # same square class as q
    return q.numerator * q.denominator


def _check_nonzero(a: Fraction, b: Fraction) -> None:
    if a == 0 or b == 0:
        raise InvalidInputError("Hilbert symbol arguments must be nonzero")


def _eps(u: int) -> int:
    return ((u - 1) // 2) % 2


def _omega(u: int) -> int:
    return ((u * u - 1) // 8) % 2


def hilbert_symbol(a: RationalLike, b: RationalLike, v: Place) -> SymbolValue:
    """(a, b)_v: +1 iff z^2 = a x^2 + b y^2 has a nonzero solution over Q_v.

    Raises:
        InvalidInputError: If a or b is zero.
    """
    a, b = as_fraction(a), as_fraction(b)
    _check_nonzero(a, b)

    if v.is_real:
        record_symbol_evaluation("real")
        return -1 if a < 0 and b < 0 else 1

    p = v.prime
    assert p is not None
    alpha, u = _split_int(_integer_rep(a), p)
    beta, w = _split_int(_integer_rep(b), p)

    if p == 2:
        record_symbol_evaluation("dyadic")
        e = _eps(u) * _eps(w) + alpha * _omega(w) + beta * _omega(u)
        result = -1 if e % 2 else 1
    else:
        record_symbol_evaluation("odd")
        result = 1
        if (alpha * beta * ((p - 1) // 2)) % 2:
            result = -result
        if beta % 2:
            result *= int(sympy.legendre_symbol(u % p, p))
        if alpha % 2:
            result *= int(sympy.legendre_symbol(w % p, p))

    if p in _faulty_primes:
        result = -result
    return result


def algebra_symbol(gamma: AlgebraClass, delta: AlgebraClass, v: Place) -> SymbolValue:
    """(gamma, delta)_{A_v} for the split algebra: product of the componentwise symbols."""
    result = 1
    for g, d in zip(gamma.components, delta.components):
        result *= hilbert_symbol(g.rep, d.rep, v)
    return result


def reciprocity_places(a: RationalLike, b: RationalLike) -> List[Place]:
    """The real place and every prime dividing 2ab (numerators and denominators)."""
    a, b = as_fraction(a), as_fraction(b)
    _check_nonzero(a, b)
    primes = set(prime_support(2 * a.numerator * a.denominator * b.numerator * b.denominator))
    return [Place.real()] + [Place.finite(p) for p in sorted(primes)]


def reciprocity_check(a: RationalLike, b: RationalLike) -> SymbolValue:
    """Product of (a, b)_v over the real place and the primes dividing 2ab; always +1."""
    result = 1
    for v in reciprocity_places(a, b):
        result *= hilbert_symbol(a, b, v)
    return result


# ---------------------------------------------------------------------------
# Local squares and local square-class representatives
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def smallest_nonresidue(p: int) -> int:
    n = 2
    while sympy.legendre_symbol(n, p) != -1:
        n += 1
    return n


def _unit_is_square(u: int, p: int) -> bool:
    if p == 2:
        return u % 8 == 1
    return sympy.legendre_symbol(u % p, p) == 1


def is_local_square(q: RationalLike, v: Place) -> bool:
    """True iff the nonzero rational q is a square in Q_v."""
    q = as_fraction(q)
    if q == 0:
        raise InvalidInputError("zero has no local square class")
    if v.is_real:
        return q > 0
    p = v.prime
    assert p is not None
    e, u = _split_int(_integer_rep(q), p)
    return e % 2 == 0 and _unit_is_square(u, p)


_DYADIC_UNIT_REPS = {1: 1, 3: 3, 5: 5, 7: -1}


def local_class(q: RationalLike, v: Place) -> SquareClass:
    """A small squarefree integer in the same Q_v square class as q.

    Real place: +1 or -1. Odd p: p^e * u0 with u0 in {1, least non-residue}.
    p = 2: 2^e * u0 with u0 in {1, 3, 5, -1}.
    """
    q = as_fraction(q)
    if q == 0:
        raise InvalidInputError("zero has no local square class")
    if v.is_real:
        return SquareClass.trusted(1 if q > 0 else -1)
    p = v.prime
    assert p is not None
    e, u = _split_int(_integer_rep(q), p)
    if p == 2:
        u0 = _DYADIC_UNIT_REPS[u % 8]
    else:
        u0 = 1 if _unit_is_square(u, p) else smallest_nonresidue(p)
    return SquareClass.trusted(p ** (e % 2) * u0)


# ---------------------------------------------------------------------------
# Independent solvability oracle
# ---------------------------------------------------------------------------


def default_oracle_precision(v: Place) -> int:
    return ORACLE_PRECISION_DYADIC if v.is_dyadic else ORACLE_PRECISION_ODD


def _normalize(q: Fraction, p: int) -> int:
    e, u = _split_int(_integer_rep(q), p)
    return p ** (e % 2) * u


def _val_or_inf(n: int, p: int) -> float:
    return float("inf") if n == 0 else _split_int(n, p)[0]


def solvability_oracle(a: RationalLike, b: RationalLike, v: Place, precision: Optional[int] = None) -> SymbolValue:
    """Decide solvability of z^2 = a x^2 + b y^2 over Q_v without symbol formulas.

    At a prime p the projective line of (x : y) is covered by the residue discs
    y in Z_p of the chart (1 : y) and x in pZ_p of the chart (x : 1). A disc is
    refined until the value of a x^2 + b y^2 has constant square class on it
    (the Hensel certificate); a disc of squares proves solvability, and a
    cover by discs of non-squares proves the opposite. Discs still undecided
    at depth ``precision`` raise PrecisionExhaustedError.
    """
    a, b = as_fraction(a), as_fraction(b)
    _check_nonzero(a, b)
    if v.is_real:
        return -1 if a < 0 and b < 0 else 1

    p = v.prime
    assert p is not None
    if precision is None:
        precision = default_oracle_precision(v)
    if precision < 1:
        raise InvalidInputError(f"oracle precision must be positive, got {precision}")

    A, B = _normalize(a, p), _normalize(b, p)
    margin = 3 if p == 2 else 1
    # (constant, coefficient of the squared variable, disc centre, disc level)
    discs: List[Tuple[int, int, int, int]] = [(A, B, 0, 0), (B, A, 0, 1)]
    undecided = False

    while discs:
        refined: List[Tuple[int, int, int, int]] = []
        for const, coeff, centre, level in discs:
            value = const + coeff * centre * centre
            spread = min(_val_or_inf(2 * coeff * centre, p) + level, _val_or_inf(coeff, p) + 2 * level)
            if value != 0:
                e, u = _split_int(value, p)
                if e + margin <= spread:
                    if e % 2 == 0 and _unit_is_square(u, p):
                        return 1
                    continue
            if level >= precision:
                undecided = True
                continue
            step = p**level
            refined.extend((const, coeff, centre + t * step, level + 1) for t in range(p))
        discs = refined

    if undecided:
        raise PrecisionExhaustedError(f"oracle undecided for ({a}, {b}) at p={p}", place=str(p), precision=precision)
    return -1


def solvability_oracle_auto(a: RationalLike, b: RationalLike, v: Place, precision: Optional[int] = None) -> SymbolValue:
    """solvability_oracle, retried with doubled precision when undecided."""
    if precision is None:
        precision = default_oracle_precision(v)
    for attempt in range(MAX_PRECISION_DOUBLINGS + 1):
        try:
            return solvability_oracle(a, b, v, precision)
        except PrecisionExhaustedError:
            if attempt == MAX_PRECISION_DOUBLINGS:
                raise
            record_precision_retry("solvability_oracle")
            logger.debug(f"oracle at {v} undecided at precision {precision}, doubling")
            precision *= 2
    raise AssertionError("unreachable")
