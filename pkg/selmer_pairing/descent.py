"""Curves with full rational 2-torsion, the descent map and complete 2-descent."""

import logging
from fractions import Fraction
from math import gcd, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .arith import (
    class_vector,
    echelon_basis,
    f2_rank,
    prime_support,
    square_class,
    valuation,
    vector_class,
)
from .config import MAX_PRECISION_DOUBLINGS, PADIC_BASE_PRECISION
from .exceptions import InvalidInputError, PrecisionExhaustedError
from .localsolv import is_locally_solvable
from .metrics import record_precision_retry, set_selmer_dimension
from .models import AlgebraClass, Curve2T, CurvePoint, Place, SelmerElement, SelmerGroup, SelmerStatus

logger = logging.getLogger(__name__)


def new_curve(e1: int, e2: int, e3: int) -> Curve2T:
    """Build y^2 = (x - e1)(x - e2)(x - e3); roots are stored in increasing order.

    Raises:
        InvalidInputError: If two roots coincide (singular curve).
    """
    roots = (int(e1), int(e2), int(e3))
    if len(set(roots)) != 3:
        raise InvalidInputError(f"singular curve: repeated root in {roots}")
    return Curve2T(roots=tuple(sorted(roots)))


def curve_from_ab(a: int, b: int) -> Curve2T:
    """y^2 = x(x - a)(x + b)."""
    return new_curve(0, a, -b)


# ---------------------------------------------------------------------------
# Group law
# ---------------------------------------------------------------------------


def on_curve(E: Curve2T, P: CurvePoint) -> bool:
    if P.is_infinity:
        return True
    assert P.x is not None and P.y is not None
    return P.y * P.y == E.rhs(P.x)


def _require_on_curve(E: Curve2T, P: CurvePoint) -> None:
    if not on_curve(E, P):
        raise InvalidInputError(f"point {P} is not on {E}")


def negate_point(P: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return P
    assert P.y is not None
    return CurvePoint(x=P.x, y=-P.y)


def add_points(E: Curve2T, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    """Chord-tangent addition with exact rationals."""
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    assert P.x is not None and P.y is not None and Q.x is not None and Q.y is not None
    if P.x == Q.x:
        if P.y == -Q.y:
            return CurvePoint.infinity()
        lam = (3 * P.x * P.x + 2 * E.a2 * P.x + E.a4) / (2 * P.y)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam * lam - E.a2 - P.x - Q.x
    y3 = -(lam * (x3 - P.x) + P.y)
    return CurvePoint(x=x3, y=y3)


def double_point(E: Curve2T, P: CurvePoint) -> CurvePoint:
    return add_points(E, P, P)


# ---------------------------------------------------------------------------
# Descent map
# ---------------------------------------------------------------------------


def is_torsion(E: Curve2T, P: CurvePoint) -> bool:
    """True iff P has finite order; torsion with full 2-torsion has order dividing 4, 6 or 8 (Mazur)."""
    Q = P
    for _ in range(8):
        if Q.is_infinity:
            return True
        Q = add_points(E, Q, P)
    return False


def descent_map(E: Curve2T, P: CurvePoint) -> AlgebraClass:
    """P -> (x(P) - e_j)_j modulo squares, with F'(e_j) in slot j at T_j.

    Raises:
        InvalidInputError: If P is not on E.
    """
    _require_on_curve(E, P)
    if P.is_infinity:
        return AlgebraClass.identity()
    assert P.x is not None
    comps = []
    for j, e in enumerate(E.roots):
        diff = P.x - e
        if diff == 0:
            comps.append(square_class(E.derivative_at_root(j)))
        else:
            comps.append(square_class(diff))
    return AlgebraClass(components=tuple(comps))


def torsion_images(E: Curve2T) -> List[AlgebraClass]:
    return [descent_map(E, T) for T in E.torsion_points]


def selmer_support(E: Curve2T) -> List[int]:
    """-1 followed by the primes dividing 2 * discriminant."""
    return [-1] + prime_support(2 * E.discriminant)


def check_norm_condition(d: SelmerElement) -> None:
    if not d.satisfies_norm_condition:
        raise InvalidInputError(f"{d} violates the norm condition: d1*d2*d3 is not a square")


def selmer_candidates(E: Curve2T) -> List[SelmerElement]:
    """All (d1, d2, d1*d2 mod squares) with d1, d2 supported on -1 and the primes of 2*disc."""
    support = selmer_support(E)
    n = len(support)
    out = []
    for m1 in range(1 << n):
        d1 = vector_class(m1, support)
        for m2 in range(1 << n):
            d2 = vector_class(m2, support)
            d3 = square_class(d1 * d2).rep
            out.append(SelmerElement.from_reps(d1, d2, d3))
    return out


def covering_coefficients(d: SelmerElement) -> Tuple[int, int, int]:
    """(c1, c2, c3) = (d1, d2, d1*d2) of the model x - e_j = c_j w_j^2."""
    d1, d2, _ = d.reps
    return (d1, d2, d1 * d2)


def default_precision(E: Curve2T, d: SelmerElement, place: Place, base: Optional[int] = None) -> int:
    """PADIC_BASE_PRECISION + v_p(2 * disc * d1 * d2)."""
    base = PADIC_BASE_PRECISION if base is None else base
    if place.is_real:
        return base
    assert place.prime is not None
    d1, d2, _ = d.reps
    return base + valuation(2 * E.discriminant * d1 * d2, place.prime)


def local_solvable(E: Curve2T, d: SelmerElement, v: Place, precision: int) -> bool:
    """Does the covering of d have a point over Q_v?

    Raises:
        InvalidInputError: On a norm-condition violation.
        PrecisionExhaustedError: When undecided at ``precision``.
    """
    check_norm_condition(d)
    return is_locally_solvable(E.roots, covering_coefficients(d), v, precision)


def local_solvable_auto(E: Curve2T, d: SelmerElement, v: Place, precision: Optional[int] = None) -> bool:
    """local_solvable with doubling precision."""
    if precision is None:
        precision = default_precision(E, d, v)
    for attempt in range(MAX_PRECISION_DOUBLINGS + 1):
        try:
            return local_solvable(E, d, v, precision)
        except PrecisionExhaustedError:
            if attempt == MAX_PRECISION_DOUBLINGS:
                raise
            record_precision_retry("local_solvable")
            logger.warning(f"local solvability of {d} at {v} undecided at precision {precision}, doubling")
            precision *= 2
    raise AssertionError("unreachable")


def descent_places(E: Curve2T) -> List[Place]:
    """The real place, 2 and the odd primes of bad reduction."""
    return [Place.real()] + [Place.finite(p) for p in prime_support(2 * E.discriminant)]


def _unramified_where_forced(E: Curve2T, d: SelmerElement) -> bool:
    # x - e_j has even valuation at every p not dividing (e_j - e_k)(e_j - e_l),
    # for rational and local points alike, so such d fail the local test at p
    for j, dj in enumerate(d.reps):
        allowed = E.derivative_at_root(j)
        for p in prime_support(dj) if abs(dj) > 1 else []:
            if allowed % p:
                return False
    return True


def selmer2(E: Curve2T, precision_base: Optional[int] = None) -> SelmerGroup:
    """S^2(Q, E) as the candidates that are locally solvable at every place of bad reduction."""
    support = selmer_support(E)
    n = len(support)
    places = descent_places(E)
    survivors: List[int] = []
    for cand in selmer_candidates(E):
        if not _unramified_where_forced(E, cand):
            continue
        if all(
            local_solvable_auto(E, cand, v, default_precision(E, cand, v, precision_base)) for v in places
        ):
            d1, d2, _ = cand.reps
            survivors.append(class_vector(d1, support) | (class_vector(d2, support) << n))

    basis = []
    for vec in echelon_basis(survivors):
        d1 = vector_class(vec & ((1 << n) - 1), support)
        d2 = vector_class(vec >> n, support)
        basis.append(SelmerElement.from_reps(d1, d2, square_class(d1 * d2).rep, status=SelmerStatus.SELMER))

    group = SelmerGroup(curve=E, basis=basis, support=support)
    set_selmer_dimension(group.dimension)
    logger.info(f"S^2 of [{E.label}] has dimension {group.dimension} ({len(survivors)} locally solvable classes)")
    return group


# ---------------------------------------------------------------------------
# Rational point search
# ---------------------------------------------------------------------------

_SIEVE_MODULI = (64, 63, 65, 11)
_SQUARE_TABLES = {q: np.zeros(q, dtype=bool) for q in _SIEVE_MODULI}
for _q, _table in _SQUARE_TABLES.items():
    _table[(np.arange(_q, dtype=np.int64) ** 2) % _q] = True


def _sieve_mask(E: Curve2T, m: np.ndarray, n: int) -> np.ndarray:
    """Candidates m for which G(m, n) = n^6 F(m / n^2) may be a square."""
    keep = np.ones(m.shape, dtype=bool)
    n2 = n * n
    for q, table in _SQUARE_TABLES.items():
        mq = m % q
        acc = np.ones_like(mq)
        for e in E.roots:
            acc = (acc * ((mq - (e * n2) % q) % q)) % q
        keep &= table[acc]
    # F(x) >= 0 iff e1 <= x <= e2 or x >= e3
    e1, e2, e3 = E.roots
    keep &= ((m >= e1 * n2) & (m <= e2 * n2)) | (m >= e3 * n2)
    return keep


def point_search(E: Curve2T, height_bound: int) -> List[CurvePoint]:
    """Affine points with x = m / n^2, |m| <= height_bound, n^2 <= height_bound, both signs of y.

    The congruence sieve runs on numpy arrays; survivors are checked with
    exact integer square roots.
    """
    if height_bound < 1:
        raise InvalidInputError(f"height bound must be positive, got {height_bound}")
    m_all = np.arange(-height_bound, height_bound + 1, dtype=np.int64)
    found: Dict[Tuple[Fraction, Fraction], CurvePoint] = {}
    for n in range(1, isqrt(height_bound) + 1):
        for m in m_all[_sieve_mask(E, m_all, n)].tolist():
            if gcd(m, n) != 1:
                continue
            n2 = n * n
            g = (m - E.roots[0] * n2) * (m - E.roots[1] * n2) * (m - E.roots[2] * n2)
            if g < 0:
                continue
            r = isqrt(g)
            if r * r != g:
                continue
            x = Fraction(m, n2)
            for y in {Fraction(r, n2 * n), Fraction(-r, n2 * n)}:
                found[(x, y)] = CurvePoint(x=x, y=y)
    points = sorted(found.values(), key=lambda P: (P.naive_height, P.x, P.y))
    logger.debug(f"point search on [{E.label}] to height {height_bound}: {len(points)} points")
    return points


def covering_point_search(E: Curve2T, d: SelmerElement, bound: int) -> List[CurvePoint]:
    """Rational points on E coming from the 2-covering of d with |z0|, |z1| <= bound.

    Solves x = e1 + d1 (z1/z0)^2 with x - e2 = d2 * square and x - e3 = d1 d2 * square,
    vectorised over z1; each point found is verified on E.
    """
    check_norm_condition(d)
    c1, c2, c3 = covering_coefficients(d)
    e1, e2, e3 = E.roots
    z1 = np.arange(0, bound + 1, dtype=np.int64)
    found: Dict[Tuple[Fraction, Fraction], CurvePoint] = {}
    for z0 in range(1, bound + 1):
        s = c1 * z1 * z1 + (e1 - e2) * z0 * z0  # = c2 * z2^2
        t = c1 * z1 * z1 + (e1 - e3) * z0 * z0  # = c3 * z3^2
        ok = (s % c2 == 0) & (t % c3 == 0)
        s_q = np.where(ok, s // c2, -1)
        t_q = np.where(ok, t // c3, -1)
        ok &= (s_q >= 0) & (t_q >= 0)
        for idx in np.nonzero(ok)[0].tolist():
            a, b = int(s_q[idx]), int(t_q[idx])
            if isqrt(a) ** 2 != a or isqrt(b) ** 2 != b:
                continue
            w1 = Fraction(int(z1[idx]), z0)
            x = e1 + c1 * w1 * w1
            w2 = Fraction(isqrt(a), z0)
            w3 = Fraction(isqrt(b), z0)
            y = c1 * c2 * w1 * w2 * w3
            for P in (CurvePoint(x=x, y=y), CurvePoint(x=x, y=-y)):
                if on_curve(E, P):
                    found[(P.x, P.y)] = P  # type: ignore[index]
    return sorted(found.values(), key=lambda P: (P.naive_height, P.x, P.y))


# ---------------------------------------------------------------------------
# Point images inside S^2
# ---------------------------------------------------------------------------


def image_vectors(E: Curve2T, support: Sequence[int], points: Sequence[CurvePoint]) -> List[int]:
    n = len(support)
    out = []
    for P in points:
        d1, d2, _ = descent_map(E, P).reps
        out.append(class_vector(d1, support) | (class_vector(d2, support) << n))
    return out


def independent_point_count(E: Curve2T, points: Sequence[CurvePoint]) -> int:
    """Dimension of the span of the images of points and torsion, minus 2."""
    support = selmer_support(E)
    vectors = image_vectors(E, support, list(E.torsion_points) + list(points))
    return f2_rank(vectors) - 2


def point_images(E: Curve2T, points: Sequence[CurvePoint]) -> List[Tuple[CurvePoint, AlgebraClass]]:
    """Non-torsion points whose images enlarge the span of the torsion images, greedily."""
    support = selmer_support(E)
    n = len(support)

    def vec(cls: AlgebraClass) -> int:
        return class_vector(cls.reps[0], support) | (class_vector(cls.reps[1], support) << n)

    span = [vec(c) for c in torsion_images(E)] + [vec(descent_map(E, P)) for P in points if is_torsion(E, P)]
    rank = f2_rank(span)
    chosen = []
    for P in points:
        if is_torsion(E, P):
            continue
        cls = descent_map(E, P)
        trial = span + [vec(cls)]
        if f2_rank(trial) > rank:
            span, rank = trial, rank + 1
            chosen.append((P, cls))
    return chosen


