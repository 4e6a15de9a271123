"""Explicit 2-coverings as intersections of two quadrics, their f-triples and local points.

The covering of d = (d1, d2, d3) is

    Q1: d1 z1^2 - d2 z2^2 - (e2 - e1) z0^2 = 0
    Q2: d1 z1^2 - d1 d2 z3^2 - (e3 - e1) z0^2 = 0

in P^3, mapping to E by x = e1 + d1 (z1/z0)^2, y = d1 d2 z1 z2 z3 / z0^3.
Equivalently x - e_j = c_j (z_j/z0)^2 with c = (d1, d2, d1 d2).

For each t the pencil contains the cone over the conic

    c_i z_i^2 - c_k z_k^2 - (e_k - e_i) z0^2 = 0,    {i, k} = {1, 2, 3} - {t},

whose tangent line at a rational point pulls back to a plane L_t meeting
the covering in a doubled divisor. With f_j = L_i L_k / z0^2 and
g = L1 L2 L3 / z0^3 the identity f1 f2 f3 = g^2 holds as polynomials.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy import Poly, groebner, symbols
from sympy.solvers.diophantine.diophantine import diop_ternary_quadratic_normal

from .arith import padic_split, square_class
from .config import CONIC_SEARCH_BOUND, LOCAL_POINT_ATTEMPTS, MAX_PRECISION_DOUBLINGS, REAL_BASE_BITS
from .descent import check_norm_condition, covering_coefficients, default_precision, descent_map, on_curve
from .exceptions import ConstructionError, InvalidInputError, NotLocallySolvableError, PrecisionExhaustedError
from .localsolv import (
    REGION_DISC,
    REGION_FAR,
    REGION_INTERVAL,
    REGION_ROOT,
    SolvableRegion,
    collect_regions,
    hensel_margin,
)
from .metrics import record_local_point_search, record_precision_retry
from .models import AlgebraClass, Curve2T, CurvePoint, Place, SelmerElement, SquareClass
from .symbols import is_local_square, local_class

logger = logging.getLogger(__name__)

Z = symbols("z0 z1 z2 z3")
U = symbols("u1 u2 u3")

Coordinates = Tuple[Fraction, Fraction, Fraction, Fraction]
Terms = List[Tuple[Tuple[int, ...], Fraction]]

_INF = float("inf")


def _poly(expr) -> Poly:
    return Poly(expr, *Z, domain="QQ")


def _to_fraction(c) -> Fraction:
    c = sympy.Rational(c)
    return Fraction(int(c.p), int(c.q))


# ---------------------------------------------------------------------------
# Covering model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoveringModel:
    """The 2-covering C_d of E as the intersection of the quadrics q1 and q2."""

    curve: Curve2T
    d: SelmerElement
    coeffs: Tuple[int, int, int]
    q1: Poly
    q2: Poly

    @cached_property
    def _basis(self):
        return groebner([self.q1.as_expr(), self.q2.as_expr()], *Z, order="grevlex", domain="QQ")

    def in_ideal(self, expr) -> bool:
        """True iff expr vanishes identically on the covering (ideal membership)."""
        expr = sympy.expand(expr)
        if expr == 0:
            return True
        return bool(self._basis.contains(expr))

    def matrices(self) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[Tuple[int, ...], ...]]:
        """Symmetric 4x4 matrices of q1 and q2 in (z0, z1, z2, z3)."""
        e1, e2, e3 = self.curve.roots
        c1, c2, c3 = self.coeffs
        return _diag(-(e2 - e1), c1, -c2, 0), _diag(-(e3 - e1), c1, 0, -c3)

    def contains_point(self, coords: Sequence[Fraction]) -> bool:
        return any(c != 0 for c in coords) and all(_eval_exact(q, coords) == 0 for q in (self.q1, self.q2))

    def covering_map(self, coords: Sequence[Fraction]) -> CurvePoint:
        """pi(P) on E for a rational point with z0 != 0."""
        z0, z1, z2, z3 = (Fraction(c) for c in coords)
        if z0 == 0:
            return CurvePoint.infinity()
        c1, c2, _ = self.coeffs
        x = self.curve.roots[0] + c1 * (z1 / z0) ** 2
        y = c1 * c2 * z1 * z2 * z3 / z0**3
        return CurvePoint(x=x, y=y)


def _diag(*entries: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(entries[i] if i == j else 0 for j in range(4)) for i in range(4))


def make_covering(E: Curve2T, d: SelmerElement) -> CoveringModel:
    """Quadric-intersection model of the covering of d, with the covering map checked symbolically.

    Raises:
        InvalidInputError: If d violates the norm condition.
        ConstructionError: If the symbolic covering-map check fails.
    """
    check_norm_condition(d)
    c1, c2, c3 = covering_coefficients(d)
    e1, e2, e3 = E.roots
    z0, z1, z2, z3 = Z
    q1 = _poly(c1 * z1**2 - c2 * z2**2 - (e2 - e1) * z0**2)
    q2 = _poly(c1 * z1**2 - c3 * z3**2 - (e3 - e1) * z0**2)
    C = CoveringModel(curve=E, d=d, coeffs=(c1, c2, c3), q1=q1, q2=q2)

    # z0^2 (x - e_j) = c_j z_j^2 and z0^6 (y^2 - F(x)) = 0 on the covering
    x_num = c1 * z1**2 + e1 * z0**2
    checks = [x_num - e * z0**2 - c * zj**2 for e, c, zj in zip(E.roots, (c1, c2, c3), (z1, z2, z3))]
    y_num = c1 * c2 * z1 * z2 * z3
    checks.append(y_num**2 - (x_num - e1 * z0**2) * (x_num - e2 * z0**2) * (x_num - e3 * z0**2))
    for expr in checks:
        if not C.in_ideal(expr):
            raise ConstructionError(f"covering map check failed for {d} on [{E.label}]")
    return C


def singular_quadrics(C: CoveringModel) -> List[Poly]:
    """The four rank-3 members of the pencil, in the order of the vertices z3, z2, z1, z0."""
    e1, e2, e3 = C.curve.roots
    return [C.q1, C.q2, C.q2 - C.q1, C.q1 * (e3 - e1) - C.q2 * (e2 - e1)]


# ---------------------------------------------------------------------------
# Rational points on conics
# ---------------------------------------------------------------------------


def _normalize_triple(t: Sequence[int]) -> Tuple[int, int, int]:
    g = reduce(gcd, (abs(v) for v in t))
    out = [v // g for v in t]
    first = next(v for v in out if v != 0)
    if first < 0:
        out = [-v for v in out]
    return (out[0], out[1], out[2])


def conic_point(a0: int, a1: int, a2: int, bound: int = CONIC_SEARCH_BOUND) -> Tuple[int, int, int]:
    """A primitive rational point of a0 u0^2 + a1 u1^2 + a2 u2^2 = 0.

    Small points are searched by height, then lexicographically on
    coordinates normalised so the first nonzero one is positive; sympy's
    ternary quadratic solver is the fallback.

    Raises:
        ConstructionError: If the conic has no rational point.
    """
    if a2 == 0 or a0 == 0 or a1 == 0:
        raise InvalidInputError("conic coefficients must be nonzero")
    for h in range(1, bound + 1):
        u1 = np.arange(-h, h + 1, dtype=np.int64)
        for u0 in range(0, h + 1):
            rhs = -(a0 * u0 * u0 + a1 * u1 * u1)
            ok = (rhs % a2 == 0)
            quotient = np.where(ok, rhs // a2, -1)
            ok &= quotient >= 0
            roots = np.rint(np.sqrt(np.where(ok, quotient, 0).astype(np.float64))).astype(np.int64)
            ok &= roots * roots == quotient
            ok &= (roots <= h)
            for idx in np.nonzero(ok)[0].tolist():
                v1 = int(u1[idx])
                s = int(roots[idx])
                for v2 in sorted({-s, s}):
                    triple = (u0, v1, v2)
                    if max(abs(u0), abs(v1), abs(v2)) != h or gcd(gcd(u0, abs(v1)), abs(v2)) != 1:
                        continue
                    if _normalize_triple(triple) != triple:
                        continue
                    return triple

    u0, u1s, u2s = symbols("u0 u1 u2", integer=True)
    try:
        sol = diop_ternary_quadratic_normal(a0 * u0**2 + a1 * u1s**2 + a2 * u2s**2)
    except (ValueError, TypeError, NotImplementedError) as e:
        raise ConstructionError(f"ternary quadratic solver failed: {e}") from e
    if sol is None or any(v is None for v in sol) or not any(int(v) for v in sol):
        raise ConstructionError(f"conic {a0}*u0^2 + {a1}*u1^2 + {a2}*u2^2 has no rational point")
    triple = _normalize_triple([int(v) for v in sol])
    if a0 * triple[0] ** 2 + a1 * triple[1] ** 2 + a2 * triple[2] ** 2 != 0:
        raise ConstructionError("ternary quadratic solver returned a point off the conic")
    return triple


# ---------------------------------------------------------------------------
# f-triples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FTriple:
    """Rational functions f_j = numerators[j] / denominators[j] on a covering, with g^2 = f1 f2 f3.

    g is None when a rescaling has broken the square identity.
    """

    numerators: Tuple[Poly, Poly, Poly]
    denominators: Tuple[Poly, Poly, Poly]
    g_numerator: Optional[Poly]
    g_denominator: Optional[Poly]
    tangent_points: Tuple[Tuple[int, int, int], ...] = ()
    tangent_forms: Tuple[Poly, ...] = ()

    @cached_property
    def terms(self) -> List[Tuple[Terms, Terms]]:
        return [(_terms(n), _terms(dn)) for n, dn in zip(self.numerators, self.denominators)]

    def values_at(self, coords: Sequence[Fraction]) -> Tuple[Fraction, Fraction, Fraction]:
        """Exact values at a rational point.

        Raises:
            InvalidInputError: If some f_j has a zero or pole there.
        """
        out = []
        for num, den in self.terms:
            n, dn = _eval_terms(num, coords), _eval_terms(den, coords)
            if n == 0 or dn == 0:
                raise InvalidInputError(f"f has a zero or pole at {tuple(str(c) for c in coords)}")
            out.append(n / dn)
        return (out[0], out[1], out[2])

    def rescaled(self, constants: Sequence[Fraction]) -> "FTriple":
        """f_j -> c_j f_j. g is rescaled when c1 c2 c3 is a rational square, else dropped."""
        cs = [Fraction(c) for c in constants]
        if any(c == 0 for c in cs):
            raise InvalidInputError("rescaling constants must be nonzero")
        nums = tuple(n * sympy.Rational(c.numerator, c.denominator) for n, c in zip(self.numerators, cs))
        prod = cs[0] * cs[1] * cs[2]
        g_num: Optional[Poly] = None
        if self.g_numerator is not None and prod > 0:
            a, b = prod.numerator, prod.denominator
            if isqrt(a) ** 2 == a and isqrt(b) ** 2 == b:
                g_num = self.g_numerator * sympy.Rational(isqrt(a), isqrt(b))
        return FTriple(
            numerators=nums,  # type: ignore[arg-type]
            denominators=self.denominators,
            g_numerator=g_num,
            g_denominator=self.g_denominator if g_num is not None else None,
            tangent_points=self.tangent_points,
            tangent_forms=self.tangent_forms,
        )

    def times_square(self, j: int, h_numerator, h_denominator) -> "FTriple":
        """f_j -> f_j * (h_numerator / h_denominator)^2 for forms of equal degree."""
        h_num, h_den = _poly(h_numerator), _poly(h_denominator)
        if h_num.total_degree() != h_den.total_degree():
            raise InvalidInputError("h must be a ratio of forms of equal degree")
        nums = list(self.numerators)
        dens = list(self.denominators)
        nums[j] = nums[j] * h_num**2
        dens[j] = dens[j] * h_den**2
        g_num = self.g_numerator * h_num if self.g_numerator is not None else None
        g_den = self.g_denominator * h_den if self.g_denominator is not None else None
        return FTriple(
            numerators=tuple(nums),  # type: ignore[arg-type]
            denominators=tuple(dens),  # type: ignore[arg-type]
            g_numerator=g_num,
            g_denominator=g_den,
            tangent_points=self.tangent_points,
            tangent_forms=self.tangent_forms,
        )


def _terms(p: Poly) -> Terms:
    return [(monom, _to_fraction(c)) for monom, c in p.terms()]


def _eval_terms(terms: Terms, coords: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for monom, coeff in terms:
        value = coeff
        for c, e in zip(coords, monom):
            if e:
                value *= c**e
        total += value
    return total


def _eval_exact(p: Poly, coords: Sequence[Fraction]) -> Fraction:
    return _eval_terms(_terms(p), [Fraction(c) for c in coords])


def _primitive_form(coeffs: Sequence[int]) -> Poly:
    g = reduce(gcd, (abs(c) for c in coeffs if c), 0)
    if g == 0:
        raise ConstructionError("tangent form vanishes identically")
    return _poly(sum((c // g) * z for c, z in zip(coeffs, Z)))


def construct_f(C: CoveringModel) -> FTriple:
    """The f-triple of C from tangent planes to the three cones of the pencil.

    Raises:
        ConstructionError: If a conic has no rational point or some f_j vanishes on C.
    """
    e = C.curve.roots
    c = C.coeffs
    forms: List[Poly] = []
    points: List[Tuple[int, int, int]] = []
    for t in range(3):
        i, k = [s for s in range(3) if s != t]
        a0, a1, a2 = -(e[k] - e[i]), c[i], -c[k]
        zeta = conic_point(a0, a1, a2)
        coeffs = [0, 0, 0, 0]
        coeffs[0] = a0 * zeta[0]
        coeffs[i + 1] = a1 * zeta[1]
        coeffs[k + 1] = a2 * zeta[2]
        forms.append(_primitive_form(coeffs))
        points.append(zeta)
        logger.debug(f"cone {t + 1} of {C.d}: conic point {zeta}, tangent form {forms[-1].as_expr()}")

    z0 = _poly(Z[0])
    L1, L2, L3 = forms
    numerators = (L2 * L3, L1 * L3, L1 * L2)
    denominators = (z0**2, z0**2, z0**2)
    f = FTriple(
        numerators=numerators,
        denominators=denominators,
        g_numerator=L1 * L2 * L3,
        g_denominator=z0**3,
        tangent_points=tuple(points),
        tangent_forms=tuple(forms),
    )
    if not square_identity_holds(C, f):
        raise ConstructionError(f"f1 f2 f3 is not a square for {C.d}")
    for j, num in enumerate(f.numerators):
        if C.in_ideal(num.as_expr()):
            raise ConstructionError(f"f{j + 1} vanishes identically on the covering of {C.d}")
    return f


def square_identity_holds(C: CoveringModel, f: FTriple) -> bool:
    """f1 f2 f3 == g^2 modulo the ideal of C."""
    if f.g_numerator is None or f.g_denominator is None:
        return False
    n1, n2, n3 = f.numerators
    d1, d2, d3 = f.denominators
    lhs = n1 * n2 * n3 * f.g_denominator**2
    rhs = f.g_numerator**2 * d1 * d2 * d3
    return C.in_ideal((lhs - rhs).as_expr())


# ---------------------------------------------------------------------------
# Trivial covering and the delta = f consistency check
# ---------------------------------------------------------------------------


def trivial_covering_point(E: Curve2T, R: CurvePoint) -> Coordinates:
    """The rational point (1 : w1 : w2 : w3) of the trivial covering lying over R.

    With s_i = y / (x - e_i), w_i = (s_j + s_k - s_i) / 2, so that
    (w_j + w_i)(w_j + w_k) = x(R) - e_j.

    Raises:
        InvalidInputError: For O, 2-torsion points or points off E.
    """
    if not on_curve(E, R):
        raise InvalidInputError(f"point {R} is not on {E}")
    if R.is_infinity or R.y == 0:
        raise InvalidInputError("the trivial covering point needs y(R) != 0")
    assert R.x is not None and R.y is not None
    s = [R.y / (R.x - e) for e in E.roots]
    w = [(s[1] + s[2] - s[0]) / 2, (s[0] + s[2] - s[1]) / 2, (s[0] + s[1] - s[2]) / 2]
    return (Fraction(1), w[0], w[1], w[2])


def trivial_covering_image(E: Curve2T, coords: Sequence[Fraction]) -> CurvePoint:
    """Point of E matched with a rational point of the trivial covering (inverse of trivial_covering_point)."""
    z0, z1, z2, z3 = (Fraction(c) for c in coords)
    w1, w2, w3 = z1 / z0, z2 / z0, z3 / z0
    x = E.roots[0] + w1 * w1
    X = x + w1 * w2 + w1 * w3 + w2 * w3
    Y = (w1 + w2) * (w1 + w3) * (w2 + w3)
    return CurvePoint(x=X, y=Y)


def rational_point_classes(f: FTriple, coords: Sequence[Fraction]) -> AlgebraClass:
    """Global square classes of (f1, f2, f3) at a rational point."""
    values = f.values_at([Fraction(c) for c in coords])
    return AlgebraClass(components=tuple(square_class(v) for v in values))  # type: ignore[arg-type]


def delta_f_check(E: Curve2T, f: FTriple, R: CurvePoint) -> Optional[bool]:
    """Compare f at the trivial-covering point over R with descent_map(R).

    Returns None when R is 2-torsion or f has a zero or pole at the point.
    """
    if R.is_infinity or R.y == 0:
        return None
    coords = trivial_covering_point(E, R)
    try:
        classes = rational_point_classes(f, coords)
    except InvalidInputError:
        return None
    return classes == descent_map(E, R)


# ---------------------------------------------------------------------------
# Local points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalPoint:
    """A point (1 : w1 : w2 : w3) of a covering over Q_v, known to a stated precision.

    p-adic: ``coordinates`` approximate a true point with error valuations
    ``errors`` (None means exact). Real: the true coordinates lie in
    ``intervals``.
    """

    place: Place
    coordinates: Coordinates
    x: Fraction
    region: str
    precision: int
    errors: Tuple[Optional[int], ...] = (None, None, None, None)
    intervals: Optional[Tuple[Tuple[Fraction, Fraction], ...]] = None

    def certificate(self) -> Dict[str, str]:
        out = {
            "place": self.place.label,
            "x": str(self.x),
            "region": self.region,
            "precision": str(self.precision),
        }
        if self.place.is_real:
            out["kind"] = "rational intervals"
        else:
            out["kind"] = "hensel"
            out["errors"] = ",".join("exact" if e is None else str(e) for e in self.errors)
        return out


@dataclass(frozen=True)
class _Interval:
    lo: Fraction
    hi: Fraction

    def __add__(self, other: "_Interval") -> "_Interval":
        return _Interval(self.lo + other.lo, self.hi + other.hi)

    def __mul__(self, other: "_Interval") -> "_Interval":
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return _Interval(min(products), max(products))

    def scale(self, c: Fraction) -> "_Interval":
        a, b = self.lo * c, self.hi * c
        return _Interval(min(a, b), max(a, b))


def _val(q: Fraction, p: int) -> float:
    return _INF if q == 0 else padic_split(q, p)[0]


def _padic_value(terms: Terms, point: LocalPoint, p: int) -> Tuple[Fraction, float]:
    """Approximate value and a lower bound for the valuation of its error."""
    coords = point.coordinates
    mu = []
    for c, err in zip(coords, point.errors):
        mu.append(_val(c, p) if err is None else min(_val(c, p), err))
    value = Fraction(0)
    bound = _INF
    for monom, coeff in terms:
        prod = coeff
        slots: List[int] = []
        for idx, e in enumerate(monom):
            if e:
                prod *= coords[idx] ** e
                slots.extend([idx] * e)
        value += prod
        total_mu = sum(mu[s] for s in slots)
        for s in slots:
            err = point.errors[s]
            if err is None:
                continue
            rest = total_mu - mu[s]
            bound = min(bound, _val(coeff, p) + err + rest)
    return value, bound


def _real_value(terms: Terms, point: LocalPoint) -> _Interval:
    assert point.intervals is not None
    total = _Interval(Fraction(0), Fraction(0))
    for monom, coeff in terms:
        acc = _Interval(Fraction(1), Fraction(1))
        for idx, e in enumerate(monom):
            for _ in range(e):
                acc = acc * _Interval(*point.intervals[idx])
        total = total + acc.scale(coeff)
    return total


def _certified_class(terms: Terms, point: LocalPoint) -> Optional[Fraction]:
    """A rational in the same local square class as the polynomial's true value, or None."""
    place = point.place
    if place.is_real:
        iv = _real_value(terms, point)
        if iv.lo > 0:
            return Fraction(1)
        if iv.hi < 0:
            return Fraction(-1)
        return None
    assert place.prime is not None
    p = place.prime
    value, bound = _padic_value(terms, point, p)
    if value == 0:
        return None
    if _val(value, p) + hensel_margin(p) <= bound:
        return value
    return None


def _certified_f_classes(f: FTriple, point: LocalPoint) -> Optional[AlgebraClass]:
    comps: List[SquareClass] = []
    for num_terms, den_terms in f.terms:
        n = _certified_class(num_terms, point)
        dn = _certified_class(den_terms, point)
        if n is None or dn is None:
            return None
        comps.append(local_class(n * dn, point.place))
    return AlgebraClass.model_construct(components=tuple(comps))


def evaluate_f(f: FTriple, P: LocalPoint) -> AlgebraClass:
    """Local square classes of (f1(P), f2(P), f3(P)) at P's place.

    Representatives are small squarefree integers of the same Q_v class.

    Raises:
        PrecisionExhaustedError: If some value is not certified at P's precision.
    """
    classes = _certified_f_classes(f, P)
    if classes is None:
        raise PrecisionExhaustedError(
            f"f values at {P.certificate()} not certified", place=P.place.label, precision=P.precision
        )
    return classes


def local_norm_is_square(classes: AlgebraClass, place: Place) -> bool:
    r1, r2, r3 = classes.reps
    return is_local_square(r1 * r2 * r3, place)


def _padic_sqrt(r: Fraction, p: int, digits: int) -> Tuple[Fraction, int]:
    """Approximate square root of a p-adic square r and the valuation of its error."""
    e, u = padic_split(r, p)
    if e % 2:
        raise ConstructionError(f"{r} is not a square in Q_{p}")
    digits = max(digits, 3)
    modulus = p**digits
    u_int = (u.numerator * pow(u.denominator, -1, modulus)) % modulus
    s = sympy.sqrt_mod(u_int, modulus)
    if s is None:
        raise ConstructionError(f"{r} is not a square in Q_{p}")
    half = e // 2
    loss = 1 if p == 2 else 0
    return Fraction(p) ** half * int(s), half + digits - loss


def _real_sqrt(r: Fraction, bits: int) -> Tuple[Fraction, Fraction]:
    a, b = r.numerator, r.denominator
    if isqrt(a) ** 2 == a and isqrt(b) ** 2 == b:
        exact = Fraction(isqrt(a), isqrt(b))
        return exact, exact
    scale = 1 << bits
    lo = isqrt(r.numerator * scale * scale // r.denominator)
    return Fraction(lo, scale), Fraction(lo + 1, scale)


def _random_unit(p: int, rng: random.Random) -> int:
    while True:
        u = rng.randrange(1, 4 * p + 1)
        if u % p:
            return u


def _sample_x(
    region: SolvableRegion, C: CoveringModel, p: Optional[int], rng: random.Random
) -> Tuple[Fraction, Dict[int, Fraction]]:
    """A rational x in the region, with any coordinates w_t known exactly."""
    roots, coeffs = C.curve.roots, C.coeffs
    if region.kind == REGION_INTERVAL:
        width = Fraction(rng.randrange(1, 256), rng.randrange(1, 8))
        if region.lower is None:
            return region.upper - width, {}  # type: ignore[operator]
        if region.upper is None:
            return region.lower + width, {}
        t = Fraction(rng.randrange(1, 64), 64)
        return region.lower + (region.upper - region.lower) * t, {}

    assert p is not None
    if region.kind == REGION_DISC:
        s = rng.randrange(0, p**3)
        return region.centre + Fraction(p) ** region.level * s, {}
    if region.kind == REGION_ROOT:
        j = region.root_index
        assert j is not None
        vc = padic_split(Fraction(coeffs[j]), p)[0]
        m = max(0, -((vc - region.level) // 2)) + rng.randrange(0, 2)
        u = _random_unit(p, rng)
        w = Fraction(p) ** m * u
        return roots[j] + coeffs[j] * w * w, {j: w}
    if region.kind == REGION_FAR:
        vc = padic_split(Fraction(coeffs[0]), p)[0]
        big = region.level + 1 + abs(vc) + rng.randrange(0, 2)
        u = _random_unit(p, rng)
        w = Fraction(u) / Fraction(p) ** big
        return roots[0] + coeffs[0] * w * w, {0: w}
    raise ConstructionError(f"unknown region kind {region.kind}")


def _approximate_point(
    C: CoveringModel,
    place: Place,
    x: Fraction,
    exact: Dict[int, Fraction],
    signs: Sequence[int],
    precision: int,
    region: str,
) -> LocalPoint:
    roots, coeffs = C.curve.roots, C.coeffs
    coords: List[Fraction] = [Fraction(1)]
    if place.is_real:
        intervals: List[Tuple[Fraction, Fraction]] = [(Fraction(1), Fraction(1))]
        for t in range(3):
            lo, hi = _real_sqrt((x - roots[t]) / coeffs[t], precision)
            if signs[t] < 0:
                lo, hi = -hi, -lo
            coords.append(lo)
            intervals.append((lo, hi))
        return LocalPoint(
            place=place,
            coordinates=tuple(coords),  # type: ignore[arg-type]
            x=x,
            region=region,
            precision=precision,
            intervals=tuple(intervals),
        )

    assert place.prime is not None
    errors: List[Optional[int]] = [None]
    for t in range(3):
        if t in exact:
            coords.append(signs[t] * exact[t])
            errors.append(None)
            continue
        w, err = _padic_sqrt((x - roots[t]) / coeffs[t], place.prime, precision)
        coords.append(signs[t] * w)
        errors.append(err)
    return LocalPoint(
        place=place,
        coordinates=tuple(coords),  # type: ignore[arg-type]
        x=x,
        region=region,
        precision=precision,
        errors=tuple(errors),
    )


def _regions_for(C: CoveringModel, v: Place) -> List[SolvableRegion]:
    precision = default_precision(C.curve, C.d, v)
    for attempt in range(MAX_PRECISION_DOUBLINGS + 1):
        try:
            return collect_regions(C.curve.roots, C.coeffs, v, precision)
        except PrecisionExhaustedError:
            if attempt == MAX_PRECISION_DOUBLINGS:
                raise
            record_precision_retry("solvable_regions")
            precision *= 2
    raise AssertionError("unreachable")


def local_point(
    C: CoveringModel,
    f: FTriple,
    v: Place,
    precision: Optional[int] = None,
    seed: int = 0,
    variant: int = 0,
) -> LocalPoint:
    """A certified point of C over Q_v at which every f_j has a certified square class.

    ``variant`` k returns the (k+1)-th certified point of the seeded search,
    giving distinct local point choices for the same place.

    Raises:
        NotLocallySolvableError: If C has no Q_v-point.
        PrecisionExhaustedError: If no certified point is found within the attempt budget.
    """
    if precision is None:
        precision = REAL_BASE_BITS if v.is_real else default_precision(C.curve, C.d, v)
    regions = _regions_for(C, v)
    kind = "real" if v.is_real else ("dyadic" if v.is_dyadic else "odd")
    if not regions:
        record_local_point_search(kind, "unsolvable")
        raise NotLocallySolvableError(f"covering of {C.d} on [{C.curve.label}] has no point over Q_{v.label}")

    rng = random.Random(f"{seed}:{v.label}:{C.coeffs}:{C.curve.roots}")
    found = 0
    for attempt in range(LOCAL_POINT_ATTEMPTS):
        region = regions[attempt % len(regions)]
        x, exact = _sample_x(region, C, v.prime, rng)
        signs = [rng.choice((1, -1)) for _ in range(3)]
        point = None
        for doubling in range(MAX_PRECISION_DOUBLINGS + 1):
            candidate = _approximate_point(C, v, x, exact, signs, precision * 2**doubling, region.describe())
            if _certified_f_classes(f, candidate) is not None:
                point = candidate
                break
            record_precision_retry("local_point")
        if point is None:
            continue
        if found == variant:
            record_local_point_search(kind, "found")
            return point
        found += 1

    record_local_point_search(kind, "exhausted")
    raise PrecisionExhaustedError(
        f"no certified local point for {C.d} at {v.label} after {LOCAL_POINT_ATTEMPTS} attempts",
        place=v.label,
        precision=precision,
    )


# ---------------------------------------------------------------------------
# Property report and second descent
# ---------------------------------------------------------------------------


@dataclass
class FPropertyReport:
    """Verdicts on an f-triple: square identity, local norm condition at samples, delta = f."""

    square_identity: bool
    local_norm: List[Tuple[str, bool]] = field(default_factory=list)
    delta_f: List[Tuple[str, bool]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.square_identity and all(ok for _, ok in self.local_norm) and all(ok for _, ok in self.delta_f)


def verify_f_properties(
    C: CoveringModel,
    f: FTriple,
    samples: Sequence[LocalPoint],
    curve_points: Sequence[CurvePoint] = (),
) -> FPropertyReport:
    """Check the square identity, the local norm condition at each sample and,
    on the trivial covering, delta = f at the given rational points of E."""
    report = FPropertyReport(square_identity=square_identity_holds(C, f))
    for P in samples:
        classes = _certified_f_classes(f, P)
        ok = classes is not None and local_norm_is_square(classes, P.place)
        report.local_norm.append((P.place.label, ok))
    if C.d.is_trivial:
        for R in curve_points:
            verdict = delta_f_check(C.curve, f, R)
            if verdict is not None:
                report.delta_f.append((str(R), verdict))
    return report


@dataclass(frozen=True)
class EquationSystem:
    """A polynomial system with integer coefficients."""

    variables: Tuple[str, ...]
    equations: Tuple[str, ...]

    def to_text(self) -> str:
        return "\n".join(f"{eq} = 0" for eq in self.equations)


def _integral(expr, gens) -> str:
    _, p = Poly(expr, *gens, domain="QQ").clear_denoms()
    return sympy.sstr(p.as_expr())


def second_covering(C: CoveringModel, f: FTriple) -> EquationSystem:
    """The 4-covering equations {q1 = q2 = 0, u_j^2 den_j = num_j} in z0..z3, u1..u3."""
    gens = tuple(Z) + tuple(U)
    equations = [_integral(C.q1.as_expr(), gens), _integral(C.q2.as_expr(), gens)]
    for u, num, den in zip(U, f.numerators, f.denominators):
        equations.append(_integral(u**2 * den.as_expr() - num.as_expr(), gens))
    return EquationSystem(variables=tuple(str(g) for g in gens), equations=tuple(equations))
