"""Tests for covering models, f-triples and local points."""

from fractions import Fraction

import pytest
import sympy
from sympy import Poly

from selmer_pairing.covering import (
    Z,
    LocalPoint,
    conic_point,
    construct_f,
    delta_f_check,
    evaluate_f,
    local_norm_is_square,
    local_point,
    make_covering,
    rational_point_classes,
    second_covering,
    singular_quadrics,
    square_identity_holds,
    trivial_covering_image,
    trivial_covering_point,
    verify_f_properties,
)
from selmer_pairing.descent import double_point
from selmer_pairing.exceptions import ConstructionError, InvalidInputError, NotLocallySolvableError
from selmer_pairing.models import CurvePoint, Place, SelmerElement

TRIVIAL = SelmerElement.from_reps(1, 1, 1)
GENERATOR = CurvePoint(x=-3, y=9)
GENERATOR_LIFT = (Fraction(1), Fraction(-7, 2), Fraction(5, 2), Fraction(1, 2))


def _same(poly, expr):
    return sympy.expand(poly.as_expr() - expr) == 0


class TestCoveringModel:
    """Tests for the quadric-intersection model."""

    def test_quadrics(self, congruent_one):
        """Test the two quadrics of the trivial covering of y^2 = x^3 - x."""
        z0, z1, z2, z3 = Z
        C = make_covering(congruent_one, TRIVIAL)
        assert _same(C.q1, z1**2 - z2**2 - z0**2)
        assert _same(C.q2, z1**2 - z3**2 - 2 * z0**2)
        assert C.coeffs == (1, 1, 1)

    def test_matrices_are_diagonal(self, congruent_one):
        """Test the symmetric matrices of q1 and q2."""
        m1, m2 = make_covering(congruent_one, TRIVIAL).matrices()
        assert [m1[i][i] for i in range(4)] == [-1, 1, -1, 0]
        assert [m2[i][i] for i in range(4)] == [-2, 1, 0, -1]

    def test_contains_point(self, congruent_one, congruent_six):
        """Test membership of rational points."""
        assert make_covering(congruent_one, TRIVIAL).contains_point((0, 1, 1, 1))
        assert not make_covering(congruent_one, TRIVIAL).contains_point((0, 0, 0, 0))
        assert make_covering(congruent_six, TRIVIAL).contains_point(GENERATOR_LIFT)

    def test_covering_map_doubles(self, congruent_six):
        """Test that the trivial covering lift of R maps to 2R."""
        C = make_covering(congruent_six, TRIVIAL)
        assert C.covering_map(GENERATOR_LIFT) == double_point(congruent_six, GENERATOR)

    def test_ideal_membership(self, congruent_one):
        """Test in_ideal on members and non-members."""
        C = make_covering(congruent_one, TRIVIAL)
        assert C.in_ideal(Z[0] * C.q1.as_expr() + Z[3] * C.q2.as_expr())
        assert not C.in_ideal(Z[0])

    def test_norm_violation_rejected(self, congruent_one):
        """Test that make_covering rejects a triple with nonsquare norm."""
        with pytest.raises(InvalidInputError):
            make_covering(congruent_one, SelmerElement.from_reps(2, 1, 1))

    def test_singular_quadrics(self, congruent_one):
        """Test that the pencil has four singular members."""
        C = make_covering(congruent_one, TRIVIAL)
        quadrics = singular_quadrics(C)
        assert len(quadrics) == 4
        for q in quadrics:
            assert sympy.Matrix(sympy.hessian(q.as_expr(), Z)).det() == 0


class TestConicPoint:
    """Tests for rational points on diagonal conics."""

    def test_smallest_point(self):
        """Test the deterministic choice of point."""
        assert conic_point(-1, 1, -1) == (0, 1, -1)
        assert conic_point(-2, 1, -1) == (0, 1, -1)

    def test_point_on_conic(self):
        """Test that a returned point lies on the conic and is primitive."""
        u = conic_point(2, 1, -3)
        assert 2 * u[0] ** 2 + u[1] ** 2 - 3 * u[2] ** 2 == 0
        assert sympy.igcd(*u) == 1

    def test_no_rational_point(self):
        """Test that a definite conic raises ConstructionError."""
        with pytest.raises(ConstructionError):
            conic_point(1, 1, 1, bound=4)

    def test_zero_coefficient_rejected(self):
        """Test that degenerate conics raise InvalidInputError."""
        with pytest.raises(InvalidInputError):
            conic_point(0, 1, 1)


class TestFTriple:
    """Tests for the f-triple construction."""

    def test_trivial_tangent_forms(self, congruent_one):
        """Test the tangent planes of the trivial covering."""
        z0, z1, z2, z3 = Z
        f = construct_f(make_covering(congruent_one, TRIVIAL))
        assert _same(f.tangent_forms[0], z2 + z3)
        assert _same(f.tangent_forms[1], z1 + z3)
        assert _same(f.tangent_forms[2], z1 + z2)

    def test_square_identity(self, congruent_six):
        """Test f1 f2 f3 = g^2 on a nontrivial covering."""
        C = make_covering(congruent_six, SelmerElement.from_reps(3, -3, -1))
        f = construct_f(C)
        assert square_identity_holds(C, f)

    def test_rescaling(self, congruent_one):
        """Test that only square-norm rescalings keep the square identity."""
        C = make_covering(congruent_one, TRIVIAL)
        f = construct_f(C)
        assert not square_identity_holds(C, f.rescaled((2, 1, 1)))
        assert square_identity_holds(C, f.rescaled((3, 5, 15)))
        assert square_identity_holds(C, f.times_square(0, Z[1] + 2 * Z[0], Z[0]))

    def test_rescaling_rejects_zero(self, congruent_one):
        """Test that a zero constant raises InvalidInputError."""
        f = construct_f(make_covering(congruent_one, TRIVIAL))
        with pytest.raises(InvalidInputError):
            f.rescaled((0, 1, 1))

    def test_values_at_pole(self, congruent_one):
        """Test that evaluation on z0 = 0 raises InvalidInputError."""
        f = construct_f(make_covering(congruent_one, TRIVIAL))
        with pytest.raises(InvalidInputError, match="zero or pole"):
            f.values_at((0, 1, 1, 1))

    def test_second_covering(self, congruent_one):
        """Test the shape of the 4-covering system."""
        C = make_covering(congruent_one, TRIVIAL)
        system = second_covering(C, construct_f(C))
        assert system.variables == ("z0", "z1", "z2", "z3", "u1", "u2", "u3")
        lines = system.to_text().splitlines()
        assert len(lines) == 5
        assert all(line.endswith(" = 0") for line in lines)


class TestTrivialCovering:
    """Tests for the delta = f consistency check on the trivial covering."""

    def test_lift(self, congruent_six):
        """Test the lift of (-3, 9) and its inverse."""
        assert trivial_covering_point(congruent_six, GENERATOR) == GENERATOR_LIFT
        assert trivial_covering_image(congruent_six, GENERATOR_LIFT) == GENERATOR

    def test_lift_rejects_torsion(self, congruent_six):
        """Test that 2-torsion points have no lift with z0 = 1."""
        with pytest.raises(InvalidInputError):
            trivial_covering_point(congruent_six, congruent_six.torsion_points[0])

    def test_classes_match_descent_map(self, congruent_six):
        """Test that f at the lift has the classes of the descent map."""
        f = construct_f(make_covering(congruent_six, TRIVIAL))
        assert rational_point_classes(f, GENERATOR_LIFT).reps == (3, -3, -1)
        for R in [GENERATOR, CurvePoint(x=12, y=36), CurvePoint(x=-2, y=8)]:
            assert delta_f_check(congruent_six, f, R) is True
        assert delta_f_check(congruent_six, f, congruent_six.torsion_points[1]) is None


class TestLocalPoints:
    """Tests for local point construction and f evaluation."""

    def test_exact_point_evaluation(self, congruent_six):
        """Test evaluate_f at an exact rational point viewed in Q_5."""
        C = make_covering(congruent_six, TRIVIAL)
        f = construct_f(C)
        P = LocalPoint(
            place=Place.finite(5), coordinates=GENERATOR_LIFT, x=Fraction(25, 4), region="exact", precision=8
        )
        classes = evaluate_f(f, P)
        assert classes.reps == (2, 2, 1)
        assert local_norm_is_square(classes, P.place)
        report = verify_f_properties(C, f, [P], curve_points=[GENERATOR])
        assert report.passed

    def test_real_point_evaluation(self, congruent_six):
        """Test evaluate_f at the real place on a point carrying (lo, hi) intervals."""
        f = construct_f(make_covering(congruent_six, TRIVIAL))
        P = LocalPoint(
            place=Place.real(),
            coordinates=GENERATOR_LIFT,
            x=Fraction(25, 4),
            region="exact",
            precision=64,
            intervals=tuple((c, c) for c in GENERATOR_LIFT),
        )
        assert evaluate_f(f, P).reps == (1, -1, -1)

    @pytest.mark.parametrize("place", [Place.real(), Place.finite(2), Place.finite(3)])
    def test_local_point_norm(self, congruent_one, place):
        """Test that constructed local points satisfy the local norm condition."""
        C = make_covering(congruent_one, TRIVIAL)
        f = construct_f(C)
        P = local_point(C, f, place)
        assert P.place == place
        assert local_norm_is_square(evaluate_f(f, P), place)

    def test_local_point_deterministic(self, congruent_one):
        """Test that the seeded search is reproducible and variants differ."""
        C = make_covering(congruent_one, TRIVIAL)
        f = construct_f(C)
        first = local_point(C, f, Place.real(), seed=3)
        assert local_point(C, f, Place.real(), seed=3) == first
        assert local_point(C, f, Place.real(), seed=3, variant=1) != first

    def test_certificate(self, congruent_one):
        """Test the certificate fields of a real point."""
        C = make_covering(congruent_one, TRIVIAL)
        cert = local_point(C, construct_f(C), Place.real()).certificate()
        assert cert["place"] == "inf"
        assert cert["kind"] == "rational intervals"

    def test_no_real_point(self, congruent_one):
        """Test that a covering without real points raises NotLocallySolvableError."""
        f = construct_f(make_covering(congruent_one, TRIVIAL))
        C = make_covering(congruent_one, SelmerElement.from_reps(-1, -1, 1))
        with pytest.raises(NotLocallySolvableError):
            local_point(C, f, Place.real())
