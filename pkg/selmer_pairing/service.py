"""Orchestration of descent runs, the property suite and corpus scans.

Each public method wraps its stages in ``track_stage`` so durations, errors
and spans are recorded the same way for the CLI and for library callers.
"""

import logging
import random
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from sympy import primerange

from .config import (
    DEFAULT_HEIGHT_BOUND,
    DEFAULT_MAX_WORKERS,
    DEFAULT_SEED,
    DELTA_F_MIN_POINTS,
    EXTENDED_HEIGHT_BOUND,
    ORACLE_COEFF_BOUND,
    ORACLE_PAIRS,
    ORACLE_PRIME_BOUND,
    RECIPROCITY_COEFF_BOUND,
    RECIPROCITY_PAIRS,
    WELL_DEFINEDNESS_CHOICES,
)
from .covering import Z, delta_f_check, square_identity_holds, verify_f_properties
from .descent import add_points, curve_from_ab, descent_map, double_point, new_curve, point_images, point_search, selmer2
from .exceptions import SelmerPairingError
from .metrics import record_curve_processed, track_stage
from .models import AlgebraClass, Curve2T, CurvePoint, Place, SelmerElement
from .pairing import DescentRun, audit_excluded_places, corpus_curves, run_descent, scan_corpus
from .report_models import DescentReport, PropertyResult, RunConfig, ScanReport, VerifyReport
from .symbols import hilbert_symbol, reciprocity_check, solvability_oracle_auto

logger = logging.getLogger(__name__)

# f_j -> c_j f_j with c1 c2 c3 a square; primes stay within the pairing's odd place range
_RESCALE_CONSTANTS = (Fraction(3), Fraction(5), Fraction(15))
_RESCALE_PRIMES = (3, 5)
_DELTA_F_POINT_LIMIT = 12


def curve_from_config(config: RunConfig) -> Curve2T:
    """The curve named by a RunConfig."""
    if config.roots is not None:
        return new_curve(*config.roots)
    assert config.ab is not None
    return curve_from_ab(*config.ab)


def _random_rational(rng: random.Random, bound: int) -> Fraction:
    while True:
        num = rng.randint(-bound, bound)
        if num:
            return Fraction(num, rng.randint(1, bound))


def _result(name: str, outcomes: Sequence[Tuple[str, bool]]) -> PropertyResult:
    failures = [label for label, ok in outcomes if not ok]
    return PropertyResult(
        name=name,
        passed=not failures,
        checked=len(outcomes),
        details=f"failed at {failures[0]}" if failures else None,
    )


class DescentService:
    """Runs descents, property checks and corpus scans with shared settings."""

    def __init__(
        self,
        seed: int = DEFAULT_SEED,
        precision: Optional[int] = None,
        max_workers: int = DEFAULT_MAX_WORKERS,
    ):
        self.seed = seed
        self.precision = precision
        self.max_workers = max_workers

    def _descent(self, E: Curve2T, height_bound: int) -> DescentRun:
        with track_stage("descent", curve=E.label):
            try:
                run = run_descent(
                    E,
                    height_bound=height_bound,
                    seed=self.seed,
                    precision_base=self.precision,
                    max_workers=self.max_workers,
                )
            except SelmerPairingError as e:
                record_curve_processed(e.code)
                raise
        record_curve_processed("ok")
        return run

    def run(self, config: RunConfig) -> DescentReport:
        """refined_bounds on the configured curve."""
        E = curve_from_config(config)
        logger.info(f"Running descent on [{E.label}] with height bound {config.height_bound}")
        return self._descent(E, config.height_bound).report

    def scan(
        self,
        curves: Optional[Sequence[Tuple[int, int, int]]] = None,
        height_bound: int = DEFAULT_HEIGHT_BOUND,
        extended_bound: int = EXTENDED_HEIGHT_BOUND,
    ) -> ScanReport:
        with track_stage("scan"):
            report = scan_corpus(curves, height_bound=height_bound, extended_bound=extended_bound, seed=self.seed)
        logger.info(f"Scanned {len(report.curves)} curves, {len(report.improved)} with improved bounds")
        return report

    def verify(self, config: RunConfig) -> VerifyReport:
        """Every property check on the configured curve.

        Checks that need no curve (reciprocity, oracle equivalence) are
        included too, so a symbol fault is always caught.
        """
        E = curve_from_config(config)
        run = self._descent(E, config.height_bound)
        checks: List[Tuple[str, Callable[[], PropertyResult]]] = [
            ("reciprocity", self.check_reciprocity),
            ("oracle_equivalence", self.check_oracle_equivalence),
            ("alternating", lambda: self.check_alternating(run)),
            ("symmetric_even_rank", lambda: self.check_symmetric_even_rank(run)),
            ("bilinear", lambda: self.check_bilinear(run)),
            ("pv_independence", lambda: self.check_pv_independence(run)),
            ("excluded_places", lambda: self.check_excluded_places(run)),
            ("square_identity", lambda: self.check_square_identity(run)),
            ("local_norm", lambda: self.check_local_norm(run)),
            ("delta_f", lambda: self.check_delta_f(run)),
            ("kernel_soundness", lambda: self.check_kernel_soundness(run)),
            ("selmer_containment", lambda: self.check_selmer_containment(run)),
            ("homomorphism", lambda: self.check_homomorphism(run)),
            ("rank_bound", lambda: self.check_rank_bound(run)),
        ]
        results = []
        for name, check in checks:
            with track_stage("verify", property=name):
                result = check()
            if not result.passed:
                logger.warning(f"Property {name} failed on [{E.label}]: {result.details}")
            results.append(result)
        return VerifyReport(curve=E.label, properties=results)

    # -- symbols --------------------------------------------------------------

    def check_reciprocity(self, pairs: int = RECIPROCITY_PAIRS) -> PropertyResult:
        rng = random.Random(f"{self.seed}:reciprocity")
        outcomes = []
        for _ in range(pairs):
            a, b = _random_rational(rng, RECIPROCITY_COEFF_BOUND), _random_rational(rng, RECIPROCITY_COEFF_BOUND)
            outcomes.append((f"({a}, {b})", reciprocity_check(a, b) == 1))
        return _result("reciprocity", outcomes)

    def check_oracle_equivalence(self, pairs: int = ORACLE_PAIRS) -> PropertyResult:
        rng = random.Random(f"{self.seed}:oracle")
        outcomes = []
        for p in primerange(2, ORACLE_PRIME_BOUND + 1):
            v = Place.finite(p)
            for _ in range(pairs):
                a, b = _random_rational(rng, ORACLE_COEFF_BOUND), _random_rational(rng, ORACLE_COEFF_BOUND)
                outcomes.append((f"({a}, {b})_{p}", hilbert_symbol(a, b, v) == solvability_oracle_auto(a, b, v)))
        return _result("oracle_equivalence", outcomes)

    # -- pairing structure ------------------------------------------------------

    def check_alternating(self, run: DescentRun) -> PropertyResult:
        n = run.matrix.size
        return _result("alternating", [(f"a{i + 1}", run.matrix.entries[i][i] == 0) for i in range(n)])

    def check_symmetric_even_rank(self, run: DescentRun) -> PropertyResult:
        M = run.matrix
        return _result("symmetric_even_rank", [("symmetric", M.is_symmetric()), ("even rank", M.rank % 2 == 0)])

    def check_bilinear(self, run: DescentRun) -> PropertyResult:
        outcomes = run.engine.check_bilinearity(run.selmer, run.matrix)
        return _result("bilinear", [(f"a{i + 1}*a{j + 1} vs a{k + 1}", ok) for (i, j, k), ok in outcomes])

    def check_pv_independence(self, run: DescentRun, choices: int = WELL_DEFINEDNESS_CHOICES) -> PropertyResult:
        """Recompute basis pairings with other local points, a constant rescaling of f and f times a square."""
        engine, S, M = run.engine, run.selmer, run.matrix
        outcomes = []
        for i, a in enumerate(S.basis):
            f = engine.f_triple(a)
            variants = [
                ("rescaled", f.rescaled(_RESCALE_CONSTANTS), _RESCALE_PRIMES),
                ("times_square", f.times_square(0, Z[1] + 2 * Z[0], Z[0]), ()),
            ]
            for j, b in enumerate(S.basis):
                expected = M.entries[i][j]
                for variant in range(1, choices):
                    bit = engine.pairing(a, b, variant=variant).bit
                    outcomes.append((f"<a{i + 1}, a{j + 1}> point choice {variant}", bit == expected))
                for label, g, extra in variants:
                    bit = engine.pairing(a, b, f_override=g, extra_primes=extra).bit
                    outcomes.append((f"<a{i + 1}, a{j + 1}> {label}", bit == expected))
        return _result("pv_independence", outcomes)

    def check_excluded_places(self, run: DescentRun) -> PropertyResult:
        S = run.selmer
        outcomes = []
        for i in range(min(S.dimension, 2)):
            j = (i + 1) % S.dimension
            for p, term in audit_excluded_places(run.engine, S.basis[i], S.basis[j]):
                outcomes.append((f"<a{i + 1}, a{j + 1}> at {p}", term == 1))
        return _result("excluded_places", outcomes)

    # -- f-triples --------------------------------------------------------------

    def check_square_identity(self, run: DescentRun) -> PropertyResult:
        outcomes = []
        for a in run.selmer.basis:
            C = run.engine.covering(a)
            outcomes.append((str(a), square_identity_holds(C, run.engine.f_triple(a))))
        return _result("square_identity", outcomes)

    def check_local_norm(self, run: DescentRun) -> PropertyResult:
        engine = run.engine
        outcomes = []
        for a in run.selmer.basis:
            samples = [P for key, P in engine.cached_points() if key == a.reps]
            report = verify_f_properties(engine.covering(a), engine.f_triple(a), samples)
            outcomes.extend((f"{a} at {label}", ok) for label, ok in report.local_norm)
        return _result("local_norm", outcomes)

    def check_delta_f(self, run: DescentRun) -> PropertyResult:
        """delta = f on the trivial covering at rational points built from the searched points."""
        E = run.curve
        trivial = SelmerElement(classes=AlgebraClass.identity())
        f = run.engine.f_triple(trivial)
        outcomes = []
        for R in _delta_f_points(E, run.points):
            verdict = delta_f_check(E, f, R)
            if verdict is not None:
                outcomes.append((str(R), verdict))
        result = _result("delta_f", outcomes)
        if not outcomes:
            result.details = "no rational points of order > 2 found"
        elif result.passed and len(outcomes) < DELTA_F_MIN_POINTS:
            result.details = f"only {len(outcomes)} points available"
        return result

    # -- descent ----------------------------------------------------------------

    def check_kernel_soundness(self, run: DescentRun) -> PropertyResult:
        """Images of rational points pair trivially with every basis element."""
        E, S, engine = run.curve, run.selmer, run.engine
        outcomes = []
        for P in list(E.torsion_points) + run.points[:_DELTA_F_POINT_LIMIT]:
            image = descent_map(E, P)
            if image.is_trivial:
                continue
            coords = S.coordinates(image) if S.contains(image) else None
            if coords is None:
                outcomes.append((f"{P} outside S^2", False))
                continue
            for j in range(S.dimension):
                bit = sum(c * run.matrix.entries[i][j] for i, c in enumerate(coords)) % 2
                outcomes.append((f"<image of {P}, a{j + 1}>", bit == 0))
        for P, cls in point_images(E, run.points)[:2]:
            element = SelmerElement(classes=cls)
            for j, b in enumerate(S.basis):
                outcomes.append((f"<{element}, a{j + 1}> direct", engine.pairing(element, b).value == 1))
        return _result("kernel_soundness", outcomes)

    def check_selmer_containment(self, run: DescentRun) -> PropertyResult:
        E, S = run.curve, run.selmer
        return _result("selmer_containment", [(str(P), S.contains(descent_map(E, P))) for P in run.points])

    def check_homomorphism(self, run: DescentRun) -> PropertyResult:
        E = run.curve
        points = list(E.torsion_points) + run.points[:_DELTA_F_POINT_LIMIT]
        outcomes = []
        for i, P in enumerate(points):
            for Q in points[i:]:
                lhs = descent_map(E, add_points(E, P, Q))
                outcomes.append((f"{P} + {Q}", lhs == descent_map(E, P) * descent_map(E, Q)))
        return _result("homomorphism", outcomes)

    def check_corpus_soundness(
        self,
        curves: Optional[Sequence[Tuple[int, int, int]]] = None,
        height_bound: int = DEFAULT_HEIGHT_BOUND,
    ) -> PropertyResult:
        """Over every corpus curve, found points map into S^2 and descent_map is additive on all pairs."""
        outcomes = []
        for roots in curves if curves is not None else corpus_curves():
            E = new_curve(*roots)
            with track_stage("corpus_soundness", curve=E.label):
                S = selmer2(E, self.precision)
                points = list(E.torsion_points) + point_search(E, height_bound)
            images = [descent_map(E, P) for P in points]
            outcomes.extend((f"[{E.label}] {P} in S^2", S.contains(img)) for P, img in zip(points, images))
            for i, P in enumerate(points):
                for j in range(i, len(points)):
                    lhs = descent_map(E, add_points(E, P, points[j]))
                    outcomes.append((f"[{E.label}] {P} + {points[j]}", lhs == images[i] * images[j]))
        return _result("corpus_soundness", outcomes)

    def check_rank_bound(self, run: DescentRun) -> PropertyResult:
        r = run.report
        return _result(
            "rank_bound",
            [
                ("points within bound", not r.contradiction),
                ("bound formula", r.rank_upper_bound == r.selmer_dimension - 2 - r.matrix_rank),
            ],
        )


def _delta_f_points(E: Curve2T, searched: Sequence[CurvePoint]) -> List[CurvePoint]:
    """Rational points with y != 0: searched points, their doubles and translates by 2-torsion."""
    out: List[CurvePoint] = []
    seen = set()
    base = [P for P in searched if not P.is_infinity and P.y != 0][:_DELTA_F_POINT_LIMIT]
    candidates = list(base)
    for P in base:
        candidates.append(double_point(E, P))
        candidates.extend(add_points(E, P, T) for T in E.torsion_points)
    for R in candidates:
        key = (R.x, R.y)
        if R.is_infinity or R.y == 0 or key in seen:
            continue
        seen.add(key)
        out.append(R)
    return out[:_DELTA_F_POINT_LIMIT]
