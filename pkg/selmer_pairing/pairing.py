"""Cassels-Tate pairing on S^2 from Hilbert symbols of f at local points.

<a, a'> is the product over places v of (f(P_v), M)_v, where f is the
f-triple on the covering of a, P_v a certified local point on it and M the
algebra class of a'. The product is truncated to a certified finite place
set: at odd p of good reduction for the covering where M is a unit triple,
the local term does not depend on P_v, and a point with unit f values exists
once p + 1 - 2 sqrt(p) exceeds the ten possible zeros and poles of f mod p.
"""

import logging
import random
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import isqrt
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from sympy import primerange

from .arith import legendre_symbol, prime_support
from .config import (
    AUDIT_EXCLUDED_PLACES,
    BILINEARITY_SAMPLES,
    CORPUS_ROOT_RANGE,
    DEFAULT_HEIGHT_BOUND,
    DEFAULT_MAX_WORKERS,
    DEFAULT_SEED,
    EXTENDED_HEIGHT_BOUND,
    HASSE_EXCLUSION_BOUND,
    REAL_BASE_BITS,
    REPORTED_POINTS_LIMIT,
    SCAN_SHOWCASE_CURVES,
)
from .covering import (
    CoveringModel,
    EquationSystem,
    FTriple,
    LocalPoint,
    construct_f,
    evaluate_f,
    local_point,
    make_covering,
    second_covering,
)
from .descent import (
    covering_point_search,
    default_precision,
    descent_map,
    independent_point_count,
    is_torsion,
    new_curve,
    point_search,
    selmer2,
)
from .exceptions import SelmerPairingError
from .metrics import record_pairing_entry, traced
from .models import AlgebraClass, Curve2T, CurvePoint, Place, SelmerElement, SelmerGroup
from .report_models import CorpusEntry, DescentReport, LocalTerm, PairingMatrix, PairingValue, PointImage, ScanReport
from .symbols import algebra_symbol

logger = logging.getLogger(__name__)

CacheKey = Tuple[int, int, int]

_AUDIT_PRIME_CEILING = 200


def _base_primes(E: Curve2T, a: SelmerElement, a2: SelmerElement) -> Set[int]:
    primes = {2} | set(prime_support(E.discriminant))
    for rep in a.reps + a2.reps:
        if abs(rep) > 1:
            primes |= set(prime_support(rep))
    return primes


def _unit_triple_is_residue(M: AlgebraClass, p: int) -> bool:
    return all(legendre_symbol(r % p, p) == 1 for r in M.reps)


def _has_nonunit_value(f: FTriple, P: LocalPoint) -> bool:
    assert P.place.prime is not None
    return any(r % P.place.prime == 0 for r in evaluate_f(f, P).reps)


def relevant_places(
    E: Curve2T,
    a: SelmerElement,
    a2: SelmerElement,
    f: Optional[FTriple] = None,
    points: Optional[Mapping[Place, LocalPoint]] = None,
    extra_primes: Iterable[int] = (),
) -> List[Place]:
    """Places where (f(P_v), M)_v can differ from +1.

    The real place, 2, the primes of the discriminant and of the supports
    of a and a' always; an odd prime up to the exclusion bound when some M_j
    is a non-residue there, unless the supplied point has unit f values;
    any odd prime where a supplied point gives f a non-unit class.
    ``extra_primes`` are added unconditionally.
    """
    points = points or {}
    M = a2.classes
    primes = _base_primes(E, a, a2) | {abs(p) for p in extra_primes}
    for p in primerange(3, HASSE_EXCLUSION_BOUND + 1):
        if p in primes or _unit_triple_is_residue(M, p):
            continue
        P = points.get(Place.finite(p))
        if P is None or f is None or _has_nonunit_value(f, P):
            primes.add(p)
    if f is not None:
        for place, P in points.items():
            if place.is_real or place.prime in primes:
                continue
            if _has_nonunit_value(f, P):
                primes.add(place.prime)  # type: ignore[arg-type]
    return [Place.real()] + [Place.finite(p) for p in sorted(primes)]


class PairingEngine:
    """Pairing computations on one curve with per-element caches.

    Coverings, f-triples and local points are cached per Selmer element;
    concurrent builders race and the first stored value wins, which is safe
    because construction is deterministic.
    """

    def __init__(
        self,
        curve: Curve2T,
        seed: int = DEFAULT_SEED,
        precision_base: Optional[int] = None,
        real_bits: int = REAL_BASE_BITS,
        max_workers: int = DEFAULT_MAX_WORKERS,
    ):
        self.curve = curve
        self.seed = seed
        self.precision_base = precision_base
        self.real_bits = real_bits
        self.max_workers = max_workers
        self._lock = threading.RLock()
        self._coverings: Dict[CacheKey, CoveringModel] = {}
        self._ftriples: Dict[CacheKey, FTriple] = {}
        self._points: Dict[Tuple[CacheKey, str, int], LocalPoint] = {}
        self._places: Set[str] = set()

    def covering(self, a: SelmerElement) -> CoveringModel:
        key = a.reps
        with self._lock:
            cached = self._coverings.get(key)
        if cached is not None:
            return cached
        built = make_covering(self.curve, a)
        with self._lock:
            return self._coverings.setdefault(key, built)

    def f_triple(self, a: SelmerElement) -> FTriple:
        key = a.reps
        with self._lock:
            cached = self._ftriples.get(key)
        if cached is not None:
            return cached
        built = construct_f(self.covering(a))
        with self._lock:
            return self._ftriples.setdefault(key, built)

    def second_covering(self, a: SelmerElement) -> EquationSystem:
        return second_covering(self.covering(a), self.f_triple(a))

    def _precision(self, a: SelmerElement, v: Place) -> int:
        if v.is_real:
            return self.real_bits
        return default_precision(self.curve, a, v, self.precision_base)

    def point(self, a: SelmerElement, v: Place, variant: int = 0, f: Optional[FTriple] = None) -> LocalPoint:
        """Certified local point on the covering of a; cached unless f overrides the stored triple."""
        C = self.covering(a)
        if f is not None:
            return local_point(C, f, v, self._precision(a, v), seed=self.seed, variant=variant)
        key = (a.reps, v.label, variant)
        with self._lock:
            cached = self._points.get(key)
        if cached is not None:
            return cached
        built = local_point(C, self.f_triple(a), v, self._precision(a, v), seed=self.seed, variant=variant)
        with self._lock:
            return self._points.setdefault(key, built)

    def pairing(
        self,
        a: SelmerElement,
        a2: SelmerElement,
        variant: int = 0,
        f_override: Optional[FTriple] = None,
        extra_primes: Iterable[int] = (),
    ) -> PairingValue:
        """<a, a2> with its local terms.

        Raises:
            ConstructionError, PrecisionExhaustedError: Propagated; no value is
            returned without a certified point at every place used.
        """
        f = f_override if f_override is not None else self.f_triple(a)
        M = a2.classes
        places = relevant_places(self.curve, a, a2, extra_primes=extra_primes)
        terms: List[LocalTerm] = []
        value = 1
        for v in places:
            P = self.point(a, v, variant=variant, f=f_override)
            classes = evaluate_f(f, P)
            term = algebra_symbol(classes, M, v)
            terms.append(LocalTerm(place=v.label, value=term, f_classes=classes.reps))
            value *= term
        with self._lock:
            self._places.update(v.label for v in places)
        record_pairing_entry(value)
        logger.debug(f"<{a}, {a2}> = {value:+d} over {[t.place for t in terms]}")
        return PairingValue(value=value, local_terms=terms)

    def matrix(self, S: SelmerGroup) -> PairingMatrix:
        """All basis pairings; entries run on a thread pool when max_workers > 1."""
        n = S.dimension
        pairs = [(i, j) for i in range(n) for j in range(n)]

        def entry(ij: Tuple[int, int]) -> int:
            i, j = ij
            return self.pairing(S.basis[i], S.basis[j]).bit

        if self.max_workers > 1 and len(pairs) > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                bits = list(pool.map(entry, pairs))
        else:
            bits = [entry(ij) for ij in pairs]
        entries = [bits[i * n : (i + 1) * n] for i in range(n)]
        return PairingMatrix(basis=list(S.basis), entries=entries)

    def check_bilinearity(
        self, S: SelmerGroup, matrix: PairingMatrix, samples: int = BILINEARITY_SAMPLES
    ) -> List[Tuple[Tuple[int, int, int], bool]]:
        """Compare <a_i a_j, a_k> with the entry sums for seeded triples of basis indices."""
        n = S.dimension
        if n == 0:
            return []
        rng = random.Random(f"{self.seed}:bilinear:{self.curve.label}")
        out = []
        for _ in range(samples):
            i, j, k = rng.randrange(n), rng.randrange(n), rng.randrange(n)
            product = S.basis[i] * S.basis[j]
            bit = self.pairing(product, S.basis[k]).bit
            expected = (matrix.entries[i][k] + matrix.entries[j][k]) % 2
            out.append(((i, j, k), bit == expected))
        return out

    def certificates(self) -> Dict[str, Dict[str, str]]:
        with self._lock:
            items = sorted(self._points.items(), key=lambda kv: (kv[0][0], kv[0][2], kv[0][1]))
        return {
            f"{','.join(str(r) for r in key[0])}@{key[1]}" + (f"#{key[2]}" if key[2] else ""): P.certificate()
            for key, P in items
        }

    def cached_points(self) -> List[Tuple[CacheKey, LocalPoint]]:
        """(element reps, point) for every cached local point."""
        with self._lock:
            return [(key[0], P) for key, P in sorted(self._points.items(), key=lambda kv: kv[0])]

    def places_used(self) -> List[str]:
        with self._lock:
            labels = list(self._places)
        return sorted(labels, key=lambda s: (s != "inf", int(s) if s != "inf" else 0))


def cassels_pairing(E: Curve2T, a: SelmerElement, a2: SelmerElement, seed: int = DEFAULT_SEED) -> PairingValue:
    return PairingEngine(E, seed=seed).pairing(a, a2)


def pairing_matrix(E: Curve2T, S: SelmerGroup, seed: int = DEFAULT_SEED, max_workers: int = 1) -> PairingMatrix:
    return PairingEngine(E, seed=seed, max_workers=max_workers).matrix(S)


def audit_excluded_places(
    engine: PairingEngine, a: SelmerElement, a2: SelmerElement, count: int = AUDIT_EXCLUDED_PLACES
) -> List[Tuple[int, int]]:
    """Directly computed local terms at seeded excluded odd primes, as (prime, term) pairs."""
    used = {v.prime for v in relevant_places(engine.curve, a, a2) if not v.is_real}
    excluded = [p for p in primerange(3, _AUDIT_PRIME_CEILING) if p not in used]
    rng = random.Random(f"{engine.seed}:audit:{a.reps}:{a2.reps}")
    sample = sorted(rng.sample(excluded, min(count, len(excluded))))
    f = engine.f_triple(a)
    out = []
    for p in sample:
        v = Place.finite(p)
        P = engine.point(a, v)
        out.append((p, algebra_symbol(evaluate_f(f, P), a2.classes, v)))
    return out


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------


def corpus_curves(lo: int = CORPUS_ROOT_RANGE[0], hi: int = CORPUS_ROOT_RANGE[1]) -> List[Tuple[int, int, int]]:
    """Distinct root triples in [lo, hi] up to translation.

    Each class is represented by the triple with the smallest |e1 + e2 + e3|,
    ties broken lexicographically.
    """
    best: Dict[Tuple[int, int], Tuple[int, int, int]] = {}
    for e1 in range(lo, hi + 1):
        for e2 in range(e1 + 1, hi + 1):
            for e3 in range(e2 + 1, hi + 1):
                key = (e2 - e1, e3 - e1)
                cand = (e1, e2, e3)
                cur = best.get(key)
                if cur is None or (abs(sum(cand)), cand) < (abs(sum(cur)), cur):
                    best[key] = cand
    return sorted(best.values(), key=lambda t: (t[2] - t[0], t))


# ---------------------------------------------------------------------------
# Refined bounds
# ---------------------------------------------------------------------------


@dataclass
class DescentRun:
    """Intermediate results of refined_bounds, kept for the property suite."""

    curve: Curve2T
    selmer: SelmerGroup
    points: List[CurvePoint]
    engine: PairingEngine
    matrix: PairingMatrix
    report: DescentReport


def run_descent(
    E: Curve2T,
    height_bound: int = DEFAULT_HEIGHT_BOUND,
    seed: int = DEFAULT_SEED,
    precision_base: Optional[int] = None,
    max_workers: int = DEFAULT_MAX_WORKERS,
) -> DescentRun:
    """selmer2, point_search and the pairing matrix, assembled into a DescentReport."""
    S = selmer2(E, precision_base)
    points = point_search(E, height_bound)
    images = [(P, descent_map(E, P)) for P in points if not is_torsion(E, P)][:REPORTED_POINTS_LIMIT]
    independent = independent_point_count(E, points)

    engine = PairingEngine(E, seed=seed, precision_base=precision_base, max_workers=max_workers)
    M = engine.matrix(S)
    rank = M.rank
    plain = S.dimension - 2
    bound = plain - rank
    contradiction = independent > bound
    if contradiction:
        logger.error(f"[{E.label}]: {independent} independent points exceed the rank bound {bound}")

    report = DescentReport(
        curve=E.label,
        discriminant=E.discriminant,
        selmer_basis=[b.reps for b in S.basis],
        selmer_dimension=S.dimension,
        point_images=[PointImage(point=(str(P.x), str(P.y)), image=cls.reps) for P, cls in images],
        pairing_matrix=M.rows(),
        matrix_rank=rank,
        rank_upper_bound=bound,
        sha2_lower_bound=rank,
        places_used=engine.places_used(),
        certificates=engine.certificates(),
        plain_rank_bound=plain,
        independent_points=independent,
        contradiction=contradiction,
        second_coverings={
            ",".join(str(r) for r in b.reps): engine.second_covering(b).to_text().splitlines() for b in S.basis
        },
    )
    logger.info(f"[{E.label}]: dim S^2 = {S.dimension}, pairing rank {rank}, rank <= {bound}")
    return DescentRun(curve=E, selmer=S, points=points, engine=engine, matrix=M, report=report)


@traced("refined_bounds")
def refined_bounds(
    E: Curve2T,
    height_bound: int = DEFAULT_HEIGHT_BOUND,
    seed: int = DEFAULT_SEED,
    precision_base: Optional[int] = None,
    max_workers: int = DEFAULT_MAX_WORKERS,
) -> DescentReport:
    """rank E(Q) <= dim S^2 - 2 - rank of the pairing matrix; Sha[2] has dimension >= that rank."""
    return run_descent(E, height_bound, seed, precision_base, max_workers).report


def extended_point_count(E: Curve2T, S: SelmerGroup, bound: int = EXTENDED_HEIGHT_BOUND) -> int:
    """Independent points found on all coverings of S^2 up to x-height about ``bound``."""
    z_bound = isqrt(bound)
    points: List[CurvePoint] = []
    for d in S.elements():
        points.extend(covering_point_search(E, d, z_bound))
    return independent_point_count(E, points)


def scan_corpus(
    curves: Optional[Sequence[Tuple[int, int, int]]] = None,
    height_bound: int = DEFAULT_HEIGHT_BOUND,
    extended_bound: int = EXTENDED_HEIGHT_BOUND,
    seed: int = DEFAULT_SEED,
) -> ScanReport:
    """Refined bounds over a corpus; curves with pairing rank >= 2 get an extended point search.

    Without explicit curves the corpus is corpus_curves() followed by
    SCAN_SHOWCASE_CURVES. A curve whose run fails is reported with its error
    code and skipped.
    """
    if curves is None:
        base = corpus_curves()
        curves = base + [c for c in SCAN_SHOWCASE_CURVES if c not in base]
    entries: List[CorpusEntry] = []
    improved: List[str] = []
    for roots in curves:
        E = new_curve(*roots)
        try:
            run = run_descent(E, height_bound=height_bound, seed=seed)
        except SelmerPairingError as e:
            logger.warning(f"[{E.label}] skipped: {e}")
            entries.append(
                CorpusEntry(
                    curve=E.label,
                    selmer_dimension=0,
                    matrix_rank=0,
                    plain_rank_bound=0,
                    rank_upper_bound=0,
                    independent_points=0,
                    error=e.code,
                )
            )
            continue
        r = run.report
        entry = CorpusEntry(
            curve=r.curve,
            selmer_dimension=r.selmer_dimension,
            matrix_rank=r.matrix_rank,
            plain_rank_bound=r.plain_rank_bound,
            rank_upper_bound=r.rank_upper_bound,
            independent_points=r.independent_points,
            extended_points=r.independent_points,
        )
        if r.matrix_rank >= 2:
            found = max(r.independent_points, extended_point_count(E, run.selmer, extended_bound))
            entry.extended_points = found
            entry.parity_ok = (r.rank_upper_bound - found) % 2 == 0
            if found <= r.rank_upper_bound:
                improved.append(r.curve)
            else:
                logger.error(f"[{r.curve}]: extended search found {found} points above the bound")
        entries.append(entry)
    return ScanReport(curves=entries, improved=improved)
