"""Selmer Pairing package.

Exact 2-Selmer groups of elliptic curves with full rational 2-torsion and
the Cassels-Tate pairing on them, computed from Hilbert symbols.

Requires Python 3.9 or higher.
"""

from .arith import (
    factorize,
    is_prime,
    is_rational_square,
    legendre_symbol,
    prime_support,
    square_class,
    squarefree_part,
    valuation,
)
from .config import DEFAULT_HEIGHT_BOUND, DEFAULT_SEED, PADIC_BASE_PRECISION
from .covering import (
    CoveringModel,
    FTriple,
    LocalPoint,
    construct_f,
    delta_f_check,
    evaluate_f,
    local_point,
    make_covering,
    second_covering,
    singular_quadrics,
    trivial_covering_point,
    verify_f_properties,
)
from .descent import (
    add_points,
    curve_from_ab,
    descent_map,
    local_solvable,
    new_curve,
    point_search,
    selmer2,
    selmer_candidates,
)
from .exceptions import (
    ConstructionError,
    FactorizationError,
    InvalidInputError,
    NotLocallySolvableError,
    PrecisionExhaustedError,
    SelmerPairingError,
)

# Metrics and Observability
from .metrics import (
    OPENTELEMETRY_AVAILABLE,
    PROMETHEUS_AVAILABLE,
    get_tracer,
    set_system_info,
    traced,
    track_stage,
)
from .models import AlgebraClass, Curve2T, CurvePoint, Place, SelmerElement, SelmerGroup, SelmerStatus, SquareClass
from .pairing import (
    PairingEngine,
    audit_excluded_places,
    cassels_pairing,
    corpus_curves,
    pairing_matrix,
    refined_bounds,
    relevant_places,
    scan_corpus,
)
from .report_models import (
    DescentReport,
    ErrorInfo,
    PairingMatrix,
    PairingValue,
    PropertyResult,
    RunConfig,
    ScanReport,
    VerifyReport,
)
from .service import DescentService
from .symbols import (
    algebra_symbol,
    hilbert_symbol,
    inject_symbol_fault,
    local_class,
    reciprocity_check,
    solvability_oracle,
)

__all__ = [
    # Arithmetic
    "factorize",
    "is_prime",
    "is_rational_square",
    "legendre_symbol",
    "prime_support",
    "square_class",
    "squarefree_part",
    "valuation",
    # Config
    "DEFAULT_HEIGHT_BOUND",
    "DEFAULT_SEED",
    "PADIC_BASE_PRECISION",
    # Models
    "AlgebraClass",
    "Curve2T",
    "CurvePoint",
    "Place",
    "SelmerElement",
    "SelmerGroup",
    "SelmerStatus",
    "SquareClass",
    # Local symbols
    "algebra_symbol",
    "hilbert_symbol",
    "inject_symbol_fault",
    "local_class",
    "reciprocity_check",
    "solvability_oracle",
    # Descent
    "add_points",
    "curve_from_ab",
    "descent_map",
    "local_solvable",
    "new_curve",
    "point_search",
    "selmer2",
    "selmer_candidates",
    # Coverings
    "CoveringModel",
    "FTriple",
    "LocalPoint",
    "construct_f",
    "delta_f_check",
    "evaluate_f",
    "local_point",
    "make_covering",
    "second_covering",
    "singular_quadrics",
    "trivial_covering_point",
    "verify_f_properties",
    # Pairing
    "PairingEngine",
    "audit_excluded_places",
    "cassels_pairing",
    "corpus_curves",
    "pairing_matrix",
    "refined_bounds",
    "relevant_places",
    "scan_corpus",
    # Reports
    "DescentReport",
    "ErrorInfo",
    "PairingMatrix",
    "PairingValue",
    "PropertyResult",
    "RunConfig",
    "ScanReport",
    "VerifyReport",
    "DescentService",
    # Errors
    "ConstructionError",
    "FactorizationError",
    "InvalidInputError",
    "NotLocallySolvableError",
    "PrecisionExhaustedError",
    "SelmerPairingError",
    # Metrics
    "OPENTELEMETRY_AVAILABLE",
    "PROMETHEUS_AVAILABLE",
    "get_tracer",
    "set_system_info",
    "traced",
    "track_stage",
]
