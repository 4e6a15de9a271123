"""Prometheus metrics and OpenTelemetry tracing for selmer_pairing.

This module provides observability instrumentation for descent runs:
- Prometheus metrics for symbol evaluations, local searches and pipeline stages
- OpenTelemetry tracing for correlating a run with its stages

Usage:
    from selmer_pairing.metrics import track_stage, record_symbol_evaluation

    with track_stage("selmer2"):
        ...

Metrics are collected in-process; nothing is exposed over HTTP.
"""

import logging
import time
from contextlib import contextmanager
from functools import wraps
from typing import Any, Callable, Generator, Optional

# Prometheus metrics
try:
    from prometheus_client import Counter, Gauge, Histogram, Info

    PROMETHEUS_AVAILABLE = True
except ImportError:
    PROMETHEUS_AVAILABLE = False

# OpenTelemetry tracing
try:
    from opentelemetry import trace

    OPENTELEMETRY_AVAILABLE = True
except ImportError:
    OPENTELEMETRY_AVAILABLE = False

logger = logging.getLogger(__name__)

# ============================================================================
# Prometheus Metrics Definitions
# ============================================================================

if PROMETHEUS_AVAILABLE:
    # --- Local symbols ---
    symbol_evaluations_total = Counter(
        "selmer_pairing_symbol_evaluations_total",
        "Total number of Hilbert symbol evaluations",
        ["place_kind"],  # real, odd, dyadic
    )

    # --- Local searches ---
    local_solvability_total = Counter(
        "selmer_pairing_local_solvability_total",
        "Total number of local solvability decisions",
        ["outcome"],  # solvable, unsolvable, exhausted
    )

    local_point_searches_total = Counter(
        "selmer_pairing_local_point_searches_total",
        "Total number of certified local point searches",
        ["place_kind", "outcome"],
    )

    precision_retries_total = Counter(
        "selmer_pairing_precision_retries_total",
        "Total number of retries at doubled precision",
        ["operation"],
    )

    # --- Pairing ---
    pairing_entries_total = Counter(
        "selmer_pairing_pairing_entries_total",
        "Total number of Cassels pairing values computed",
        ["value"],
    )

    selmer_dimension = Gauge(
        "selmer_pairing_selmer_dimension",
        "Dimension of the most recently computed 2-Selmer group",
    )

    # --- Pipeline ---
    stage_duration_seconds = Histogram(
        "selmer_pairing_stage_duration_seconds",
        "Pipeline stage duration in seconds",
        ["stage", "status"],
        buckets=(0.01, 0.05, 0.1, 0.5, 1, 5, 10, 30, 60, 300),
    )

    curves_processed_total = Counter(
        "selmer_pairing_curves_processed_total",
        "Total number of curves processed",
        ["outcome"],
    )

    stage_errors_total = Counter(
        "selmer_pairing_stage_errors_total",
        "Total number of pipeline stage errors",
        ["error_type"],
    )

    # --- System Info ---
    system_info = Info(
        "selmer_pairing_system",
        "selmer_pairing system information",
    )

else:
    # Stub implementations when prometheus_client is not available
    class StubCounter:
        def labels(self, *args: Any, **kwargs: Any) -> "StubCounter":
            return self

        def inc(self, amount: float = 1) -> None:
            pass

    class StubGauge:
        def labels(self, *args: Any, **kwargs: Any) -> "StubGauge":
            return self

        def set(self, value: float) -> None:
            pass

        def inc(self, amount: float = 1) -> None:
            pass

        def dec(self, amount: float = 1) -> None:
            pass

    class StubHistogram:
        def labels(self, *args: Any, **kwargs: Any) -> "StubHistogram":
            return self

        def observe(self, amount: float) -> None:
            pass

    class StubInfo:
        def info(self, val: dict) -> None:
            pass

    symbol_evaluations_total = StubCounter()
    local_solvability_total = StubCounter()
    local_point_searches_total = StubCounter()
    precision_retries_total = StubCounter()
    pairing_entries_total = StubCounter()
    selmer_dimension = StubGauge()
    stage_duration_seconds = StubHistogram()
    curves_processed_total = StubCounter()
    stage_errors_total = StubCounter()
    system_info = StubInfo()


# ============================================================================
# OpenTelemetry Tracing
# ============================================================================

_tracer: Optional[Any] = None


def get_tracer(name: str = "selmer_pairing") -> Any:
    """Get or create an OpenTelemetry tracer.

    Args:
        name: The name of the tracer (typically the module name).

    Returns:
        An OpenTelemetry tracer or a no-op tracer if OpenTelemetry is not available.
    """
    global _tracer

    if OPENTELEMETRY_AVAILABLE:
        if _tracer is None:
            _tracer = trace.get_tracer(name)
        return _tracer
    else:
        return NoOpTracer()


class NoOpSpan:
    """No-op span for when OpenTelemetry is not available."""

    def __enter__(self) -> "NoOpSpan":
        return self

    def __exit__(self, *args: Any) -> None:
        pass

    def set_attribute(self, key: str, value: Any) -> None:
        pass

    def add_event(self, name: str, attributes: Optional[dict] = None) -> None:
        pass

    def set_status(self, status: Any) -> None:
        pass

    def record_exception(self, exception: Exception) -> None:
        pass

    def end(self) -> None:
        pass


class NoOpTracer:
    """No-op tracer for when OpenTelemetry is not available."""

    def start_span(
        self,
        name: str,
        kind: Any = None,
        attributes: Optional[dict] = None,
    ) -> NoOpSpan:
        return NoOpSpan()

    def start_as_current_span(
        self,
        name: str,
        kind: Any = None,
        attributes: Optional[dict] = None,
    ) -> NoOpSpan:
        return NoOpSpan()


# ============================================================================
# Instrumentation Helpers
# ============================================================================


@contextmanager
def track_stage(stage: str, **attributes: Any) -> Generator[None, None, None]:
    """Context manager to track a pipeline stage with a span and a duration histogram.

    Args:
        stage: Stage name (selmer2, point_search, pairing_matrix, ...).
        **attributes: Extra span attributes.

    Yields:
        None

    Example:
        with track_stage("pairing_matrix", curve="-1,0,1"):
            matrix = engine.matrix(group)
    """
    tracer = get_tracer()
    start_time = time.time()
    span_attributes = {"stage.name": stage}
    span_attributes.update({f"stage.{k}": str(v) for k, v in attributes.items()})

    try:
        with tracer.start_as_current_span(f"selmer_pairing.{stage}", attributes=span_attributes) as span:
            yield
            duration = time.time() - start_time
            stage_duration_seconds.labels(stage=stage, status="completed").observe(duration)
            if OPENTELEMETRY_AVAILABLE and hasattr(span, "set_attribute"):
                span.set_attribute("stage.duration_seconds", duration)
    except Exception as e:
        duration = time.time() - start_time
        stage_duration_seconds.labels(stage=stage, status="failed").observe(duration)
        stage_errors_total.labels(error_type=type(e).__name__).inc()
        raise


def record_symbol_evaluation(place_kind: str) -> None:
    """Record one Hilbert symbol evaluation.

    Args:
        place_kind: real, odd or dyadic.
    """
    symbol_evaluations_total.labels(place_kind=place_kind).inc()


def record_local_solvability(outcome: str) -> None:
    """Record a local solvability decision (solvable, unsolvable, exhausted)."""
    local_solvability_total.labels(outcome=outcome).inc()


def record_local_point_search(place_kind: str, outcome: str) -> None:
    """Record the outcome of a certified local point search."""
    local_point_searches_total.labels(place_kind=place_kind, outcome=outcome).inc()


def record_precision_retry(operation: str) -> None:
    """Record a retry at doubled precision.

    Args:
        operation: The operation being retried.
    """
    precision_retries_total.labels(operation=operation).inc()


def record_pairing_entry(value: int) -> None:
    """Record a computed pairing value (+1 or -1)."""
    pairing_entries_total.labels(value=str(value)).inc()


def record_curve_processed(outcome: str) -> None:
    """Record a processed curve (completed, failed)."""
    curves_processed_total.labels(outcome=outcome).inc()


def set_selmer_dimension(dimension: int) -> None:
    """Update the Selmer dimension gauge."""
    selmer_dimension.set(dimension)


def set_system_info(version: str = "0.1.0", **kwargs: Any) -> None:
    """Set system information.

    Args:
        version: The application version.
        **kwargs: Additional info to include.
    """
    info = {"version": version}
    info.update(kwargs)
    system_info.info(info)


def traced(
    name: Optional[str] = None,
    attributes: Optional[dict] = None,
) -> Callable:
    """Decorator to add tracing to a function.

    Args:
        name: Span name (defaults to function name).
        attributes: Additional span attributes.

    Returns:
        Decorated function.
    """

    def decorator(func: Callable) -> Callable:
        span_name = name or func.__name__

        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            tracer = get_tracer()
            with tracer.start_as_current_span(span_name, attributes=attributes or {}):
                return func(*args, **kwargs)

        return wrapper

    return decorator


# ============================================================================
# Exports
# ============================================================================

__all__ = [
    # Availability flags
    "PROMETHEUS_AVAILABLE",
    "OPENTELEMETRY_AVAILABLE",
    # Prometheus metrics
    "symbol_evaluations_total",
    "local_solvability_total",
    "local_point_searches_total",
    "precision_retries_total",
    "pairing_entries_total",
    "selmer_dimension",
    "stage_duration_seconds",
    "curves_processed_total",
    "stage_errors_total",
    "system_info",
    # OpenTelemetry
    "get_tracer",
    "NoOpTracer",
    "NoOpSpan",
    # Instrumentation helpers
    "track_stage",
    "record_symbol_evaluation",
    "record_local_solvability",
    "record_local_point_search",
    "record_precision_retry",
    "record_pairing_entry",
    "record_curve_processed",
    "set_selmer_dimension",
    "set_system_info",
    "traced",
]
