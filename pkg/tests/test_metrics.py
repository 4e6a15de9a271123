"""Tests for the Prometheus metrics and OpenTelemetry tracing module."""

import pytest

from selmer_pairing.metrics import (
    OPENTELEMETRY_AVAILABLE,
    PROMETHEUS_AVAILABLE,
    NoOpSpan,
    NoOpTracer,
    get_tracer,
    record_curve_processed,
    record_local_point_search,
    record_local_solvability,
    record_pairing_entry,
    record_precision_retry,
    record_symbol_evaluation,
    set_selmer_dimension,
    set_system_info,
    traced,
    track_stage,
)
from selmer_pairing.models import Place
from selmer_pairing.symbols import hilbert_symbol


def _sample(name, labels=None):
    from prometheus_client import REGISTRY

    return REGISTRY.get_sample_value(name, labels or {}) or 0.0


class TestPrometheusMetrics:
    """Tests for Prometheus metrics instrumentation."""

    def test_prometheus_available(self):
        """Test that prometheus_client is available."""
        assert PROMETHEUS_AVAILABLE is True

    def test_record_helpers(self):
        """Test that the recording helpers accept their labels."""
        # Should not raise
        record_symbol_evaluation("real")
        record_local_solvability("solvable")
        record_local_point_search("odd", "found")
        record_precision_retry("local_point")
        record_pairing_entry(-1)
        record_curve_processed("ok")
        set_selmer_dimension(3)

    def test_set_system_info(self):
        """Test setting system info."""
        # Should not raise
        set_system_info(version="0.1.0")
        set_system_info(version="0.1.0", command="verify")

    def test_symbol_evaluation_counter(self):
        """Test that evaluating a dyadic symbol increments the counter."""
        if not PROMETHEUS_AVAILABLE:
            pytest.skip("Prometheus not available")
        name = "selmer_pairing_symbol_evaluations_total"
        before = _sample(name, {"place_kind": "dyadic"})
        hilbert_symbol(3, 5, Place.finite(2))
        assert _sample(name, {"place_kind": "dyadic"}) == before + 1

    def test_selmer_dimension_gauge(self):
        """Test the Selmer dimension gauge."""
        if not PROMETHEUS_AVAILABLE:
            pytest.skip("Prometheus not available")
        set_selmer_dimension(5)
        assert _sample("selmer_pairing_selmer_dimension") == 5


class TestOpenTelemetryTracing:
    """Tests for OpenTelemetry tracing instrumentation."""

    def test_get_tracer(self):
        """Test getting a tracer."""
        assert get_tracer() is not None

    def test_get_tracer_returns_same_instance(self):
        """Test that get_tracer returns the same instance."""
        tracer1 = get_tracer()
        tracer2 = get_tracer()
        if OPENTELEMETRY_AVAILABLE:
            assert tracer1 is tracer2
        else:
            assert isinstance(tracer1, NoOpTracer)
            assert isinstance(tracer2, NoOpTracer)


class TestNoOpImplementations:
    """Tests for no-op implementations when libraries are not available."""

    def test_noop_span(self):
        """Test NoOpSpan implementation."""
        span = NoOpSpan()

        with span:
            span.set_attribute("key", "value")
            span.add_event("event_name", {"attr": "value"})
            span.set_status(None)
            span.record_exception(Exception("test"))

        span.end()

    def test_noop_tracer(self):
        """Test NoOpTracer implementation."""
        tracer = NoOpTracer()

        span = tracer.start_span("test_span")
        assert isinstance(span, NoOpSpan)

        with tracer.start_as_current_span("test_span") as span:
            assert isinstance(span, NoOpSpan)


class TestInstrumentationHelpers:
    """Tests for instrumentation helper functions and decorators."""

    def test_track_stage_success(self):
        """Test track_stage for a completed stage."""
        with track_stage("selmer2", curve="-1,0,1"):
            pass

    def test_track_stage_failure(self):
        """Test that track_stage re-raises and counts the error."""
        with pytest.raises(ValueError):
            with track_stage("pairing_matrix"):
                raise ValueError("Test error")

    def test_track_stage_error_counter(self):
        """Test that a failed stage increments the error counter by exception type."""
        if not PROMETHEUS_AVAILABLE:
            pytest.skip("Prometheus not available")
        name = "selmer_pairing_stage_errors_total"
        before = _sample(name, {"error_type": "KeyError"})
        with pytest.raises(KeyError):
            with track_stage("point_search"):
                raise KeyError("x")
        assert _sample(name, {"error_type": "KeyError"}) == before + 1

    def test_traced_decorator(self):
        """Test traced decorator."""

        @traced("custom_operation")
        def my_function(x, y):
            return x + y

        assert my_function(1, 2) == 3

    def test_traced_decorator_without_name(self):
        """Test traced decorator without explicit name."""

        @traced()
        def another_function():
            return "result"

        assert another_function() == "result"

    def test_traced_decorator_with_attributes(self):
        """Test traced decorator with attributes."""

        @traced("operation", {"custom.attr": "value"})
        def attributed_function():
            return 42

        assert attributed_function() == 42


class TestMetricsExports:
    """Test that metrics helpers are exported from the package."""

    def test_all_metrics_importable(self):
        """Test that observability names can be imported from selmer_pairing."""
        from selmer_pairing import (
            OPENTELEMETRY_AVAILABLE,
            PROMETHEUS_AVAILABLE,
            get_tracer,
            set_system_info,
            traced,
            track_stage,
        )

        assert PROMETHEUS_AVAILABLE is not None
        assert OPENTELEMETRY_AVAILABLE is not None
        assert get_tracer is not None
        assert traced is not None
        assert track_stage is not None
        assert set_system_info is not None
