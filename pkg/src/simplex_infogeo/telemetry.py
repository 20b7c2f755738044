from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Iterator

try:
    from opentelemetry import trace  # type: ignore
    from opentelemetry.exporter.otlp.proto.http.trace_exporter import OTLPSpanExporter  # type: ignore
    from opentelemetry.sdk.resources import Resource  # type: ignore
    from opentelemetry.sdk.trace import TracerProvider  # type: ignore
    from opentelemetry.sdk.trace.export import BatchSpanProcessor  # type: ignore
except Exception:  # pragma: no cover
    trace = None

from .config import get_settings

logger = logging.getLogger(__name__)

_initialized = False


def init_tracer() -> None:
    global _initialized
    if _initialized:
        return
    settings = get_settings()
    if trace is None or not settings.otlp_endpoint:
        _initialized = True
        return
    try:
        resource = Resource.create({"service.name": "simplex-infogeo"})
        provider = TracerProvider(resource=resource)
        exporter = OTLPSpanExporter(endpoint=settings.otlp_endpoint)
        provider.add_span_processor(BatchSpanProcessor(exporter))
        trace.set_tracer_provider(provider)
    except Exception:
        logger.exception("Failed to initialise OTLP tracing; continuing without spans")
    _initialized = True


@dataclass
class StageTiming:
    stage: str
    start: float
    attributes: dict[str, Any] = field(default_factory=dict)
    duration_s: float | None = None

    @property
    def elapsed_seconds(self) -> float:
        if self.duration_s is not None:
            return self.duration_s
        return max(0.0, time.perf_counter() - self.start)

    def complete(self, duration: float) -> None:
        self.duration_s = duration


@contextmanager
def stage_timer(stage: str, **attributes: Any) -> Iterator[StageTiming]:
    """Time a CLI stage, log its lifecycle and record a span when tracing is configured."""
    init_tracer()
    tracer = trace.get_tracer("simplex_infogeo") if trace else None
    timing = StageTiming(stage=stage, start=time.perf_counter(), attributes=dict(attributes))
    span = None
    if tracer:
        try:
            span = tracer.start_span(name=f"stage:{stage}")
            for key, value in attributes.items():
                span.set_attribute(key, str(value))
        except Exception:
            span = None
    logger.info("Stage %s started %s", stage, attributes or "")
    try:
        yield timing
    except Exception as exc:
        if span:
            span.record_exception(exc)
        logger.warning("Stage %s failed: %s", stage, exc)
        raise
    finally:
        duration_s = time.perf_counter() - timing.start
        timing.complete(duration_s)
        if span:
            span.set_attribute("duration_s", duration_s)
            span.end()
        logger.info("Stage %s completed in %.4fs", stage, duration_s)
