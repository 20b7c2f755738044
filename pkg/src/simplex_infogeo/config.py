from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Mapping
import os


def _coerce_int(value: Any, default: int) -> int:
    if value is None:
        return default
    try:
        return int(value)
    except (TypeError, ValueError):
        return default


def _coerce_float(value: Any, default: float) -> float:
    if value is None:
        return default
    try:
        return float(value)
    except (TypeError, ValueError):
        return default


@dataclass(frozen=True)
class Settings:
    # Parallelism (0 = one thread per CPU)
    threads: int = 0

    # Logging
    log_level: str = "INFO"
    log_dir: str | None = None

    # Fuzz campaigns
    fuzz_seed: int = 20240917
    fuzz_trials: int = 100_000

    # Ingestion
    zero_epsilon: float = 1e-6

    # OpenTelemetry (optional)
    otlp_endpoint: str | None = None

    @classmethod
    def from_env(cls, env: Mapping[str, str]) -> "Settings":
        return cls(
            threads=max(0, _coerce_int(env.get("SIMPLEX_INFOGEO_THREADS"), cls.threads)),
            log_level=env.get("SIMPLEX_INFOGEO_LOG_LEVEL", cls.log_level).upper(),
            log_dir=env.get("SIMPLEX_INFOGEO_LOG_DIR", cls.log_dir),
            fuzz_seed=_coerce_int(env.get("SIMPLEX_INFOGEO_FUZZ_SEED"), cls.fuzz_seed),
            fuzz_trials=_coerce_int(env.get("SIMPLEX_INFOGEO_FUZZ_TRIALS"), cls.fuzz_trials),
            zero_epsilon=_coerce_float(env.get("SIMPLEX_INFOGEO_ZERO_EPSILON"), cls.zero_epsilon),
            otlp_endpoint=env.get("OTEL_EXPORTER_OTLP_ENDPOINT"),
        )


@lru_cache()
def get_settings() -> Settings:
    return Settings.from_env(os.environ)
