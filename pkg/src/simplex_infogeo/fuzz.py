from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Sequence

import numpy as np

from .aggregation import (
    AggregationMode,
    EntropyMode,
    PartSubset,
    distance_decomposition,
    entropy_decomposition,
    monotonicity_audit,
    norm_decomposition,
)
from .config import get_settings
from .simplex import Composition
from .workers import map_shards

logger = logging.getLogger(__name__)

DEFAULT_DIMS = tuple(range(3, 13))
SHARD_COUNT = 16


def random_composition(rng: np.random.Generator, D: int) -> Composition:
    """Unit-rate exponential parts, closed: uniform on the simplex."""
    draws = rng.exponential(1.0, size=D)
    # an exact zero has probability 2^-53 per draw; keep the part strictly positive
    draws = np.maximum(draws, np.finfo(float).tiny)
    return Composition(draws / draws.sum())


def random_subset(rng: np.random.Generator, D: int) -> PartSubset:
    a = int(rng.integers(1, D))
    return PartSubset(tuple(int(i) for i in rng.choice(D, size=a, replace=False)), D)


def _worst(current: Dict[str, float], update: Dict[str, float], pick) -> Dict[str, float]:
    merged = dict(current)
    for key, value in update.items():
        merged[key] = pick(merged[key], value) if key in merged else value
    return merged


@dataclass(frozen=True)
class CampaignSummary:
    trials: int
    worst_margins: Dict[str, float] = field(default_factory=dict)
    worst_residuals: Dict[str, float] = field(default_factory=dict)
    failures: int = 0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    @classmethod
    def merge(cls, parts: Sequence["CampaignSummary"]) -> "CampaignSummary":
        margins: Dict[str, float] = {}
        residuals: Dict[str, float] = {}
        for part in parts:
            margins = _worst(margins, part.worst_margins, min)
            residuals = _worst(residuals, part.worst_residuals, max)
        return cls(
            trials=sum(part.trials for part in parts),
            worst_margins=margins,
            worst_residuals=residuals,
            failures=sum(part.failures for part in parts),
        )

    def to_payload(self) -> Dict[str, Any]:
        return {
            "trials": self.trials,
            "failures": self.failures,
            "worst_margins": dict(sorted(self.worst_margins.items())),
            "worst_residuals": dict(sorted(self.worst_residuals.items())),
            "passed": self.passed,
        }


def _run_shard(task: tuple[np.random.SeedSequence, int, tuple[int, ...]]) -> CampaignSummary:
    seed_seq, trials, dims = task
    rng = np.random.default_rng(seed_seq)
    margins: Dict[str, float] = {}
    residuals: Dict[str, float] = {}
    failures = 0
    for _ in range(trials):
        D = int(dims[int(rng.integers(len(dims)))])
        x, y = random_composition(rng, D), random_composition(rng, D)
        A = random_subset(rng, D)
        audit = monotonicity_audit(x, y, A)
        reports = [entropy_decomposition(x, A, mode) for mode in EntropyMode]
        reports += [norm_decomposition(x, A, mode) for mode in AggregationMode]
        reports += [distance_decomposition(x, y, A, mode) for mode in AggregationMode]
        margins = _worst(margins, audit.margins, min)
        residuals = _worst(residuals, {r.identity: abs(r.residual) for r in reports}, max)
        if not audit.passed or not all(r.passed for r in reports):
            failures += 1
            logger.warning("Campaign trial failed: D=%d subset=%s margins=%s", D, A.indices, audit.margins)
    return CampaignSummary(trials, margins, residuals, failures)


def run_monotonicity_campaign(
    trials: int | None = None,
    dims: Sequence[int] = DEFAULT_DIMS,
    seed: int | None = None,
    threads: int = 1,
) -> CampaignSummary:
    """Audit random (x, y, 𝒜) triples; the summary does not depend on ``threads``."""
    settings = get_settings()
    total = settings.fuzz_trials if trials is None else int(trials)
    root = np.random.SeedSequence(settings.fuzz_seed if seed is None else seed)
    dims = tuple(int(D) for D in dims)
    if total <= 0:
        return CampaignSummary(trials=0)
    if min(dims) < 2:
        raise ValueError(f"fuzz dimensions must be >= 2, got {dims}")
    shard_count = min(SHARD_COUNT, total)
    base, extra = divmod(total, shard_count)
    tasks = [
        (child, base + (1 if idx < extra else 0), dims)
        for idx, child in enumerate(root.spawn(shard_count))
    ]
    logger.info("Running monotonicity campaign: %d trials over D in %s", total, dims)
    summary = CampaignSummary.merge(map_shards(_run_shard, tasks, threads=threads))
    logger.info("Campaign finished: %d failures, worst margins %s", summary.failures, summary.worst_margins)
    return summary
