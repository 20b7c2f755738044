"""Distance matrices and the structured documents written by the CLI.

JSON output is rendered by hand so that the byte stream is fixed: keys keep
insertion order, floats use 17 significant digits and non-finite floats
become ``null``.
"""

from __future__ import annotations

import io
import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Tuple

import numpy as np
import pandas as pd

from . import __version__
from .aggregation import (
    AggregationMode,
    EntropyMode,
    PartSubset,
    distance_decomposition,
    entropy_decomposition,
    monotonicity_audit,
    norm_decomposition,
)
from .contrast import ContrastMatrix, ContrastReport, build_contrast, load_contrast, validate_contrast
from .divergence import (
    alpha_divergence,
    bhattacharyya_distance,
    boxcox_distance,
    f_divergence,
    fisher_distance,
    hellinger,
    kl,
    kl_reverse,
)
from .errors import DimensionMismatch, InputError
from .ingest import Dataset
from .models import Measure, RunConfig
from .simplex import aitchison_distance, aitchison_distance_squared, ilr
from .workers import map_shards, pair_indices, run_pairwise

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

PairFunction = Callable[[np.ndarray, np.ndarray], float]


def measure_function(cfg: RunConfig) -> Tuple[PairFunction, bool]:
    """The pairwise function for cfg.measure and whether it is symmetric."""
    measure = cfg.measure
    if measure is Measure.AITCHISON:
        return aitchison_distance, True
    if measure is Measure.KL:
        return lambda x, y: kl(x, y).value, False
    if measure is Measure.KL_REVERSE:
        return lambda x, y: kl_reverse(x, y).value, False
    if measure is Measure.ALPHA:
        alpha = float(cfg.alpha)
        return (lambda x, y: alpha_divergence(alpha, x, y).value), alpha == 0.0
    if measure is Measure.HELLINGER:
        return hellinger, True
    if measure is Measure.FISHER:
        return fisher_distance, True
    if measure is Measure.BHATTACHARYYA:
        return bhattacharyya_distance, True
    if measure is Measure.BOXCOX:
        beta = float(cfg.beta)
        weights = None if cfg.weights is None else np.asarray(cfg.weights, dtype=float)
        return (lambda x, y: math.sqrt(max(0.0, boxcox_distance(beta, weights, x, y)))), True
    generator = cfg.generator
    return (lambda x, y: f_divergence(generator, x, y).value), False


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    values: np.ndarray
    sample_ids: Tuple[str, ...]
    measure: str
    parameters: Dict[str, Any]
    symmetric: bool

    def metadata(self) -> Dict[str, Any]:
        return {
            "measure": self.measure,
            "parameters": dict(self.parameters),
            "symmetric": self.symmetric,
            "version": __version__,
        }


def distance_matrix(ds: Dataset, cfg: RunConfig, threads: int = 1) -> DistanceMatrix:
    fn, symmetric = measure_function(cfg)
    samples = ds.samples
    values = run_pairwise(
        ds.N, lambda i, j: fn(samples[i], samples[j]), symmetric=symmetric, threads=threads
    )
    logger.info("Computed %dx%d %s matrix", ds.N, ds.N, cfg.measure.value)
    return DistanceMatrix(values, ds.sample_ids, cfg.measure.value, cfg.parameters(), symmetric)


def document(command: str, cfg: RunConfig | None, body: Dict[str, Any]) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "version": __version__,
        "parameters": cfg.parameters() if cfg is not None else {},
    }
    doc.update(body)
    return doc


def distance_document(matrix: DistanceMatrix, cfg: RunConfig) -> Dict[str, Any]:
    return document(
        "distance",
        cfg,
        {
            "symmetric": matrix.symmetric,
            "sample_ids": list(matrix.sample_ids),
            "matrix": matrix.values.tolist(),
        },
    )


def _resolve_subset(ds: Dataset, cfg: RunConfig) -> PartSubset:
    if not cfg.subset:
        raise InputError("this command needs --subset with at least one part name")
    return PartSubset.from_names(cfg.subset, ds.part_names)


def decompose_document(ds: Dataset, cfg: RunConfig, threads: int = 1) -> Tuple[Dict[str, Any], bool]:
    A = _resolve_subset(ds, cfg)
    samples = ds.samples

    def _sample(i: int) -> Dict[str, Any]:
        x = samples[i]
        return {
            "sample_id": ds.sample_ids[i],
            "entropy": {mode.value: entropy_decomposition(x, A, mode).to_payload() for mode in EntropyMode},
            "norm": norm_decomposition(x, A, cfg.mode).to_payload(),
        }

    def _pair(pair: Tuple[int, int]) -> Dict[str, Any]:
        i, j = pair
        report = distance_decomposition(samples[i], samples[j], A, cfg.mode)
        return {"x": ds.sample_ids[i], "y": ds.sample_ids[j], **report.to_payload()}

    per_sample = map_shards(_sample, list(range(ds.N)), threads=threads)
    per_pair = map_shards(_pair, pair_indices(ds.N, symmetric=True), threads=threads)
    passed = all(
        entry["norm"]["passed"] and all(rep["passed"] for rep in entry["entropy"].values())
        for entry in per_sample
    ) and all(entry["passed"] for entry in per_pair)
    body = {
        "subset": [ds.part_names[i] for i in A.indices],
        "samples": per_sample,
        "pairs": per_pair,
        "passed": passed,
    }
    return document("decompose", cfg, body), passed


def audit_document(ds: Dataset, cfg: RunConfig, threads: int = 1) -> Tuple[Dict[str, Any], bool]:
    A = _resolve_subset(ds, cfg)
    samples = ds.samples

    def _pair(pair: Tuple[int, int]) -> Dict[str, Any]:
        i, j = pair
        audit = monotonicity_audit(samples[i], samples[j], A)
        return {"x": ds.sample_ids[i], "y": ds.sample_ids[j], **audit.to_payload()}

    per_pair = map_shards(_pair, pair_indices(ds.N, symmetric=True), threads=threads)
    passed = all(entry["passed"] for entry in per_pair)
    body = {
        "subset": [ds.part_names[i] for i in A.indices],
        "pairs": per_pair,
        "passed": passed,
    }
    return document("monotonicity-audit", cfg, body), passed


def _isometry_deviation(ds: Dataset, contrast: ContrastMatrix) -> float:
    worst = 0.0
    for i, j in pair_indices(ds.N, symmetric=True):
        zx, zy = ilr(ds.samples[i], contrast).z, ilr(ds.samples[j], contrast).z
        gap = aitchison_distance_squared(ds.samples[i], ds.samples[j]) - float((zx - zy) @ (zx - zy))
        worst = max(worst, abs(gap))
    return worst


def contrast_document(
    cfg: RunConfig, ds: Dataset | None = None, dimension: int | None = None
) -> Tuple[Dict[str, Any], bool]:
    path = cfg.contrast_path
    if path is not None:
        entries = load_contrast(path)
        report: ContrastReport = validate_contrast(entries)
        if ds is not None and report.D != ds.D:
            raise DimensionMismatch(f"contrast matrix is for D={report.D}, dataset has D={ds.D}")
        kind = "user-matrix"
    else:
        D = ds.D if ds is not None else dimension
        if D is None:
            raise InputError("contrast-validate needs --input or --dimension for built-in contrasts")
        entries = build_contrast(D, cfg.contrast).entries
        report = validate_contrast(entries)
        kind = cfg.contrast
    body: Dict[str, Any] = {"kind": kind, "report": report.to_payload()}
    if ds is not None and report.passed:
        body["isometry_deviation"] = _isometry_deviation(ds, ContrastMatrix(entries))
    body["passed"] = report.passed
    return document("contrast-validate", cfg, body), report.passed


# --- rendering ----------------------------------------------------------------


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        return "null"
    return format(value, ".17g")


def _encode(value: Any, indent: int, level: int, out: List[str]) -> None:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if value is None:
        out.append("null")
    elif isinstance(value, (bool, np.bool_)):
        out.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        out.append(_format_float(float(value)))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for idx, (key, item) in enumerate(value.items()):
            out.append(f"{pad}{json.dumps(str(key), ensure_ascii=False)}: ")
            _encode(item, indent, level + 1, out)
            out.append(",\n" if idx < len(value) - 1 else "\n")
        out.append(f"{close_pad}}}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        items = list(value)
        if not items:
            out.append("[]")
            return
        if all(isinstance(item, (int, float, np.number)) and not isinstance(item, bool) for item in items):
            # numeric rows stay on one line
            out.append("[")
            for idx, item in enumerate(items):
                _encode(item, indent, level + 1, out)
                if idx < len(items) - 1:
                    out.append(", ")
            out.append("]")
            return
        out.append("[\n")
        for idx, item in enumerate(items):
            out.append(pad)
            _encode(item, indent, level + 1, out)
            out.append(",\n" if idx < len(items) - 1 else "\n")
        out.append(f"{close_pad}]")
    else:
        raise TypeError(f"cannot render {type(value).__name__} as JSON")


def render_json(doc: Dict[str, Any], indent: int = 2) -> str:
    out: List[str] = []
    _encode(doc, indent, 0, out)
    out.append("\n")
    return "".join(out)


def render_matrix_csv(matrix: DistanceMatrix) -> str:
    frame = pd.DataFrame(matrix.values, index=list(matrix.sample_ids), columns=list(matrix.sample_ids))
    buffer = io.StringIO()
    frame.to_csv(buffer, float_format="%.17g", index_label="sample_id", lineterminator="\n")
    return buffer.getvalue()
