"""Contrast matrices for isometric log-ratio coordinates.

A contrast matrix V is D×(D−1) with orthonormal columns that each sum to
zero, i.e. VᵀV = I_{D−1} and VVᵀ = I_D − (1/D)𝟙𝟙ᵀ.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike

from .errors import DimensionMismatch, DimensionTooSmall, InputError, InvalidContrast, InvalidPartition

logger = logging.getLogger(__name__)

CONTRAST_TOLERANCE = 1e-10


class ContrastKind(str, Enum):
    HELMERT = "helmert"
    PIVOT = "pivot"
    USER_SBP = "user-sbp"
    USER_MATRIX = "user-matrix"


@dataclass(frozen=True, slots=True)
class ContrastReport:
    D: int
    orthonormality_deviation: float
    projection_deviation: float
    tolerance: float = CONTRAST_TOLERANCE
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "passed",
            bool(
                self.orthonormality_deviation <= self.tolerance
                and self.projection_deviation <= self.tolerance
            ),
        )

    def to_payload(self) -> Dict[str, Any]:
        return {
            "D": self.D,
            "orthonormality_deviation": self.orthonormality_deviation,
            "projection_deviation": self.projection_deviation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass(frozen=True, eq=False)
class ContrastMatrix:
    entries: np.ndarray
    kind: ContrastKind = ContrastKind.USER_MATRIX

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[1] != entries.shape[0] - 1:
            raise DimensionMismatch(
                f"contrast matrix must be D×(D−1), got shape {entries.shape}"
            )
        report = validate_contrast(entries)
        if not report.passed:
            raise InvalidContrast(
                "contrast matrix violates the basis conditions: "
                f"orthonormality deviation {report.orthonormality_deviation:.3e}, "
                f"projection deviation {report.projection_deviation:.3e}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "kind", ContrastKind(self.kind))

    @property
    def D(self) -> int:
        return int(self.entries.shape[0])


def validate_contrast(V: ArrayLike | ContrastMatrix) -> ContrastReport:
    """Measure how far V is from an ilr basis; never raises for a well-shaped matrix."""
    entries = V.entries if isinstance(V, ContrastMatrix) else np.asarray(V, dtype=float)
    if entries.ndim != 2 or entries.shape[1] != entries.shape[0] - 1:
        raise DimensionMismatch(f"contrast matrix must be D×(D−1), got shape {entries.shape}")
    D = entries.shape[0]
    gram = entries.T @ entries
    projector = entries @ entries.T
    centering = np.eye(D) - np.full((D, D), 1.0 / D)
    return ContrastReport(
        D=D,
        orthonormality_deviation=float(np.max(np.abs(gram - np.eye(D - 1)))) if D > 1 else 0.0,
        projection_deviation=float(np.max(np.abs(projector - centering))),
    )


def _helmert_entries(D: int) -> np.ndarray:
    V = np.zeros((D, D - 1))
    for j in range(D - 1):
        k = j + 1
        scale = 1.0 / np.sqrt(k * (k + 1))
        V[:k, j] = scale
        V[k, j] = -k * scale
    return V


def _pivot_entries(D: int) -> np.ndarray:
    V = np.zeros((D, D - 1))
    for j in range(D - 1):
        rest = D - j - 1
        V[j, j] = np.sqrt(rest / (rest + 1))
        V[j + 1 :, j] = -1.0 / np.sqrt(rest * (rest + 1))
    return V


def _check_sbp(sbp: np.ndarray) -> None:
    D = sbp.shape[1]
    if sbp.shape[0] != D - 1:
        raise InvalidPartition(f"a partition of {D} parts needs {D - 1} rows, got {sbp.shape[0]}")
    if not np.all(np.isin(sbp, (-1, 0, 1))):
        raise InvalidPartition("partition entries must be -1, 0 or +1")
    groups: list[frozenset[int]] = [frozenset(range(D))]
    for row_idx, row in enumerate(sbp):
        support = frozenset(int(i) for i in np.flatnonzero(row))
        if support not in groups:
            raise InvalidPartition(
                f"row {row_idx} splits parts {sorted(support)}, which is not an undivided group"
            )
        plus = frozenset(int(i) for i in np.flatnonzero(row == 1))
        minus = support - plus
        if not plus or not minus:
            raise InvalidPartition(f"row {row_idx} must contain both +1 and -1 entries")
        groups.remove(support)
        groups.extend(group for group in (plus, minus) if len(group) > 1)
    if groups:
        raise InvalidPartition(f"groups left undivided: {[sorted(g) for g in groups]}")


def _sbp_entries(sbp: np.ndarray) -> np.ndarray:
    n_pos = (sbp == 1).sum(axis=1)
    n_neg = (sbp == -1).sum(axis=1)
    V = np.zeros(sbp.shape, dtype=float)
    for i, row in enumerate(sbp):
        r, s = n_pos[i], n_neg[i]
        V[i, row == 1] = np.sqrt(s / (r * (r + s)))
        V[i, row == -1] = -np.sqrt(r / (s * (r + s)))
    return V.T


@lru_cache(maxsize=256)
def _standard_contrast(D: int, kind: ContrastKind) -> ContrastMatrix:
    entries = _helmert_entries(D) if kind is ContrastKind.HELMERT else _pivot_entries(D)
    return ContrastMatrix(entries, kind)


def build_contrast(
    D: int,
    kind: ContrastKind | str = ContrastKind.HELMERT,
    sbp: ArrayLike | None = None,
) -> ContrastMatrix:
    if D < 2:
        raise DimensionTooSmall(f"contrast matrices need D >= 2, got {D}")
    kind = ContrastKind(kind)
    if kind in (ContrastKind.HELMERT, ContrastKind.PIVOT):
        return _standard_contrast(int(D), kind)
    if kind is ContrastKind.USER_SBP:
        if sbp is None:
            raise InvalidPartition("user-sbp contrast requires a sign matrix")
        signs = np.asarray(sbp)
        if signs.ndim != 2 or signs.shape[1] != D:
            raise InvalidPartition(f"partition must have {D} columns, got shape {signs.shape}")
        _check_sbp(signs)
        return ContrastMatrix(_sbp_entries(signs), ContrastKind.USER_SBP)
    raise InvalidContrast("user matrices are loaded with load_contrast, not built")


def load_contrast(path: str | Path) -> np.ndarray:
    """Read a D×(D−1) matrix from a header-less CSV file; the caller validates it."""
    try:
        frame = pd.read_csv(path, header=None, dtype=float, encoding="utf-8")
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read contrast matrix {path}: {exc}") from exc
    entries = frame.to_numpy(dtype=float)
    logger.debug("Loaded contrast matrix %s with shape %s", path, entries.shape)
    return entries
