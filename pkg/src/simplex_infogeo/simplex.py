"""Compositions, the Aitchison vector-space operations and the log-ratio transforms.

All logarithms are natural. Inputs need not be closed: any strictly positive
vector is accepted and operations that return compositions return them closed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import softmax
from scipy.stats import gmean

from .contrast import ContrastMatrix, build_contrast
from .errors import (
    DimensionMismatch,
    DimensionTooSmall,
    EmptySelection,
    NonPositivePart,
    NotInTangentSpace,
)

logger = logging.getLogger(__name__)

CLOSURE_TOLERANCE = 1e-12
TANGENT_TOLERANCE = 1e-9
ISOMETRY_TOLERANCE = 1e-10


def _positive_vector(values: ArrayLike) -> np.ndarray:
    parts = np.array(values, dtype=float)
    if parts.ndim != 1:
        raise DimensionMismatch(f"a composition is a 1-D vector, got shape {parts.shape}")
    if parts.size < 2:
        raise DimensionTooSmall(f"a composition needs at least 2 parts, got {parts.size}")
    bad = np.flatnonzero(~(np.isfinite(parts) & (parts > 0)))
    if bad.size:
        idx = int(bad[0])
        raise NonPositivePart(f"part {idx} is {parts[idx]!r}; every part must be finite and > 0")
    return parts


@dataclass(frozen=True, eq=False)
class Composition:
    """A strictly positive part vector; ``closed`` records whether it sums to one."""

    parts: np.ndarray
    closed: bool = field(init=False)

    def __post_init__(self) -> None:
        parts = _positive_vector(self.parts)
        parts.setflags(write=False)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "closed", bool(abs(parts.sum() - 1.0) <= CLOSURE_TOLERANCE))

    @property
    def D(self) -> int:
        return int(self.parts.size)

    def __len__(self) -> int:
        return self.D

    def __array__(self, dtype=None, copy=None) -> np.ndarray:
        return np.asarray(self.parts, dtype=dtype)

    def closure(self) -> "Composition":
        return self if self.closed else close(self)

    def __repr__(self) -> str:
        return f"Composition({np.array2string(self.parts, precision=6)}, closed={self.closed})"


@dataclass(frozen=True, eq=False)
class Tangent:
    """A vector of the sum-zero hyperplane (clr tangent space)."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = np.array(self.coords, dtype=float)
        if coords.ndim != 1 or coords.size < 2:
            raise DimensionMismatch(f"a tangent is a 1-D vector of length >= 2, got {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise NotInTangentSpace("tangent coordinates must be finite")
        total = float(coords.sum())
        if abs(total) > TANGENT_TOLERANCE:
            raise NotInTangentSpace(f"tangent coordinates sum to {total:.3e}, not zero")
        # remove the rounding residue so the stored vector lies on the hyperplane
        coords = coords - coords.mean()
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def D(self) -> int:
        return int(self.coords.size)

    def __array__(self, dtype=None, copy=None) -> np.ndarray:
        return np.asarray(self.coords, dtype=dtype)


@dataclass(frozen=True, eq=False)
class IlrCoords:
    z: np.ndarray
    contrast: ContrastMatrix

    def __post_init__(self) -> None:
        z = np.array(self.z, dtype=float)
        if z.shape != (self.contrast.D - 1,):
            raise DimensionMismatch(
                f"ilr coordinates for D={self.contrast.D} need length {self.contrast.D - 1}, got {z.shape}"
            )
        z.setflags(write=False)
        object.__setattr__(self, "z", z)


CompositionLike = Union[Composition, ArrayLike]


def parts_of(x: CompositionLike) -> np.ndarray:
    """Validated positive parts of x, unclosed."""
    if isinstance(x, Composition):
        return x.parts
    return _positive_vector(x)


def closed_parts(x: CompositionLike) -> np.ndarray:
    """Parts of x closed to unit sum."""
    if isinstance(x, Composition) and x.closed:
        return x.parts
    parts = parts_of(x)
    return parts / parts.sum()


def _same_dimension(*vectors: np.ndarray) -> int:
    sizes = {v.size for v in vectors}
    if len(sizes) != 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(sizes)}")
    return sizes.pop()


def neutral(D: int) -> Composition:
    if D < 2:
        raise DimensionTooSmall(f"a composition needs at least 2 parts, got {D}")
    return Composition(np.full(D, 1.0 / D))


def close(x: CompositionLike) -> Composition:
    parts = parts_of(x)
    return Composition(parts / parts.sum())


def _from_logs(logs: np.ndarray) -> Composition:
    # softmax subtracts the maximum, so extreme log-ratios neither overflow nor underflow to zero sums
    return Composition(softmax(logs))


def perturb(x: CompositionLike, y: CompositionLike) -> Composition:
    px, py = parts_of(x), parts_of(y)
    _same_dimension(px, py)
    return _from_logs(np.log(px) + np.log(py))


def power(alpha: float, x: CompositionLike) -> Composition:
    if not np.isfinite(alpha):
        raise ValueError(f"powering needs a finite scalar, got {alpha!r}")
    return _from_logs(alpha * np.log(parts_of(x)))


def perturb_inverse(x: CompositionLike) -> Composition:
    return power(-1.0, x)


def perturb_difference(x: CompositionLike, y: CompositionLike) -> Composition:
    """x ⊖ y."""
    px, py = parts_of(x), parts_of(y)
    _same_dimension(px, py)
    return _from_logs(np.log(px) - np.log(py))


def geometric_mean(values: CompositionLike) -> float:
    parts = values.parts if isinstance(values, Composition) else np.asarray(values, dtype=float)
    if parts.size == 0:
        raise EmptySelection("geometric mean of an empty selection")
    if np.any(~(parts > 0)):
        raise NonPositivePart("geometric mean needs strictly positive entries")
    return float(gmean(parts))


def clr(x: CompositionLike) -> Tangent:
    logs = np.log(parts_of(x))
    return Tangent(logs - logs.mean())


def clr_inv(v: Tangent | ArrayLike) -> Composition:
    tangent = v if isinstance(v, Tangent) else Tangent(v)
    return _from_logs(tangent.coords)


def alr(x: CompositionLike) -> np.ndarray:
    """θ-coordinates: log-ratios against the last part."""
    logs = np.log(parts_of(x))
    return logs[:-1] - logs[-1]


def alr_inv(theta: ArrayLike) -> Composition:
    values = np.asarray(theta, dtype=float)
    if values.ndim != 1 or values.size < 1:
        raise DimensionTooSmall(f"θ needs at least one coordinate, got shape {values.shape}")
    return _from_logs(np.append(values, 0.0))


def _resolve_contrast(D: int, V: ContrastMatrix | None) -> ContrastMatrix:
    contrast = V if V is not None else build_contrast(D)
    if contrast.D != D:
        raise DimensionMismatch(f"contrast matrix is for D={contrast.D}, composition has D={D}")
    return contrast


def ilr(x: CompositionLike, V: ContrastMatrix | None = None) -> IlrCoords:
    logs = np.log(parts_of(x))
    contrast = _resolve_contrast(logs.size, V)
    return IlrCoords(contrast.entries.T @ logs, contrast)


def ilr_inv(z: IlrCoords | ArrayLike, V: ContrastMatrix | None = None) -> Composition:
    if isinstance(z, IlrCoords):
        coords, contrast = z.z, V or z.contrast
    else:
        coords = np.asarray(z, dtype=float)
        contrast = _resolve_contrast(coords.size + 1, V)
    if coords.size != contrast.D - 1:
        raise DimensionMismatch(
            f"ilr coordinates of length {coords.size} do not fit a D={contrast.D} contrast"
        )
    return _from_logs(contrast.entries @ coords)


def aitchison_inner(x: CompositionLike, y: CompositionLike) -> float:
    cx, cy = clr(x).coords, clr(y).coords
    _same_dimension(cx, cy)
    return float(cx @ cy)


def aitchison_norm(x: CompositionLike) -> float:
    coords = clr(x).coords
    return float(np.sqrt(coords @ coords))


def aitchison_distance_squared(x: CompositionLike, y: CompositionLike) -> float:
    cx, cy = clr(x).coords, clr(y).coords
    _same_dimension(cx, cy)
    diff = cx - cy
    return float(diff @ diff)


def aitchison_distance(x: CompositionLike, y: CompositionLike) -> float:
    return float(np.sqrt(aitchison_distance_squared(x, y)))
