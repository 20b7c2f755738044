"""Exponential/log maps, e- and m-geodesics, the Fisher inner product and m-projection."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .divergence import kl
from .duality import fisher_eta_of, fisher_theta
from .errors import BasePointMismatch, DimensionMismatch, ParameterOutOfRange
from .finite_diff import GRADIENT_STEP, central_derivative
from .simplex import (
    Composition,
    CompositionLike,
    Tangent,
    alr,
    alr_inv,
    close,
    closed_parts,
    clr,
    clr_inv,
    perturb,
)

logger = logging.getLogger(__name__)

GOLDEN_ITERATIONS = 40
NEWTON_STEPS = 3
BASE_POINT_TOLERANCE = 1e-12
RANK_TOLERANCE = 1e-10
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


class GeodesicKind(str, Enum):
    E = "e"
    M = "m"


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Straight line between two compositions in θ (kind e) or η (kind m), t ∈ [0, 1]."""

    kind: GeodesicKind
    start: Composition
    end: Composition

    def __post_init__(self) -> None:
        start = close(self.start)
        end = close(self.end)
        if start.D != end.D:
            raise DimensionMismatch(f"geodesic endpoints differ in dimension: {start.D} vs {end.D}")
        object.__setattr__(self, "kind", GeodesicKind(self.kind))
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)

    @property
    def D(self) -> int:
        return self.start.D

    def theta_direction(self) -> np.ndarray:
        return alr(self.end) - alr(self.start)

    def _point(self, t: float) -> Composition:
        # no range check; the 1-D solver steps slightly past the ends
        if self.kind is GeodesicKind.E:
            return alr_inv((1.0 - t) * alr(self.start) + t * alr(self.end))
        return close((1.0 - t) * self.start.parts + t * self.end.parts)

    def evaluate(self, t: float) -> Composition:
        return geodesic_eval(self, t)


def e_geodesic(x: CompositionLike, y: CompositionLike) -> Geodesic:
    return Geodesic(GeodesicKind.E, x, y)


def m_geodesic(x: CompositionLike, y: CompositionLike) -> Geodesic:
    return Geodesic(GeodesicKind.M, x, y)


def geodesic_eval(G: Geodesic, t: float) -> Composition:
    if not (np.isfinite(t) and 0.0 <= t <= 1.0):
        raise ParameterOutOfRange(f"geodesic parameter must lie in [0, 1], got {t!r}")
    if t == 0.0:
        return G.start
    if t == 1.0:
        return G.end
    return G._point(float(t))


@dataclass(frozen=True, eq=False)
class TangentAtPoint:
    """A tangent vector at ``base`` written in θ-coordinates."""

    base: Composition
    direction: np.ndarray

    def __post_init__(self) -> None:
        base = close(self.base)
        direction = np.array(self.direction, dtype=float)
        if direction.shape != (base.D - 1,):
            raise DimensionMismatch(
                f"θ-tangent at a D={base.D} point needs {base.D - 1} entries, got {direction.shape}"
            )
        if not np.all(np.isfinite(direction)):
            raise ValueError("tangent direction must be finite")
        direction.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "direction", direction)

    def scaled(self, factor: float) -> "TangentAtPoint":
        return TangentAtPoint(self.base, factor * self.direction)


def exp_map(x: CompositionLike, v: Tangent | ArrayLike) -> Composition:
    """x ⊕ 𝒞(e^v)."""
    return perturb(x, clr_inv(v))


def log_map(x: CompositionLike, y: CompositionLike) -> Tangent:
    """clr(y) − clr(x); log_map(n, y) is clr(y)."""
    cx, cy = clr(x).coords, clr(y).coords
    if cx.size != cy.size:
        raise DimensionMismatch(f"dimension mismatch: {cx.size} vs {cy.size}")
    return Tangent(cy - cx)


def tangent_from_clr(base: CompositionLike, v: Tangent | ArrayLike) -> TangentAtPoint:
    coords = (v if isinstance(v, Tangent) else Tangent(v)).coords
    point = close(base)
    if coords.size != point.D:
        raise DimensionMismatch(f"clr tangent of length {coords.size} at a D={point.D} point")
    return TangentAtPoint(point, coords[:-1] - coords[-1])


def tangent_to_clr(u: TangentAtPoint) -> Tangent:
    full = np.append(u.direction, 0.0)
    return Tangent(full - full.mean())


def fisher_inner(u: TangentAtPoint, w: TangentAtPoint) -> float:
    """uᵀ g(θ) w with the Fisher matrix at the shared base point."""
    if u.base.D != w.base.D or not np.allclose(
        u.base.parts, w.base.parts, rtol=0.0, atol=BASE_POINT_TOLERANCE
    ):
        raise BasePointMismatch("tangent vectors live at different base points")
    g = fisher_theta(alr(u.base)).g
    return float(u.direction @ g @ w.direction)


def m_geodesic_tangent(x: CompositionLike, z: CompositionLike) -> TangentAtPoint:
    """Velocity at z of the m-geodesic from z towards x, converted to θ-coordinates."""
    px, pz = closed_parts(x), closed_parts(z)
    if px.size != pz.size:
        raise DimensionMismatch(f"dimension mismatch: {px.size} vs {pz.size}")
    eta_velocity = px[:-1] - pz[:-1]
    return TangentAtPoint(Composition(pz), fisher_eta_of(pz).g @ eta_velocity)


def e_geodesic_tangent(G: Geodesic, base: CompositionLike) -> TangentAtPoint:
    if G.kind is not GeodesicKind.E:
        raise ValueError("e_geodesic_tangent needs an e-geodesic")
    return TangentAtPoint(close(base), G.theta_direction())


@dataclass(frozen=True, slots=True)
class ProjectionResult:
    z: Composition
    t: float
    boundary: bool
    divergence: float
    orthogonality_residual: float

    def to_payload(self) -> Dict[str, Any]:
        return {
            "z": self.z.parts.tolist(),
            "t": self.t,
            "boundary": self.boundary,
            "divergence": self.divergence,
            "orthogonality_residual": self.orthogonality_residual,
        }


def _golden_section(f, lo: float, hi: float, iterations: int) -> float:
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def m_projection(x: CompositionLike, G: Geodesic) -> ProjectionResult:
    """Minimize t ↦ kl(x, G(t)) over [0, 1].

    kl(x, ·) is the Bregman divergence of φ, which equals D_ψ with its
    arguments swapped. This ordering makes kl(x, y) = kl(x, z) + kl(z, y)
    hold for y on G; minimizing D_ψ(x‖G(t)) instead does not.

    Golden-section search brackets the minimizer, then Newton steps on
    central-difference derivatives refine it. Minimizers clipped to an
    endpoint come back with ``boundary=True``.
    """
    if G.kind is not GeodesicKind.E:
        raise ValueError("m-projection is defined onto e-geodesics")
    target = close(x)
    if target.D != G.D:
        raise DimensionMismatch(f"dimension mismatch: {target.D} vs {G.D}")

    def objective(t: float) -> float:
        return kl(target, G._point(t)).value

    t = _golden_section(objective, 0.0, 1.0, GOLDEN_ITERATIONS)
    for _ in range(NEWTON_STEPS):
        slope, curvature = central_derivative(objective, t, step=GRADIENT_STEP)
        if not curvature > 0:
            break
        t = float(np.clip(t - slope / curvature, 0.0, 1.0))
    boundary = t <= 0.0 or t >= 1.0
    if boundary:
        logger.warning("m-projection minimizer sits on the geodesic endpoint t=%s", t)
    z = geodesic_eval(G, t)
    residual = fisher_inner(m_geodesic_tangent(target, z), e_geodesic_tangent(G, z))
    logger.debug("m-projection t*=%.12f residual=%.3e", t, residual)
    return ProjectionResult(
        z=z,
        t=t,
        boundary=boundary,
        divergence=kl(target, z).value,
        orthogonality_residual=residual,
    )


@dataclass(frozen=True, slots=True)
class PythagorasReport:
    d_xy: float
    d_xz: float
    d_zy: float
    additivity_residual: float
    orthogonality_residual: float

    def to_payload(self) -> Dict[str, Any]:
        return {
            "d_xy": self.d_xy,
            "d_xz": self.d_xz,
            "d_zy": self.d_zy,
            "additivity_residual": self.additivity_residual,
            "orthogonality_residual": self.orthogonality_residual,
        }


def pythagoras_check(x: CompositionLike, z: CompositionLike, y: CompositionLike) -> PythagorasReport:
    """Residual of kl(x, y) = kl(x, z) + kl(z, y) and the Fisher angle at z.

    The angle is taken between the m-geodesic towards x and the e-geodesic
    towards y; both residuals vanish when z is the m-projection of x.
    """
    d_xy, d_xz, d_zy = kl(x, y).value, kl(x, z).value, kl(z, y).value
    base = close(z)
    e_tangent = TangentAtPoint(base, alr(y) - alr(base))
    orthogonality = fisher_inner(m_geodesic_tangent(x, base), e_tangent)
    return PythagorasReport(
        d_xy=d_xy,
        d_xz=d_xz,
        d_zy=d_zy,
        additivity_residual=d_xy - d_xz - d_zy,
        orthogonality_residual=orthogonality,
    )


def perturbation_independent(vectors: Sequence[CompositionLike]) -> bool:
    """True when the clr images of the m vectors have rank m."""
    if not vectors:
        return True
    rows = [clr(v).coords for v in vectors]
    if len({row.size for row in rows}) != 1:
        raise DimensionMismatch("all vectors must have the same number of parts")
    matrix = np.vstack(rows)
    return int(np.linalg.matrix_rank(matrix, tol=RANK_TOLERANCE)) == len(rows)
