"""Dual θ/η parametrizations of the simplex and general finite exponential families.

The last part is always the reference category: θⁱ = log(xᵢ/x_D) and
ηᵢ = xᵢ for i < D. ψ is the log-partition function, φ = −H its convex
conjugate; their Hessians are the Fisher information in θ and η.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import logsumexp, softmax, xlogy

from .errors import DegenerateFamilyWarning, DimensionMismatch, OutOfDomain
from .simplex import Composition, CompositionLike, alr, closed_parts, parts_of

logger = logging.getLogger(__name__)

BOUNDARY_MARGIN = 1e-14
SYMMETRY_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class ThetaCoords:
    theta: np.ndarray

    def __post_init__(self) -> None:
        theta = np.array(self.theta, dtype=float)
        if theta.ndim != 1 or theta.size < 1:
            raise DimensionMismatch(f"θ must be a non-empty vector, got shape {theta.shape}")
        if not np.all(np.isfinite(theta)):
            raise OutOfDomain("θ coordinates must be finite")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @property
    def D(self) -> int:
        return int(self.theta.size + 1)


@dataclass(frozen=True, eq=False)
class EtaCoords:
    eta: np.ndarray

    def __post_init__(self) -> None:
        eta = np.array(self.eta, dtype=float)
        if eta.ndim != 1 or eta.size < 1:
            raise DimensionMismatch(f"η must be a non-empty vector, got shape {eta.shape}")
        if not np.all(np.isfinite(eta)) or np.any(eta <= BOUNDARY_MARGIN):
            raise OutOfDomain("every ηᵢ must lie strictly inside (0, 1)")
        remainder = 1.0 - eta.sum()
        if remainder <= BOUNDARY_MARGIN:
            raise OutOfDomain(f"Σηᵢ must stay below 1, remainder is {remainder:.3e}")
        eta.setflags(write=False)
        object.__setattr__(self, "eta", eta)

    @classmethod
    def from_softmax(cls, eta: np.ndarray) -> "EtaCoords":
        """Wrap η computed from a finite θ.

        No boundary margin applies: for θ beyond roughly ±32 the image rounds to
        within 1e-14 of the boundary while still describing a valid point.
        """
        values = np.array(eta, dtype=float)
        values.setflags(write=False)
        coords = object.__new__(cls)
        object.__setattr__(coords, "eta", values)
        return coords

    @property
    def D(self) -> int:
        return int(self.eta.size + 1)

    @property
    def remainder(self) -> float:
        """Probability of the reference part, 1 − Σηᵢ."""
        return float(1.0 - self.eta.sum())

    def full(self) -> np.ndarray:
        return np.append(self.eta, self.remainder)


ThetaLike = Union[ThetaCoords, ArrayLike]
EtaLike = Union[EtaCoords, ArrayLike]


def as_theta(theta: ThetaLike) -> ThetaCoords:
    return theta if isinstance(theta, ThetaCoords) else ThetaCoords(theta)


def as_eta(eta: EtaLike) -> EtaCoords:
    return eta if isinstance(eta, EtaCoords) else EtaCoords(eta)


class CoordinateSystem(str, Enum):
    THETA = "theta"
    ETA = "eta"


@dataclass(frozen=True, eq=False)
class FisherMatrix:
    g: np.ndarray
    coordinate_system: CoordinateSystem

    def __post_init__(self) -> None:
        g = np.array(self.g, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionMismatch(f"Fisher matrix must be square, got shape {g.shape}")
        asymmetry = float(np.max(np.abs(g - g.T))) if g.size else 0.0
        if asymmetry > SYMMETRY_TOLERANCE * max(1.0, float(np.max(np.abs(g)))):
            raise ValueError(f"Fisher matrix is not symmetric (deviation {asymmetry:.3e})")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "coordinate_system", CoordinateSystem(self.coordinate_system))

    def is_positive_definite(self) -> bool:
        return bool(np.all(np.linalg.eigvalsh(self.g) > 0))

    def inverse(self) -> "FisherMatrix":
        other = (
            CoordinateSystem.ETA
            if self.coordinate_system is CoordinateSystem.THETA
            else CoordinateSystem.THETA
        )
        inv = np.linalg.inv(self.g)
        return FisherMatrix(0.5 * (inv + inv.T), other)


def psi(theta: ThetaLike) -> float:
    """ψ(θ) = log(1 + Σ e^{θⁱ}), evaluated as a shifted log-sum-exp."""
    values = as_theta(theta).theta
    return float(logsumexp(np.append(values, 0.0)))


def phi(eta: EtaLike) -> float:
    """φ(η) = Σ ηᵢ log ηᵢ + (1 − Σηᵢ) log(1 − Σηᵢ), the negative Shannon entropy."""
    return float(np.sum(xlogy(full := as_eta(eta).full(), full)))


def _softmax_parts(theta: ThetaLike) -> np.ndarray:
    return softmax(np.append(as_theta(theta).theta, 0.0))


def eta_from_theta(theta: ThetaLike) -> EtaCoords:
    return EtaCoords.from_softmax(_softmax_parts(theta)[:-1])


def theta_from_eta(eta: EtaLike) -> ThetaCoords:
    coords = as_eta(eta)
    return ThetaCoords(np.log(coords.eta) - np.log(coords.remainder))


def theta_of(x: CompositionLike) -> ThetaCoords:
    return ThetaCoords(alr(x))


def eta_of(x: CompositionLike) -> EtaCoords:
    return EtaCoords(closed_parts(x)[:-1])


@dataclass(frozen=True, eq=False)
class DualCoords:
    """Paired θ/η coordinates of one composition with both potentials."""

    theta: ThetaCoords
    eta: EtaCoords
    psi: float = field(init=False)
    phi: float = field(init=False)

    def __post_init__(self) -> None:
        if self.theta.D != self.eta.D:
            raise DimensionMismatch(f"θ has D={self.theta.D}, η has D={self.eta.D}")
        object.__setattr__(self, "psi", psi(self.theta))
        object.__setattr__(self, "phi", phi(self.eta))

    @classmethod
    def from_composition(cls, x: CompositionLike) -> "DualCoords":
        return cls(theta=theta_of(x), eta=eta_of(x))

    @property
    def legendre_gap(self) -> float:
        """ψ(θ) + φ(η) − θ·η; zero when θ and η describe the same point."""
        return float(self.psi + self.phi - self.theta.theta @ self.eta.eta)


def fenchel_gap(x: CompositionLike, y: CompositionLike) -> float:
    """ψ(θ_x) + φ(η_y) − θ_x·η_y, which equals D_ψ(x‖y)."""
    theta_x, eta_y = theta_of(x), eta_of(y)
    if theta_x.D != eta_y.D:
        raise DimensionMismatch(f"dimension mismatch: {theta_x.D} vs {eta_y.D}")
    return float(psi(theta_x) + phi(eta_y) - theta_x.theta @ eta_y.eta)


def fisher_theta(theta: ThetaLike) -> FisherMatrix:
    """g(θ) = diag(η) − ηηᵀ, the covariance of the part indicators."""
    eta = _softmax_parts(theta)[:-1]
    return FisherMatrix(np.diag(eta) - np.outer(eta, eta), CoordinateSystem.THETA)


def fisher_eta(eta: EtaLike) -> FisherMatrix:
    """g(η) = diag(1/η) + 𝟙𝟙ᵀ/(1 − Σηᵢ), the Hessian of φ and inverse of g(θ)."""
    coords = as_eta(eta)
    n = coords.eta.size
    return FisherMatrix(
        np.diag(1.0 / coords.eta) + np.full((n, n), 1.0 / coords.remainder),
        CoordinateSystem.ETA,
    )


def fisher_eta_of(x: CompositionLike) -> FisherMatrix:
    """g(η) at a composition, with the last part standing in for 1 − Σηᵢ."""
    parts = closed_parts(x)
    n = parts.size - 1
    return FisherMatrix(np.diag(1.0 / parts[:-1]) + np.full((n, n), 1.0 / parts[-1]), CoordinateSystem.ETA)


@dataclass(frozen=True, eq=False)
class ExponentialFamily:
    """p(r; θ) = p₀(r) exp(Σ_k θᵏ X_k(r) − ψ(θ)) over D outcomes with d features."""

    base: Composition
    features: np.ndarray
    theta: np.ndarray

    def __post_init__(self) -> None:
        base = self.base if isinstance(self.base, Composition) else Composition(self.base)
        features = np.array(self.features, dtype=float)
        if features.ndim == 1:
            features = features[:, None]
        theta = np.atleast_1d(np.array(self.theta, dtype=float))
        if features.ndim != 2 or features.shape[0] != base.D:
            raise DimensionMismatch(
                f"feature table must have {base.D} rows, got shape {features.shape}"
            )
        if features.shape[1] > base.D - 1:
            raise DimensionMismatch(
                f"at most {base.D - 1} features fit {base.D} outcomes, got {features.shape[1]}"
            )
        if theta.shape != (features.shape[1],):
            raise DimensionMismatch(
                f"θ must have one entry per feature ({features.shape[1]}), got shape {theta.shape}"
            )
        if not np.all(np.isfinite(features)) or not np.all(np.isfinite(theta)):
            raise OutOfDomain("features and θ must be finite")
        features.setflags(write=False)
        theta.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "theta", theta)

    @property
    def d(self) -> int:
        return int(self.features.shape[1])

    def with_theta(self, theta: ArrayLike) -> "ExponentialFamily":
        return ExponentialFamily(self.base, self.features, np.asarray(theta, dtype=float))

    def _log_weights(self, theta: np.ndarray | None = None) -> np.ndarray:
        values = self.theta if theta is None else theta
        return np.log(closed_parts(self.base)) + self.features @ values


def expfam_psi(F: ExponentialFamily, theta: ArrayLike | None = None) -> float:
    """log Σ_r p₀(r) exp(Σ_k θᵏ X_k(r)), optionally at another θ of the same family."""
    values = None if theta is None else np.atleast_1d(np.asarray(theta, dtype=float))
    return float(logsumexp(F._log_weights(values)))


def expfam_eval(F: ExponentialFamily) -> Composition:
    features = F.features
    if features.shape[0] > 1 and np.all(features == features[0]):
        logger.warning("Exponential family with identical feature rows collapses to its base measure")
        warnings.warn(
            "all feature rows are identical; the family does not move away from p0",
            DegenerateFamilyWarning,
            stacklevel=2,
        )
    return Composition(softmax(F._log_weights()))


def expfam_fisher(F: ExponentialFamily) -> FisherMatrix:
    """Covariance of the features under the evaluated distribution."""
    p = softmax(F._log_weights())
    centered = F.features - p @ F.features
    cov = centered.T @ (p[:, None] * centered)
    return FisherMatrix(0.5 * (cov + cov.T), CoordinateSystem.THETA)


def indicator_family(theta: ArrayLike, base: CompositionLike | None = None) -> ExponentialFamily:
    """The full-simplex family: uniform base, features 𝟙_k for k < D."""
    values = np.atleast_1d(np.asarray(theta, dtype=float))
    D = values.size + 1
    base_parts = np.full(D, 1.0 / D) if base is None else parts_of(base)
    features = np.vstack([np.eye(D - 1), np.zeros((1, D - 1))])
    return ExponentialFamily(Composition(base_parts), features, values)
