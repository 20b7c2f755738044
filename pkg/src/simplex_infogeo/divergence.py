"""Divergences and distances between compositions.

Every operation closes its inputs first. ``D_φ`` is the relative entropy
``kl(x, y) = Σ xᵢ log(xᵢ/yᵢ)`` and ``D_ψ(x‖y) = D_φ(y‖x)`` is exposed as
``kl_reverse``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Iterable, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import rel_entr, softmax

from .duality import EtaCoords, eta_from_theta, phi, psi, theta_from_eta
from .errors import (
    CoordinateDomainError,
    DimensionMismatch,
    NegativeWeight,
    NonConvexPotential,
    OutOfDomain,
    ParameterOutOfRange,
)
from .finite_diff import central_gradient
from .simplex import (
    CompositionLike,
    aitchison_distance_squared,
    alr,
    clr,
    closed_parts,
    ilr,
    parts_of,
)

logger = logging.getLogger(__name__)

ZERO_FLOOR = -1e-12
CONVEXITY_SLACK = 1e-9
FALLBACK_GRADIENT_STEP = 1e-6
ALPHA_LIMIT_BAND = 1e-6
BOXCOX_LIMIT_BAND = 1e-6


class DivergenceKind(str, Enum):
    BREGMAN = "bregman"
    KL = "kl"
    KL_REVERSE = "kl_reverse"
    ALPHA = "alpha"
    F = "f"
    AITCHISON = "aitchison"


@dataclass(frozen=True, slots=True)
class DivergenceResult:
    value: float
    kind: DivergenceKind
    direction: str = "x‖y"

    def __post_init__(self) -> None:
        if not (self.value >= ZERO_FLOOR):
            raise NonConvexPotential(
                f"{self.kind.value} divergence evaluated to {self.value!r}, below the {ZERO_FLOOR} floor"
            )

    def __float__(self) -> float:
        return float(self.value)

    def to_payload(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "direction": self.direction, "value": self.value}


def _closed_pair(x: CompositionLike, y: CompositionLike) -> Tuple[np.ndarray, np.ndarray]:
    px, py = closed_parts(x), closed_parts(y)
    if px.size != py.size:
        raise DimensionMismatch(f"dimension mismatch: {px.size} vs {py.size}")
    return px, py


# --- generic Bregman engine -------------------------------------------------


class PotentialCoords(str, Enum):
    ETA = "eta"
    THETA = "theta"
    ILR = "ilr"


@dataclass(frozen=True)
class ConvexPotential:
    """A convex function U on one coordinate chart of the simplex.

    ``gradient`` may be omitted; central differences with step 1e-6 are used
    instead. Callables must be reentrant when used from worker threads.
    """

    value: Callable[[np.ndarray], float]
    coords: PotentialCoords
    gradient: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "custom"

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", PotentialCoords(self.coords))

    def coordinates(self, x: CompositionLike) -> np.ndarray:
        try:
            if self.coords is PotentialCoords.ETA:
                return EtaCoords(closed_parts(x)[:-1]).eta
            if self.coords is PotentialCoords.THETA:
                theta = alr(x)
                if not np.all(np.isfinite(theta)):
                    raise OutOfDomain("θ coordinates overflowed")
                return theta
            return ilr(x).z
        except OutOfDomain as exc:
            raise CoordinateDomainError(f"{self.name}: composition leaves the {self.coords.value} domain: {exc}") from exc

    def __call__(self, point: ArrayLike) -> float:
        result = float(self.value(np.asarray(point, dtype=float)))
        if not np.isfinite(result):
            raise CoordinateDomainError(f"{self.name} is not finite at {point!r}")
        return result

    def grad(self, point: ArrayLike) -> np.ndarray:
        values = np.asarray(point, dtype=float)
        if self.gradient is not None:
            return np.asarray(self.gradient(values), dtype=float)
        return central_gradient(self, values, step=FALLBACK_GRADIENT_STEP)


def _eta_gradient(eta: np.ndarray) -> np.ndarray:
    return theta_from_eta(eta).theta


def _theta_gradient(theta: np.ndarray) -> np.ndarray:
    return eta_from_theta(theta).eta


NEGATIVE_ENTROPY = ConvexPotential(phi, PotentialCoords.ETA, _eta_gradient, name="negative_entropy")
LOG_PARTITION = ConvexPotential(psi, PotentialCoords.THETA, _theta_gradient, name="log_partition")
AITCHISON_POTENTIAL = ConvexPotential(
    lambda z: float(z @ z),
    PotentialCoords.ILR,
    lambda z: 2.0 * z,
    name="aitchison_potential",
)


def bregman(U: ConvexPotential, x: CompositionLike, y: CompositionLike) -> DivergenceResult:
    """U(a) − U(b) − ∇U(b)·(a − b) with a, b the coordinates of x and y."""
    a, b = U.coordinates(x), U.coordinates(y)
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimension mismatch: {a.size + 1} vs {b.size + 1}")
    value = U(a) - U(b) - float(U.grad(b) @ (a - b))
    if value < ZERO_FLOOR:
        raise NonConvexPotential(f"{U.name} produced a Bregman divergence of {value:.3e}")
    return DivergenceResult(value, DivergenceKind.BREGMAN)


def check_midpoint_convexity(
    U: ConvexPotential, pairs: Iterable[Tuple[CompositionLike, CompositionLike]]
) -> float:
    """Worst (U(a) + U(b))/2 − U((a + b)/2) over the pairs; raises below −1e-9."""
    worst = np.inf
    for x, y in pairs:
        a, b = U.coordinates(x), U.coordinates(y)
        margin = 0.5 * (U(a) + U(b)) - U(0.5 * (a + b))
        worst = min(worst, margin)
        if margin < -CONVEXITY_SLACK:
            raise NonConvexPotential(f"{U.name} fails midpoint convexity by {-margin:.3e}")
    return float(worst)


# --- relative entropies and the α-family ------------------------------------


def kl(x: CompositionLike, y: CompositionLike) -> DivergenceResult:
    px, py = _closed_pair(x, y)
    return DivergenceResult(float(np.sum(rel_entr(px, py))), DivergenceKind.KL)


def kl_reverse(x: CompositionLike, y: CompositionLike) -> DivergenceResult:
    """D_ψ(x‖y), i.e. kl with the arguments swapped."""
    return DivergenceResult(kl(y, x).value, DivergenceKind.KL_REVERSE)


def alpha_divergence(alpha: float, x: CompositionLike, y: CompositionLike) -> DivergenceResult:
    """4/(1−α²)·(1 − Σ yᵢ^{(1+α)/2} xᵢ^{(1−α)/2}).

    α → +1 tends to ``kl_reverse`` and α → −1 to ``kl``; inside a 1e-6 band
    around the poles the limit is returned.
    """
    if not np.isfinite(alpha):
        raise ParameterOutOfRange(f"α must be finite, got {alpha!r}")
    px, py = _closed_pair(x, y)
    if abs(alpha - 1.0) <= ALPHA_LIMIT_BAND:
        return DivergenceResult(kl_reverse(px, py).value, DivergenceKind.ALPHA)
    if abs(alpha + 1.0) <= ALPHA_LIMIT_BAND:
        return DivergenceResult(kl(px, py).value, DivergenceKind.ALPHA)
    # 1 − Σ w·exp(c·L) = −Σ w·expm1(c·L) since Σw = 1; expand around the nearer pole
    if alpha >= 0:
        weights, c, logs = py, 0.5 * (1.0 - alpha), np.log(px) - np.log(py)
    else:
        weights, c, logs = px, 0.5 * (1.0 + alpha), np.log(py) - np.log(px)
    deficit = -float(np.sum(weights * np.expm1(c * logs)))
    value = 4.0 / ((1.0 - alpha) * (1.0 + alpha)) * deficit
    return DivergenceResult(value, DivergenceKind.ALPHA)


# --- Hellinger, Bhattacharyya, Fisher ----------------------------------------


def bhattacharyya(x: CompositionLike, y: CompositionLike) -> float:
    """Σ √(xᵢyᵢ), the cosine between the square-root embeddings."""
    px, py = _closed_pair(x, y)
    return float(np.sum(np.sqrt(px * py)))


def bhattacharyya_distance(x: CompositionLike, y: CompositionLike) -> float:
    return float(max(0.0, -np.log(bhattacharyya(x, y))))


def hellinger_squared(x: CompositionLike, y: CompositionLike) -> float:
    px, py = _closed_pair(x, y)
    return float(np.sum((np.sqrt(px) - np.sqrt(py)) ** 2))


def hellinger(x: CompositionLike, y: CompositionLike) -> float:
    return float(np.sqrt(hellinger_squared(x, y)))


def fisher_distance(x: CompositionLike, y: CompositionLike) -> float:
    """2 arccos BC, the great-circle distance of the square-root embeddings."""
    return float(2.0 * np.arccos(np.clip(bhattacharyya(x, y), -1.0, 1.0)))


# --- Box-Cox family ---------------------------------------------------------


def boxcox_distance(
    beta: float,
    weights: ArrayLike | None,
    x: CompositionLike,
    y: CompositionLike,
) -> float:
    """d_β² = (1/β²) Σ ωᵢ (𝒞(x^β)ᵢ − 𝒞(y^β)ᵢ)².

    Near β = 0 the limit Σ (ωᵢ/D²)(clr(x)ᵢ − clr(y)ᵢ)² is used. ``weights=None``
    means ωᵢ = 1.
    """
    if not np.isfinite(beta):
        raise ParameterOutOfRange(f"β must be finite, got {beta!r}")
    px, py = parts_of(x), parts_of(y)
    if px.size != py.size:
        raise DimensionMismatch(f"dimension mismatch: {px.size} vs {py.size}")
    D = px.size
    omega = np.ones(D) if weights is None else np.asarray(weights, dtype=float)
    if omega.shape != (D,):
        raise DimensionMismatch(f"weights must have length {D}, got shape {omega.shape}")
    if np.any(omega < 0) or not np.all(np.isfinite(omega)):
        raise NegativeWeight(f"weights must be finite and nonnegative, got {omega.tolist()}")
    if abs(beta) <= BOXCOX_LIMIT_BAND:
        diff = clr(px).coords - clr(py).coords
        return float(np.sum(omega / D**2 * diff**2))
    diff = softmax(beta * np.log(px)) - softmax(beta * np.log(py))
    return float(np.sum(omega * diff**2) / beta**2)


# --- f-divergences ----------------------------------------------------------

FGenerator = Callable[[np.ndarray], np.ndarray]


def _kl_generator(t: np.ndarray) -> np.ndarray:
    return -np.log(t)


def _reverse_kl_generator(t: np.ndarray) -> np.ndarray:
    return t * np.log(t)


def _hellinger_generator(t: np.ndarray) -> np.ndarray:
    return (np.sqrt(t) - 1.0) ** 2


def _chi_square_generator(t: np.ndarray) -> np.ndarray:
    return (t - 1.0) ** 2


def _total_variation_generator(t: np.ndarray) -> np.ndarray:
    return 0.5 * np.abs(t - 1.0)


def alpha_generator(alpha: float) -> FGenerator:
    """f(t) = 4/(1−α²)(1 − t^{(1+α)/2}); its f-divergence is the α-divergence."""
    if not np.isfinite(alpha) or abs(abs(alpha) - 1.0) <= ALPHA_LIMIT_BAND:
        raise ParameterOutOfRange(f"α-generator needs a finite α away from ±1, got {alpha!r}")
    scale = 4.0 / ((1.0 - alpha) * (1.0 + alpha))
    exponent = 0.5 * (1.0 + alpha)

    def _generator(t: np.ndarray) -> np.ndarray:
        return -scale * np.expm1(exponent * np.log(t))

    return _generator


F_GENERATORS: Dict[str, FGenerator] = {
    "kl": _kl_generator,
    "reverse_kl": _reverse_kl_generator,
    "hellinger": _hellinger_generator,
    "chi_square": _chi_square_generator,
    "total_variation": _total_variation_generator,
}


def resolve_generator(f: Union[str, FGenerator]) -> FGenerator:
    if callable(f):
        return f
    try:
        return F_GENERATORS[f]
    except KeyError as exc:
        raise ParameterOutOfRange(
            f"unknown f-generator {f!r}; choose one of {sorted(F_GENERATORS)}"
        ) from exc


def f_divergence(f: Union[str, FGenerator], x: CompositionLike, y: CompositionLike) -> DivergenceResult:
    """Σ xᵢ f(yᵢ/xᵢ) for a convex f with f(1) = 0."""
    generator = resolve_generator(f)
    px, py = _closed_pair(x, y)
    values = np.asarray(generator(py / px), dtype=float)
    return DivergenceResult(float(np.sum(px * values)), DivergenceKind.F)


def aitchison_divergence(x: CompositionLike, y: CompositionLike) -> DivergenceResult:
    """Bregman divergence of the squared Aitchison norm, i.e. d_A²(x, y)."""
    return DivergenceResult(aitchison_distance_squared(x, y), DivergenceKind.AITCHISON)
