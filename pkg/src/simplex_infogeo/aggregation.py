"""Subcompositions, amalgamations and the decompositions they induce.

Part indices are 0-based. Amalgamated compositions keep the complement
parts in their original order and append the amalgamated part last.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, Sequence, Tuple

import numpy as np
from scipy.special import entr

from .divergence import hellinger_squared, kl
from .errors import InvalidSubset, UnknownPartName
from .simplex import Composition, CompositionLike, aitchison_distance_squared, closed_parts

logger = logging.getLogger(__name__)

ENTROPY_TOLERANCE = 1e-12
NORM_TOLERANCE = 1e-10
MARGIN_FLOOR = -1e-12


@dataclass(frozen=True, slots=True)
class PartSubset:
    """Index set 𝒜 ⊂ {0, …, D−1} with both 𝒜 and its complement nonempty."""

    indices: Tuple[int, ...]
    D: int

    def __post_init__(self) -> None:
        try:
            indices = tuple(sorted(int(i) for i in self.indices))
        except (TypeError, ValueError) as exc:
            raise InvalidSubset(f"subset indices must be integers: {self.indices!r}") from exc
        if len(set(indices)) != len(indices):
            raise InvalidSubset(f"subset has repeated indices: {list(self.indices)}")
        if indices and (indices[0] < 0 or indices[-1] >= self.D):
            raise InvalidSubset(f"subset {list(indices)} out of range for D={self.D}")
        if not 1 <= len(indices) <= self.D - 1:
            raise InvalidSubset(
                f"subset size must be between 1 and {self.D - 1} for D={self.D}, got {len(indices)}"
            )
        object.__setattr__(self, "indices", indices)

    @property
    def a(self) -> int:
        return len(self.indices)

    def complement_indices(self) -> Tuple[int, ...]:
        chosen = set(self.indices)
        return tuple(i for i in range(self.D) if i not in chosen)

    def complement(self) -> "PartSubset":
        return PartSubset(self.complement_indices(), self.D)

    @classmethod
    def from_names(cls, names: Iterable[str], part_names: Sequence[str]) -> "PartSubset":
        lookup = {name: idx for idx, name in enumerate(part_names)}
        indices = []
        for name in names:
            if name not in lookup:
                raise UnknownPartName(f"unknown part name {name!r}; known parts: {list(part_names)}")
            indices.append(lookup[name])
        return cls(tuple(indices), len(part_names))


def _checked(x: CompositionLike, A: PartSubset) -> np.ndarray:
    parts = closed_parts(x)
    if parts.size != A.D:
        raise InvalidSubset(f"subset is for D={A.D}, composition has {parts.size} parts")
    return parts


def subcomposition(x: CompositionLike, A: PartSubset) -> Composition:
    if A.a < 2:
        raise InvalidSubset("a subcomposition needs at least two parts")
    parts = _checked(x, A)[list(A.indices)]
    return Composition(parts / parts.sum())


def amalgamated_mass(x: CompositionLike, A: PartSubset) -> float:
    """s(x_𝒜), the total mass of the selected parts."""
    return float(_checked(x, A)[list(A.indices)].sum())


def amalgamate(x: CompositionLike, A: PartSubset) -> Composition:
    parts = _checked(x, A)
    kept = parts[list(A.complement_indices())]
    return Composition(np.append(kept, parts[list(A.indices)].sum()))


def shannon_entropy(x: CompositionLike) -> float:
    return float(np.sum(entr(closed_parts(x))))


def _closed_entropy(values: np.ndarray) -> float:
    # single parts are allowed here; their closure is (1,) with zero entropy
    return float(np.sum(entr(values / values.sum())))


def binary_entropy(s: float) -> float:
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"binary entropy needs a probability, got {s!r}")
    return float(entr(s) + entr(1.0 - s))


@dataclass(frozen=True)
class DecompositionReport:
    identity: str
    lhs: float
    terms: Dict[str, float]
    tolerance: float = NORM_TOLERANCE
    residual: float = field(init=False)

    def __post_init__(self) -> None:
        terms = {name: float(value) for name, value in self.terms.items()}
        object.__setattr__(self, "lhs", float(self.lhs))
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "residual", float(self.lhs - sum(terms.values())))

    @property
    def passed(self) -> bool:
        return abs(self.residual) <= self.tolerance

    def to_payload(self) -> Dict[str, Any]:
        return {
            "identity": self.identity,
            "lhs": self.lhs,
            "terms": dict(self.terms),
            "residual": self.residual,
            "passed": self.passed,
        }


class EntropyMode(str, Enum):
    SUBCOMP = "subcomp"
    AMALGAM = "amalgam"


class AggregationMode(str, Enum):
    SUBCOMP = "subcomp"
    AMALGAM = "amalgam"
    GEOMEAN = "geomean"


def entropy_decomposition(
    x: CompositionLike, A: PartSubset, mode: EntropyMode | str = EntropyMode.AMALGAM
) -> DecompositionReport:
    mode = EntropyMode(mode)
    parts = _checked(x, A)
    selected = parts[list(A.indices)]
    rest = parts[list(A.complement_indices())]
    s = float(selected.sum())
    within = s * _closed_entropy(selected)
    if mode is EntropyMode.SUBCOMP:
        terms = {
            "complement": (1.0 - s) * _closed_entropy(rest),
            "subset": within,
            "binary": binary_entropy(s),
        }
    else:
        terms = {
            "amalgamated": shannon_entropy(np.append(rest, s)),
            "coarse_graining_loss": within,
        }
    return DecompositionReport(
        identity=f"entropy/{mode.value}",
        lhs=shannon_entropy(parts),
        terms=terms,
        tolerance=ENTROPY_TOLERANCE,
    )


def interaction_coefficient(D: int, a: int) -> Fraction:
    """a(D−a)/D − (D−a)/(D−a+1), exact; nonnegative and zero only at a ∈ {1, D}."""
    if D < 2 or not 1 <= a <= D:
        raise InvalidSubset(f"need 1 <= a <= D and D >= 2, got D={D}, a={a}")
    return Fraction(a * (D - a), D) - Fraction(D - a, D - a + 1)


def interaction_sign_table(max_D: int = 50) -> Dict[Tuple[int, int], int]:
    """Sign of the interaction coefficient for every 2 ≤ D ≤ max_D, 1 ≤ a ≤ D."""
    table: Dict[Tuple[int, int], int] = {}
    for D in range(2, max_D + 1):
        for a in range(1, D + 1):
            value = interaction_coefficient(D, a)
            table[(D, a)] = (value > 0) - (value < 0)
    return table


def _spread(values: np.ndarray) -> float:
    """Σ (vᵢ − v̄)², the squared Aitchison norm of the composition with logs v."""
    if values.size < 2:
        return 0.0
    centered = values - values.mean()
    return float(centered @ centered)


def _log_terms(
    logs: np.ndarray, A: PartSubset, aggregated_log: float, mode: AggregationMode
) -> Dict[str, float]:
    D, a = A.D, A.a
    inside = logs[list(A.indices)]
    outside = logs[list(A.complement_indices())]
    gap = outside.mean() - inside.mean()
    between = a * (D - a) / D
    if mode is AggregationMode.SUBCOMP:
        return {
            "complement": _spread(outside),
            "subset": _spread(inside),
            "interaction": between * gap**2,
        }
    if mode is AggregationMode.AMALGAM:
        return {
            "amalgamated": _spread(np.append(outside, aggregated_log)),
            "subset": _spread(inside),
            "interaction": between * gap**2,
            "amalgamation_correction": -(D - a) / (D - a + 1) * (outside.mean() - aggregated_log) ** 2,
        }
    return {
        "aggregated": _spread(np.append(outside, inside.mean())),
        "subset": _spread(inside),
        "interaction": float(interaction_coefficient(D, a)) * gap**2,
    }


def norm_decomposition(
    x: CompositionLike, A: PartSubset, mode: AggregationMode | str = AggregationMode.SUBCOMP
) -> DecompositionReport:
    mode = AggregationMode(mode)
    parts = _checked(x, A)
    logs = np.log(parts)
    mass = np.log(parts[list(A.indices)].sum())
    return DecompositionReport(
        identity=f"norm/{mode.value}",
        lhs=_spread(logs),
        terms=_log_terms(logs, A, float(mass), mode),
        tolerance=NORM_TOLERANCE,
    )


def distance_decomposition(
    x: CompositionLike,
    y: CompositionLike,
    A: PartSubset,
    mode: AggregationMode | str = AggregationMode.AMALGAM,
) -> DecompositionReport:
    """Split ‖x ⊖ y‖²_A; each side is aggregated from its own parts."""
    mode = AggregationMode(mode)
    px, py = _checked(x, A), _checked(y, A)
    logs = np.log(px) - np.log(py)
    idx = list(A.indices)
    mass_ratio = np.log(px[idx].sum()) - np.log(py[idx].sum())
    return DecompositionReport(
        identity=f"distance/{mode.value}",
        lhs=_spread(logs),
        terms=_log_terms(logs, A, float(mass_ratio), mode),
        tolerance=NORM_TOLERANCE,
    )


@dataclass(frozen=True, slots=True)
class AuditReport:
    aitchison_before: float
    aitchison_after: float
    kl_before: float
    kl_after: float
    hellinger_before: float
    hellinger_after: float
    geomean_margin: float

    @property
    def margins(self) -> Dict[str, float]:
        return {
            "aitchison": self.aitchison_before - self.aitchison_after,
            "kl": self.kl_before - self.kl_after,
            "hellinger": self.hellinger_before - self.hellinger_after,
            "geomean": self.geomean_margin,
        }

    @property
    def passed(self) -> bool:
        return all(margin >= MARGIN_FLOOR for margin in self.margins.values())

    def to_payload(self) -> Dict[str, Any]:
        return {
            "aitchison": {"before": self.aitchison_before, "after": self.aitchison_after},
            "kl": {"before": self.kl_before, "after": self.kl_after},
            "hellinger": {"before": self.hellinger_before, "after": self.hellinger_after},
            "margins": self.margins,
            "passed": self.passed,
        }


def monotonicity_audit(x: CompositionLike, y: CompositionLike, A: PartSubset) -> AuditReport:
    """Compare d_A², KL and d_H² before and after amalgamating 𝒜 in both compositions."""
    px, py = _checked(x, A), _checked(y, A)
    ax, ay = amalgamate(px, A), amalgamate(py, A)
    geomean = distance_decomposition(px, py, A, AggregationMode.GEOMEAN)
    report = AuditReport(
        aitchison_before=aitchison_distance_squared(px, py),
        aitchison_after=aitchison_distance_squared(ax, ay),
        kl_before=kl(px, py).value,
        kl_after=kl(ax, ay).value,
        hellinger_before=hellinger_squared(px, py),
        hellinger_after=hellinger_squared(ax, ay),
        geomean_margin=geomean.terms["interaction"],
    )
    if not report.passed:
        logger.warning("Monotonicity margin below floor for subset %s: %s", A.indices, report.margins)
    return report
