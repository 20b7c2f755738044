from __future__ import annotations

from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .aggregation import AggregationMode
from .config import get_settings
from .divergence import F_GENERATORS


class Measure(str, Enum):
    AITCHISON = "aitchison"
    KL = "kl"
    KL_REVERSE = "kl_reverse"
    ALPHA = "alpha"
    HELLINGER = "hellinger"
    FISHER = "fisher"
    BHATTACHARYYA = "bhattacharyya"
    BOXCOX = "boxcox"
    F = "f"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class ZeroPolicy(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["error", "replace"] = "error"
    epsilon: Optional[float] = Field(None, gt=0.0, lt=1.0)

    @classmethod
    def parse(cls, text: str) -> "ZeroPolicy":
        """``error``, ``replace`` or ``replace:<eps>``."""
        head, _, tail = text.strip().partition(":")
        if head == "error" and not tail:
            return cls(kind="error")
        if head == "replace":
            if not tail:
                return cls(kind="replace", epsilon=get_settings().zero_epsilon)
            try:
                epsilon = float(tail)
            except ValueError as exc:
                raise ValueError(f"invalid replacement value in zero policy {text!r}") from exc
            if not 0.0 < epsilon < 1.0:
                raise ValueError(f"replacement value must lie in (0, 1), got {epsilon!r}")
            return cls(kind="replace", epsilon=epsilon)
        raise ValueError(f"zero policy must be 'error' or 'replace:<eps>', got {text!r}")

    def label(self) -> str:
        return "error" if self.kind == "error" else f"replace:{self.epsilon!r}"


def _split_names(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    measure: Measure = Measure.AITCHISON
    alpha: Optional[float] = None
    beta: Optional[float] = None
    weights: Optional[List[float]] = None
    generator: Optional[str] = None
    contrast: str = Field("helmert", description="helmert, pivot or file:<path>")
    zero_policy: ZeroPolicy = Field(default_factory=ZeroPolicy)
    subset: List[str] = Field(default_factory=list)
    mode: AggregationMode = AggregationMode.AMALGAM
    format: OutputFormat = OutputFormat.JSON

    @field_validator("zero_policy", mode="before")
    @classmethod
    def _parse_zero_policy(cls, value: Any) -> Any:
        if isinstance(value, str):
            return ZeroPolicy.parse(value)
        return value

    @field_validator("subset", mode="before")
    @classmethod
    def _parse_subset(cls, value: Any) -> Any:
        return _split_names(value)

    @field_validator("weights", mode="before")
    @classmethod
    def _parse_weights(cls, value: Any) -> Any:
        items = _split_names(value)
        if isinstance(items, list):
            try:
                return [float(item) for item in items]
            except (TypeError, ValueError) as exc:
                raise ValueError(f"weights must be numbers, got {value!r}") from exc
        return items

    @field_validator("contrast")
    @classmethod
    def _check_contrast(cls, value: str) -> str:
        if value in ("helmert", "pivot"):
            return value
        if value.startswith("file:") and len(value) > len("file:"):
            return value
        raise ValueError(f"contrast must be helmert, pivot or file:<path>, got {value!r}")

    @model_validator(mode="after")
    def _check_parameters(self) -> "RunConfig":
        if self.measure is Measure.ALPHA and self.alpha is None:
            raise ValueError("measure 'alpha' requires --alpha")
        if self.measure is Measure.BOXCOX and self.beta is None:
            raise ValueError("measure 'boxcox' requires --beta")
        if self.measure is Measure.F:
            if self.generator is None:
                raise ValueError("measure 'f' requires --generator")
            if self.generator not in F_GENERATORS:
                raise ValueError(
                    f"unknown generator {self.generator!r}; choose one of {sorted(F_GENERATORS)}"
                )
        if self.weights is not None and any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        return self

    @property
    def contrast_path(self) -> Optional[str]:
        return self.contrast[len("file:") :] if self.contrast.startswith("file:") else None

    def parameters(self) -> Dict[str, Any]:
        """Effective parameters of the selected measure, in a fixed order."""
        params: Dict[str, Any] = {"measure": self.measure.value}
        if self.measure is Measure.ALPHA:
            params["alpha"] = self.alpha
        if self.measure is Measure.BOXCOX:
            params["beta"] = self.beta
            params["weights"] = self.weights
        if self.measure is Measure.F:
            params["generator"] = self.generator
        params["contrast"] = self.contrast
        params["zero_policy"] = self.zero_policy.label()
        params["subset"] = list(self.subset)
        params["mode"] = self.mode.value
        return params
