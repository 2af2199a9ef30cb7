"""Domain inputs shared across services: parameters, priors, datasets, configs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from models.errors import DatasetError

# --- THAM SỐ PHÂN PHỐI ---

class GEParams(BaseModel):
    """Shape/rate pair (α, λ) of the generalized exponential law."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(description="Shape parameter α > 0 (dimensionless)")
    lam: float = Field(description="Scale (rate) parameter λ > 0, in 1/units of x")

    @field_validator("alpha", "lam")
    @classmethod
    def _positive_finite(cls, v: float) -> float:
        if not math.isfinite(v) or v <= 0:
            raise ValueError(f"must be finite and > 0, got {v!r}")
        return v


class PriorSpec(BaseModel):
    """Hyperparameters of the vague prior family π(α, λ) ∝ 1/(α^a λ^b).

    The defaults give the independence Jeffreys prior 1/(αλ).
    """

    model_config = ConfigDict(frozen=True)

    a: float = Field(default=1.0, description="Exponent on α")
    b: float = Field(default=1.0, description="Exponent on λ")

    @field_validator("a", "b")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError(f"must be finite, got {v!r}")
        return v

    @classmethod
    def jeffreys(cls) -> "PriorSpec":
        return cls(a=1.0, b=1.0)


# --- DỮ LIỆU ---

@dataclass(frozen=True, eq=False)
class Dataset:
    """Strictly positive observations with cached sufficient statistics.

    Parameters
    ----------
    values : array-like
        Observations x₁..xₙ in file order. At least two, all finite and > 0,
        not all equal.
    """

    values: np.ndarray
    n: int = field(init=False)
    sum_x: float = field(init=False)

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size < 2:
            raise DatasetError(f"dataset needs at least 2 observations, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise DatasetError("dataset contains non-finite values")
        if np.any(arr <= 0):
            bad = int(np.argmax(arr <= 0))
            raise DatasetError(f"observation #{bad + 1} is not positive: {arr[bad]!r}")
        if np.all(arr == arr[0]):
            raise DatasetError("all observations are equal; the posterior is not guaranteed proper")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "n", int(arr.size))
        object.__setattr__(self, "sum_x", float(arr.sum()))

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "Dataset":
        return cls(np.fromiter(values, dtype=float))

    @property
    def exp_fit_rate(self) -> float:
        """Rate n/Σxᵢ of the exponential fit, the natural scale of λ."""
        return self.n / self.sum_x

    def scaled(self, c: float) -> "Dataset":
        return Dataset(self.values * c)

    def __len__(self) -> int:
        return self.n


@dataclass
class ProprietyReport:
    """Outcome of the posterior propriety gate."""

    proper: bool
    reasons: List[str] = field(default_factory=list)


# --- CẤU HÌNH MÔ PHỎNG ---

def _default_n_grid() -> List[int]:
    return list(range(10, 101, 5))


class SimConfig(BaseModel):
    """Grid and Monte Carlo sizes for the Bayes-vs-MLE simulation study."""

    model_config = ConfigDict(frozen=True)

    n_grid: List[int] = Field(default_factory=_default_n_grid, description="Sample sizes n")
    alpha_grid: List[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0], description="True α values")
    lambda_grid: List[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0], description="True λ values")
    replications: int = Field(default=200, ge=1, description="Replications N per cell")
    draws: int = Field(default=10_000, ge=1, description="Posterior draws M per replication")
    prior: PriorSpec = Field(default_factory=PriorSpec.jeffreys)
    r: float = Field(default=1.0, ge=0.0, description="Ratio-of-uniforms exponent")
    base_seed: int = Field(default=0, ge=0)
    point_estimator: Literal["median", "mean"] = Field(default="median")
    workers: int = Field(default=1, ge=1, description="Worker processes (1 = serial)")

    @field_validator("n_grid")
    @classmethod
    def _sizes(cls, v: List[int]) -> List[int]:
        if not v or any(n < 2 for n in v):
            raise ValueError(f"n_grid must be non-empty with every n ≥ 2, got {v!r}")
        return v

    @field_validator("alpha_grid", "lambda_grid")
    @classmethod
    def _positive_grid(cls, v: List[float]) -> List[float]:
        if not v or any(not math.isfinite(x) or x <= 0 for x in v):
            raise ValueError(f"grid must be non-empty with positive finite entries, got {v!r}")
        return v

    @property
    def n_cells(self) -> int:
        return len(self.n_grid) * len(self.alpha_grid) * len(self.lambda_grid)
