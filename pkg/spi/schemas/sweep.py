from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config import settings

Family = Literal["sbm", "csp", "goldreich"]

CSV_COLUMNS = ["multiplier", "trials", "exact_rate", "mean_overlap", "mean_runtime_ms", "mean_edges"]


class SweepSpec(BaseModel):
    """密度扫描: 在 p = multiplier * p0 处重复求解并统计恢复率"""
    model_config = ConfigDict(frozen=True)

    family: Family = "sbm"
    n1: int = Field(1000, ge=2)
    n2: int = Field(1000, ge=2)
    delta: float = Field(1.8, ge=0.0, le=2.0)
    n: int = Field(100, ge=2)
    weights: Optional[Tuple[float, ...]] = None
    predicate: Optional[Tuple[int, ...]] = None
    multipliers: List[float]
    trials: int = Field(20, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    T_factor: float = Field(default_factory=lambda: settings.T_FACTOR, gt=0.0)
    workers: int = Field(default_factory=lambda: settings.SWEEP_WORKERS, ge=1)
    timing: bool = Field(True, description="Record wall-clock runtime; false writes 0 for reproducible files")
    output: Optional[Path] = None

    @field_validator("multipliers")
    @classmethod
    def positive_multipliers(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("at least one multiplier is required")
        if any(m <= 0 for m in value):
            raise ValueError("multipliers must be positive")
        return value

    @model_validator(mode="after")
    def check_family(self):
        if self.family == "sbm" and self.delta == 1.0:
            raise ValueError("delta = 1 carries no planted signal")
        if self.family == "csp" and self.weights is None:
            raise ValueError("csp sweeps need a weights table")
        if self.family == "goldreich" and self.predicate is None:
            raise ValueError("goldreich sweeps need a predicate table")
        return self


class SweepRow(BaseModel):
    multiplier: float
    trials: int
    exact_recovery_rate: float = Field(..., ge=0.0, le=1.0)
    mean_overlap: float = Field(..., ge=0.0, le=1.0)
    mean_runtime_ms: float
    mean_edges: float

    def as_record(self) -> dict:
        return {
            "multiplier": self.multiplier,
            "trials": self.trials,
            "exact_rate": self.exact_recovery_rate,
            "mean_overlap": self.mean_overlap,
            "mean_runtime_ms": self.mean_runtime_ms,
            "mean_edges": self.mean_edges,
        }


class TrialOutcome(BaseModel):
    multiplier_index: int
    trial: int
    overlap: float
    exact: bool
    runtime_ms: float
    edges: int
