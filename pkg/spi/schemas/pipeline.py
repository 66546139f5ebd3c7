from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..config import settings
from .solver import SolverConfig

Thinning = Literal["dedup", "poisson"]
Restriction = Literal["first", "random"]
GoldreichMode = Literal["fold-first", "fold-spread", "discard"]
PipelineStatus = Literal["ok", "unidentifiable", "degenerate", "empty"]


class PipelineOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    solver: SolverConfig = Field(default_factory=SolverConfig)
    thinning: Thinning = "dedup"
    epsilon: float = Field(default_factory=lambda: settings.THINNING_EPSILON, gt=0.0, lt=1.0)
    restriction: Restriction = "first"
    goldreich_mode: GoldreichMode = "fold-first"
    try_all: bool = False
    seed: int = Field(0, ge=0, lt=2**64)


class SolveReport(BaseModel):
    """端到端求解报告"""
    status: PipelineStatus = "ok"
    path: Literal["majority", "spi", "none"] = "none"
    r: Optional[int] = None
    S: Tuple[int, ...] = ()
    delta: float = 1.0
    overlap: Optional[float] = None
    inconsistencies: int = 0
    coin_flips: int = 0
    edges_used: int = 0
    candidates_tried: int = 0

    def to_json(self) -> dict:
        payload = self.model_dump()
        payload["S"] = list(self.S)
        payload["r"] = "inf" if self.r is None and self.status == "unidentifiable" else self.r
        return payload
