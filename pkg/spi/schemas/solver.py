from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import settings

SolverMode = Literal["implicit_sparse", "dense_reference"]
RecoveryStatus = Literal["ok", "empty", "degenerate"]


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    T_factor: float = Field(default_factory=lambda: settings.T_FACTOR, gt=0.0)
    T: Optional[int] = Field(None, ge=2, description="Explicit number of sub-matrices, overrides T_factor")
    majority_window: Tuple[float, float] = (0.5, 1.0)
    seed: int = Field(0, ge=0, lt=2**64)
    p_override: Optional[float] = Field(None, gt=0.0)
    mode: SolverMode = "implicit_sparse"

    @model_validator(mode="after")
    def check_window(self):
        start, end = self.majority_window
        if not 0.0 <= start < end <= 1.0:
            raise ValueError("majority_window must satisfy 0 <= start < end <= 1")
        return self

    def resolve_T(self, n1: int) -> int:
        """T = ceil(T_factor * ln n1), 向上取偶且不小于 2"""
        if self.T is not None:
            T = self.T
        else:
            T = int(np.ceil(self.T_factor * np.log(max(n1, 2))))
        T = max(T, 2)
        return T + (T % 2)

    def window(self, iterations: int) -> Tuple[int, int]:
        """多数表决窗口对应的迭代下标区间 [lo, hi) (0 起始)"""
        start, end = self.majority_window
        lo = int(np.floor(start * iterations))
        hi = int(np.ceil(end * iterations))
        if hi <= lo:
            hi = lo + 1
        return lo, min(hi, iterations)


class RecoveryResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    signs: np.ndarray
    status: RecoveryStatus = "ok"
    overlap: Optional[float] = None
    U_trace: List[float] = Field(default_factory=list)
    V_trace: List[float] = Field(default_factory=list)
    iterations: int = 0
    edges_used: int = 0
    T: int = 0
    p_used: float = 0.0
    operations: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_json(self) -> dict:
        return {
            "signs": [int(s) for s in self.signs],
            "status": self.status,
            "overlap": self.overlap,
            "U_trace": list(self.U_trace),
            "V_trace": list(self.V_trace),
            "iterations": self.iterations,
            "edges_used": self.edges_used,
            "T": self.T,
        }


class AssignmentResult(BaseModel):
    """变量赋值及诊断: 不一致文字对数, 掷硬币决定的变量"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    assignment: np.ndarray
    inconsistencies: int = 0
    coin_flips: List[int] = Field(default_factory=list)
