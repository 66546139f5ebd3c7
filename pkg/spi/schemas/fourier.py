from typing import Optional, Tuple

from pydantic import BaseModel, Field

INFINITE = "inf"


class FourierReport(BaseModel):
    """分布复杂度 r, 见证集合 S (0 起始), 系数 Q̂(S) 与诱导偏置 delta

    r 为 None 表示复杂度无穷 (均匀分布); r 为 0 表示常数谓词。
    """
    model_config = {"frozen": True}

    k: int = Field(..., ge=1)
    r: Optional[int] = None
    S: Tuple[int, ...] = ()
    coefficient: float = 0.0
    delta: float = 1.0
    correlation_sign: int = 1

    @property
    def is_infinite(self) -> bool:
        return self.r is None

    @property
    def is_degenerate(self) -> bool:
        return self.r == 0

    @property
    def identifiable(self) -> bool:
        return self.r is not None and self.r >= 1

    def to_json(self) -> dict:
        if self.r is None:
            return {"r": INFINITE, "S": [], "coefficient": 0.0, "delta": 1.0}
        return {
            "r": self.r,
            "S": list(self.S),
            "coefficient": self.coefficient,
            "delta": self.delta,
        }
