from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field

from .graph import BipartiteGraph, HiddenPartition


class ReducedInstance(BaseModel):
    """约化得到的二部块模型实例

    左顶点 2v 为变量 v 的正文字, 2v+1 为负文字; 右顶点为惰性编号的 (r-1) 文字元组。
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    graph: BipartiteGraph
    indexer: Any
    r: int = Field(..., ge=2)
    delta: float
    p_equiv: float
    n2_nominal: int
    m_used: int
    truth: Optional[HiddenPartition] = None

    def sidecar(self) -> dict:
        return {
            "type": "reduction",
            "r": self.r,
            "delta": self.delta,
            "p_equiv": self.p_equiv,
            "n2_nominal": self.n2_nominal,
            "indexer_size": len(self.indexer),
            "m_used": self.m_used,
        }
