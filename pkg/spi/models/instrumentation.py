"""求解器的计数与分配审计钩子 (可选, 默认不启用)"""
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

logger = logging.getLogger(__name__)


@dataclass
class OperationCounter:
    """统计边访问次数 (边数 + 右支撑大小) 与稠密向量操作"""
    edge_touches: int = 0
    vector_ops: int = 0

    def touch(self, edges: int, support: int = 0) -> None:
        self.edge_touches += int(edges) + int(support)

    def vector(self, length: int) -> None:
        self.vector_ops += int(length)

    @property
    def total(self) -> int:
        return self.edge_touches + self.vector_ops

    def reset(self) -> None:
        self.edge_touches = 0
        self.vector_ops = 0


@dataclass
class AllocationAudit:
    """记录求解器分配的每个数组: (侧, 长度)

    side 取 "left" (按 V1 索引), "right" (按 V2 索引) 或 "edge"。
    """
    records: List[Tuple[str, int]] = field(default_factory=list)

    def record(self, side: str, length: int) -> None:
        self.records.append((side, int(length)))

    def largest(self, side: str) -> int:
        return max((length for s, length in self.records if s == side), default=0)

    def allocated_dense(self, side: str, length: int) -> bool:
        """是否出现过该侧长度不小于 length 的数组"""
        hit = self.largest(side) >= length
        if hit:
            logger.warning(f"dense {side} allocation of length >= {length} recorded")
        return hit
