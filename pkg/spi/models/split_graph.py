"""T 个子图的边划分与右侧稀疏向量"""
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np
import pandas as pd


@dataclass(frozen=True)
class SubGraph:
    """一个子图: 左端点, 右端点在支撑集中的局部下标, 支撑集 (度 >= 1 的右顶点)"""
    left: np.ndarray
    right_local: np.ndarray
    support: np.ndarray
    index: pd.Index
    row_degree: np.ndarray

    @classmethod
    def from_edges(cls, left: np.ndarray, right: np.ndarray, n1: int) -> "SubGraph":
        # factorize 基于哈希, 支撑集按首次出现顺序编号
        codes, uniques = pd.factorize(right, sort=False)
        support = np.asarray(uniques, dtype=np.int64)
        return cls(
            left=np.asarray(left, dtype=np.int64),
            right_local=codes.astype(np.int64),
            support=support,
            index=pd.Index(support),
            row_degree=np.bincount(left, minlength=n1).astype(np.float64),
        )

    @property
    def num_edges(self) -> int:
        return int(self.left.shape[0])

    @property
    def support_size(self) -> int:
        return int(self.support.shape[0])

    @property
    def right(self) -> np.ndarray:
        return self.support[self.right_local]

    def locate(self, right_ids: np.ndarray) -> np.ndarray:
        """全局右顶点编号 → 局部下标, 不在支撑集中为 -1"""
        return self.index.get_indexer(right_ids)


@dataclass(frozen=True)
class SplitGraphs:
    n1: int
    n2: int
    p: float
    subs: Tuple[SubGraph, ...]

    @property
    def T(self) -> int:
        return len(self.subs)

    @property
    def q(self) -> float:
        return self.p / self.T

    @property
    def num_edges(self) -> int:
        return sum(sub.num_edges for sub in self.subs)

    def __len__(self) -> int:
        return len(self.subs)

    def __getitem__(self, t: int) -> SubGraph:
        return self.subs[t]

    def __iter__(self) -> Iterator[SubGraph]:
        return iter(self.subs)


@dataclass(frozen=True)
class SparseVector:
    """表示 n2 维向量 y = ŷ - q·L·1, ŷ 只在 support 上有值"""
    support: np.ndarray
    values: np.ndarray
    L: float

    def offset(self, q: float) -> float:
        return q * self.L

    def norm(self, q: float, n2: int) -> float:
        shift = self.offset(q)
        inside = float(np.sum((self.values - shift) ** 2))
        outside = (n2 - self.support.shape[0]) * shift ** 2
        return float(np.sqrt(inside + outside))

    def scaled(self, factor: float) -> "SparseVector":
        return SparseVector(self.support, self.values * factor, self.L * factor)

    def dot(self, v: np.ndarray, q: float, total: Optional[float] = None) -> float:
        """与 n2 维向量 v 的内积; v 可只给出覆盖支撑集的前缀, 此时 total 为全部分量之和"""
        total = float(v.sum()) if total is None else total
        return float(v[self.support] @ self.values - self.offset(q) * total)

    def dense(self, q: float, n2: int) -> np.ndarray:
        """物化为稠密向量 (仅用于对照测试)"""
        full = np.full(n2, -self.offset(q))
        full[self.support] = self.values - self.offset(q)
        return full
