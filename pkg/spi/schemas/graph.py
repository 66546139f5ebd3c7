from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class BipartiteGraph(BaseModel):
    """V1 与 V2 之间的稀疏边表 (0 起始, 无重复边)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n1: int = Field(..., ge=1)
    n2: int = Field(..., ge=1)
    edges: np.ndarray

    @field_validator("edges", mode="before")
    @classmethod
    def coerce_edges(cls, value):
        edges = np.asarray(value, dtype=np.int64)
        if edges.size == 0:
            return np.empty((0, 2), dtype=np.int64)
        if edges.ndim != 2 or edges.shape[1] != 2:
            raise ValueError("edges must be an (m, 2) array of (left, right) pairs")
        return edges

    @model_validator(mode="after")
    def check_edges(self):
        edges = self.edges
        if edges.shape[0] == 0:
            return self
        if edges.min() < 0:
            raise ValueError("edge endpoints must be non-negative")
        if edges[:, 0].max() >= self.n1:
            raise ValueError(f"left endpoint out of range for n1={self.n1}")
        if edges[:, 1].max() >= self.n2:
            raise ValueError(f"right endpoint out of range for n2={self.n2}")
        keys = edges[:, 0] * np.int64(self.n2) + edges[:, 1]
        if np.unique(keys).size != keys.size:
            raise ValueError("edge list contains duplicates")
        return self

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def left(self) -> np.ndarray:
        return self.edges[:, 0]

    @property
    def right(self) -> np.ndarray:
        return self.edges[:, 1]

    def density(self, n2_nominal: Optional[int] = None) -> float:
        """边密度估计 m/(n1*n2)"""
        n2 = n2_nominal if n2_nominal is not None else self.n2
        return self.num_edges / (self.n1 * n2)


class HiddenPartition(BaseModel):
    """真实标签 u (长度 n1) 与 v (长度 n2), 取值 ±1

    约化得到的图只给出已编号的右顶点的 v (前 len(v) 个);
    此时 v_total 为全部 n2 个右顶点标签之和。
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    u: np.ndarray
    v: np.ndarray
    v_total: Optional[float] = None

    def right_total(self) -> float:
        return float(self.v.sum()) if self.v_total is None else float(self.v_total)

    @field_validator("u", "v", mode="before")
    @classmethod
    def coerce_signs(cls, value):
        signs = np.asarray(value, dtype=np.int8).reshape(-1)
        if not np.all(np.abs(signs) == 1):
            raise ValueError("partition labels must be +1 or -1")
        return signs


class BlockModelParams(BaseModel):
    n1: int = Field(..., ge=1)
    n2: int = Field(..., ge=1)
    delta: float = Field(..., ge=0.0, le=2.0)
    p: float = Field(..., ge=0.0)
    seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("delta")
    @classmethod
    def delta_not_one(cls, value: float) -> float:
        if value == 1.0:
            raise ValueError("delta = 1 carries no planted signal")
        return value

    @model_validator(mode="after")
    def check_probabilities(self):
        if self.delta * self.p > 1.0:
            raise ValueError(f"delta*p = {self.delta * self.p} exceeds 1")
        if (2.0 - self.delta) * self.p > 1.0:
            raise ValueError(f"(2-delta)*p = {(2.0 - self.delta) * self.p} exceeds 1")
        return self

    @property
    def same_side_probability(self) -> float:
        return self.delta * self.p

    @property
    def cross_probability(self) -> float:
        return (2.0 - self.delta) * self.p
