from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def pattern_index(values: np.ndarray) -> np.ndarray:
    """把 ±1 取值向量编码为表索引: 第 i 位为 1 当且仅当 z_i = +1"""
    values = np.asarray(values)
    k = values.shape[-1]
    weights = np.left_shift(np.int64(1), np.arange(k, dtype=np.int64))
    return ((values > 0).astype(np.int64) * weights).sum(axis=-1)


def _coerce_sigma(value):
    if value is None:
        return None
    sigma = np.asarray(value, dtype=np.int8).reshape(-1)
    if not np.all(np.abs(sigma) == 1):
        raise ValueError("assignment entries must be +1 or -1")
    return sigma


def _as_rows(value, dtype) -> np.ndarray:
    rows = np.asarray(value, dtype=dtype)
    if rows.size == 0:
        return np.empty((0, rows.shape[-1] if rows.ndim == 2 else 0), dtype=dtype)
    return rows.reshape(rows.shape[0], -1)


def _check_tuples(variables: np.ndarray, n: int, k: int) -> None:
    if variables.shape[0] == 0:
        return
    if variables.shape[1] != k:
        raise ValueError(f"every clause must have width k={k}")
    if variables.min() < 0 or variables.max() >= n:
        raise ValueError(f"variable index out of range for n={n}")
    ordered = np.sort(variables, axis=1)
    if np.any(ordered[:, 1:] == ordered[:, :-1]):
        raise ValueError("a clause repeats a variable")


class PlantingDistribution(BaseModel):
    """{±1}^k 上的非负权重表 (未归一化保存)"""
    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=1)
    weights: Tuple[float, ...]

    @model_validator(mode="after")
    def check_weights(self):
        if len(self.weights) != 2 ** self.k:
            raise ValueError(f"expected {2 ** self.k} weights for k={self.k}, got {len(self.weights)}")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        if sum(self.weights) <= 0:
            raise ValueError("weights must not all be zero")
        return self

    def normalized(self) -> np.ndarray:
        table = np.asarray(self.weights, dtype=np.float64)
        return table / table.sum()

    def acceptance_ratios(self) -> np.ndarray:
        table = np.asarray(self.weights, dtype=np.float64)
        return table / table.max()


class PlantedCspInstance(BaseModel):
    """n 个变量, 可选的植入赋值 sigma, m 个有序 k 子句 (变量 + 符号)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int = Field(..., ge=1)
    k: int = Field(..., ge=1)
    sigma: Optional[np.ndarray] = None
    variables: np.ndarray
    signs: np.ndarray

    @field_validator("sigma", mode="before")
    @classmethod
    def coerce_sigma(cls, value):
        return _coerce_sigma(value)

    @field_validator("variables", mode="before")
    @classmethod
    def coerce_variables(cls, value):
        return _as_rows(value, np.int64)

    @field_validator("signs", mode="before")
    @classmethod
    def coerce_signs(cls, value):
        signs = np.asarray(value, dtype=np.int8)
        if signs.size and not np.all(np.abs(signs) == 1):
            raise ValueError("literal signs must be +1 or -1")
        return _as_rows(signs, np.int8)

    @model_validator(mode="after")
    def check_clauses(self):
        if self.variables.shape != self.signs.shape:
            raise ValueError("variables and signs must have the same shape")
        _check_tuples(self.variables, self.n, self.k)
        if self.sigma is not None and self.sigma.size != self.n:
            raise ValueError(f"sigma must have length n={self.n}")
        return self

    @property
    def m(self) -> int:
        return int(self.variables.shape[0])

    @property
    def clauses(self) -> List[Tuple[Tuple[int, int], ...]]:
        return [
            tuple((int(v), int(s)) for v, s in zip(row_vars, row_signs))
            for row_vars, row_signs in zip(self.variables, self.signs)
        ]

    def literal_values(self, sigma: Optional[np.ndarray] = None) -> np.ndarray:
        """子句中每个文字在 sigma 下的取值 sigma(C)"""
        sigma = self.sigma if sigma is None else sigma
        if sigma is None:
            raise ValueError("instance carries no planted assignment")
        return (self.signs * sigma[self.variables]).astype(np.int8)


class GoldreichInstance(BaseModel):
    """谓词 P 与 m 个约束 (不重复的变量元组, 观测值)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int = Field(..., ge=1)
    k: int = Field(..., ge=1)
    predicate: Tuple[int, ...]
    sigma: Optional[np.ndarray] = None
    variables: np.ndarray
    values: np.ndarray

    @field_validator("sigma", mode="before")
    @classmethod
    def coerce_sigma(cls, value):
        return _coerce_sigma(value)

    @field_validator("variables", mode="before")
    @classmethod
    def coerce_variables(cls, value):
        return _as_rows(value, np.int64)

    @field_validator("values", mode="before")
    @classmethod
    def coerce_values(cls, value):
        values = np.asarray(value, dtype=np.int8).reshape(-1)
        if values.size and not np.all(np.abs(values) == 1):
            raise ValueError("observed values must be +1 or -1")
        return values

    @model_validator(mode="after")
    def check_constraints(self):
        if len(self.predicate) != 2 ** self.k:
            raise ValueError(f"predicate table must have {2 ** self.k} entries")
        if any(abs(value) != 1 for value in self.predicate):
            raise ValueError("predicate values must be +1 or -1")
        if self.variables.shape[0] != self.values.shape[0]:
            raise ValueError("one observed value per constraint")
        _check_tuples(self.variables, self.n, self.k)
        if self.sigma is not None:
            if self.sigma.size != self.n:
                raise ValueError(f"sigma must have length n={self.n}")
            if self.m and not np.array_equal(self.evaluate(self.sigma), self.values):
                raise ValueError("observed values disagree with the predicate on sigma")
        return self

    @property
    def m(self) -> int:
        return int(self.variables.shape[0])

    def evaluate(self, sigma: np.ndarray) -> np.ndarray:
        table = np.asarray(self.predicate, dtype=np.int8)
        return table[pattern_index(sigma[self.variables])]
