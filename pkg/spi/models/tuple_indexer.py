"""右顶点 (r-1 文字元组) 的惰性编号"""
from math import comb
from typing import Tuple

import numpy as np
import pandas as pd

from ..exceptions import InvalidParameterError

KEY_LIMIT = 2 ** 62


class TupleIndexer:
    """把排好序的文字编码元组映射到从 0 开始的连续下标

    编码键为 Σ code_i · base^i (code 升序), 只有实际出现的元组才分配下标。
    base 为文字编码的个数; codes_per_variable 为每个变量占用的编码数
    (文字编码为 2, 只按变量编码为 1)。
    """

    def __init__(self, base: int, width: int, codes_per_variable: int = 2):
        if width < 1:
            raise InvalidParameterError("tuple width must be at least 1")
        if base ** width >= KEY_LIMIT:
            raise InvalidParameterError(f"{width}-tuples over {base} codes do not fit a 64-bit key")
        self.base = int(base)
        self.width = int(width)
        self.codes_per_variable = int(codes_per_variable)
        self._keys = np.empty(0, dtype=np.int64)
        self._index = pd.Index(self._keys)
        self._powers = np.power(np.int64(self.base), np.arange(self.width, dtype=np.int64))

    @property
    def n2_nominal(self) -> int:
        return comb(self.base, self.width)

    @property
    def keys(self) -> np.ndarray:
        return self._keys

    def __len__(self) -> int:
        return int(self._keys.shape[0])

    def encode(self, tuples: np.ndarray) -> np.ndarray:
        tuples = np.sort(np.asarray(tuples, dtype=np.int64).reshape(-1, self.width), axis=1)
        if tuples.size:
            if tuples.min() < 0 or tuples.max() >= self.base:
                raise InvalidParameterError(f"literal code out of range for base {self.base}")
            variables = tuples // self.codes_per_variable
            if np.any(variables[:, 1:] == variables[:, :-1]):
                raise InvalidParameterError("a tuple holds two literals of the same variable")
        return tuples @ self._powers

    def index(self, tuples: np.ndarray) -> np.ndarray:
        """返回每个元组的下标, 新元组按首次出现顺序追加"""
        keys = self.encode(tuples)
        known = len(self)
        codes, uniques = pd.factorize(np.concatenate([self._keys, keys]), sort=False)
        self._keys = np.asarray(uniques, dtype=np.int64)
        self._index = pd.Index(self._keys)
        return codes[known:].astype(np.int64)

    def lookup(self, tuples: np.ndarray) -> np.ndarray:
        """已编号元组的下标, 未出现过为 -1 (不分配新下标)"""
        return self._index.get_indexer(self.encode(tuples))

    def index_of(self, tup) -> int:
        return int(self.lookup(np.asarray(tup, dtype=np.int64))[0])

    def tuple_at(self, position: int) -> Tuple[int, ...]:
        key = int(self._keys[position])
        codes = []
        for _ in range(self.width):
            key, code = divmod(key, self.base)
            codes.append(code)
        return tuple(codes)

    def decode(self) -> np.ndarray:
        """全部已编号元组, 形状 (len, width), 每行升序"""
        keys = self._keys[:, None]
        return (keys // self._powers) % self.base
