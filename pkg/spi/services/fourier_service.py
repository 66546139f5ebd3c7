import logging
from itertools import combinations
from typing import List, Literal, Sequence, Tuple, Union

import numpy as np

from ..config import settings
from ..exceptions import InvalidParameterError
from ..presets import patterns
from ..schemas.csp import PlantingDistribution
from ..schemas.fourier import FourierReport

logger = logging.getLogger(__name__)

Method = Literal["auto", "direct", "fast"]
Source = Union[PlantingDistribution, Sequence[int], np.ndarray]


def _characters(k: int) -> np.ndarray:
    """χ_S(z) 矩阵, 行为子集掩码, 列为表索引"""
    z = patterns(k).astype(np.float64)
    members = ((np.arange(2 ** k)[:, None] >> np.arange(k)) & 1).astype(bool)
    return np.where(members[:, None, :], z[None, :, :], 1.0).prod(axis=2)


def _fwht(values: np.ndarray) -> np.ndarray:
    """自然顺序的快速 Walsh-Hadamard 变换 (蝶形)"""
    out = np.array(values, dtype=np.float64)
    h = 1
    while h < out.size:
        view = out.reshape(-1, 2, h)
        upper = view[:, 0, :].copy()
        lower = view[:, 1, :]
        view[:, 0, :] = upper + lower
        view[:, 1, :] = upper - lower
        h *= 2
    return out


def _mask(S: Tuple[int, ...]) -> int:
    return sum(1 << i for i in S)


def _table(source: Source) -> Tuple[int, np.ndarray, bool]:
    """(k, 取值表, 是否为 ±1 谓词)"""
    if isinstance(source, PlantingDistribution):
        return source.k, source.normalized(), False
    table = np.asarray(source, dtype=np.float64).reshape(-1)
    k = int(round(np.log2(table.size))) if table.size else 0
    if k < 1 or table.size != 2 ** k:
        raise InvalidParameterError("predicate table length must be a power of two")
    if not np.all(np.abs(table) == 1.0):
        raise InvalidParameterError("predicate values must be +1 or -1")
    return k, table, True


class FourierService:
    @staticmethod
    def transform(source: Source, method: Method = "auto") -> np.ndarray:
        """全部系数 f̂(S) = 2^-k Σ f(z)χ_S(z), 下标为子集掩码"""
        k, table, _ = _table(source)
        if method == "auto":
            method = "direct" if k <= settings.DIRECT_TRANSFORM_MAX_K else "fast"
        if method == "direct":
            coefficients = _characters(k) @ table
        elif method == "fast":
            # χ_S(x) = H[S, ~x], 反转表后即为标准 Hadamard 变换
            coefficients = _fwht(table[::-1])
        else:
            raise InvalidParameterError(f"unknown transform method: {method}")
        return coefficients / 2 ** k

    @staticmethod
    def fourier_coefficient(Q: Source, S: Sequence[int]) -> float:
        k, table, _ = _table(Q)
        S = tuple(int(i) for i in S)
        if any(i < 0 or i >= k for i in S):
            raise InvalidParameterError(f"subset {S} has an index outside [0, {k})")
        if len(set(S)) != len(S):
            raise InvalidParameterError(f"subset {S} repeats an index")
        z = patterns(k).astype(np.float64)
        chi = z[:, list(S)].prod(axis=1) if S else np.ones(2 ** k)
        return float(table @ chi / 2 ** k)

    @staticmethod
    def candidate_witnesses(source: Source) -> List[FourierReport]:
        """所有最小阶的非零系数子集, 按字典序 (try-all 模式)"""
        k, _, is_predicate = _table(source)
        coefficients = FourierService.transform(source)
        tolerance = settings.FOURIER_TOLERANCE
        for size in range(1, k + 1):
            found = [S for S in combinations(range(k), size) if abs(coefficients[_mask(S)]) > tolerance]
            if found:
                return [_report(k, S, float(coefficients[_mask(S)]), is_predicate) for S in found]
        return []

    @staticmethod
    def distribution_complexity(Q: PlantingDistribution) -> FourierReport:
        candidates = FourierService.candidate_witnesses(Q)
        if not candidates:
            logger.info(f"Planting distribution with k={Q.k} is uniform, complexity is infinite")
            return FourierReport(k=Q.k)
        report = candidates[0]
        logger.info(f"Complexity r={report.r} S={report.S} coefficient={report.coefficient:.6g} delta={report.delta:.6g}")
        return report

    @staticmethod
    def predicate_lowest_degree(predicate: Sequence[int]) -> FourierReport:
        k, table, _ = _table(predicate)
        candidates = FourierService.candidate_witnesses(predicate)
        if not candidates:
            logger.warning(f"Predicate with k={k} is constant, it carries no information")
            return FourierReport(k=k, r=0, coefficient=float(table.mean()), delta=1.0)
        report = candidates[0]
        logger.info(f"Lowest degree r={report.r} S={report.S} coefficient={report.coefficient:.6g}")
        return report


def _report(k: int, S: Tuple[int, ...], coefficient: float, is_predicate: bool) -> FourierReport:
    # 谓词: 折叠后的偏置为 1 + |P̂(S)|; 分布: δ = 1 + 2^k Q̂(S)
    delta = 1.0 + abs(coefficient) if is_predicate else 1.0 + 2 ** k * coefficient
    sign = 1 if coefficient > 0 else -1
    return FourierReport(k=k, r=len(S), S=S, coefficient=coefficient, delta=delta, correlation_sign=sign)
