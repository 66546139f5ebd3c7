import logging
from math import comb
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config import settings
from ..exceptions import InvalidParameterError, UnidentifiableError
from ..models.tuple_indexer import TupleIndexer
from ..presets import patterns
from ..schemas.csp import GoldreichInstance, PlantedCspInstance
from ..schemas.fourier import FourierReport
from ..schemas.graph import BipartiteGraph, HiddenPartition
from ..schemas.pipeline import GoldreichMode, Restriction, Thinning
from ..schemas.reduction import ReducedInstance
from ..schemas.solver import AssignmentResult
from ..seeding import FOLD, RESTRICTION, THINNING, TIES, stream_rng

logger = logging.getLogger(__name__)


def _literal_codes(variables: np.ndarray, signs: np.ndarray) -> np.ndarray:
    """文字编码 2·var + (sign < 0)"""
    return 2 * variables.astype(np.int64) + (signs < 0)


def _code_values(codes: np.ndarray, sigma: np.ndarray, codes_per_variable: int) -> np.ndarray:
    """编码在 sigma 下的取值"""
    if codes_per_variable == 1:
        return sigma[codes].astype(np.int8)
    return (sigma[codes // 2] * (1 - 2 * (codes % 2))).astype(np.int8)


def _label_total(sigma: np.ndarray, indexer: TupleIndexer) -> float:
    """全部名义元组的标签和 -e_w(各编码取值), e_w 为 (1+t)^a (1-t)^b 中 t^w 的系数"""
    if indexer.codes_per_variable == 1:
        a = int(np.sum(sigma > 0))
    else:
        a = int(sigma.size)
    b = indexer.base - a
    w = indexer.width
    e_w = sum((-1) ** i * comb(a, w - i) * comb(b, i) for i in range(w + 1))
    return -float(e_w)


def _check_report(report: FourierReport) -> None:
    if report.r is None:
        raise UnidentifiableError("planting distribution is uniform, no witness set exists")
    if report.r == 0:
        raise UnidentifiableError("constant predicate carries no information")
    if report.r == 1:
        raise InvalidParameterError("r = 1 instances are solved by majority vote, not reduced to a graph")


def _thinned_count(m: int, thinning: Thinning, epsilon: float, seed: int) -> int:
    if thinning == "dedup":
        return m
    if thinning == "poisson":
        z = int(stream_rng(seed, THINNING).poisson((1.0 - epsilon) * m))
        return min(z, m)
    raise InvalidParameterError(f"unknown thinning mode: {thinning}")


def _split_left(columns: np.ndarray, restriction: Restriction, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """选出放在 V1 一侧的位置, 返回 (该列, 其余列)"""
    m, r = columns.shape
    if restriction == "first":
        return np.zeros(m, dtype=np.int64), columns[:, 1:]
    if restriction == "random":
        position = stream_rng(seed, RESTRICTION).integers(0, r, size=m)
        rest = np.ones((m, r), dtype=bool)
        rest[np.arange(m), position] = False
        return position, columns[rest].reshape(m, r - 1)
    raise InvalidParameterError(f"unknown restriction mode: {restriction}")


def _spread_signs(rng: np.random.Generator, product: np.ndarray, r: int) -> np.ndarray:
    """均匀的 ±1 符号, 每行乘积固定为 product"""
    signs = (2 * rng.integers(0, 2, size=(product.size, r)) - 1).astype(np.int8)
    signs[:, -1] = product * signs[:, :-1].prod(axis=1)
    return signs


def _assemble(
    n: int,
    left_codes: np.ndarray,
    rest_codes: np.ndarray,
    indexer: TupleIndexer,
    r: int,
    delta: float,
    sigma: Optional[np.ndarray],
    m_used: int,
) -> ReducedInstance:
    right = indexer.index(rest_codes)
    n1, n2 = 2 * n, indexer.n2_nominal
    edges = np.column_stack([left_codes, right]).astype(np.int64)
    keys = edges[:, 0] * np.int64(max(len(indexer), 1)) + edges[:, 1]
    edges = edges[~pd.Index(keys).duplicated(keep="first")]
    graph = BipartiteGraph(n1=n1, n2=n2, edges=edges)
    truth = ReductionService.truth_for(sigma, indexer) if sigma is not None else None
    p_equiv = m_used / (2.0 * n1 * n2)
    logger.info(
        f"Reduced {m_used} constraints to {graph.num_edges} edges, "
        f"{len(indexer)} of {n2} tuple vertices materialized, delta={delta:.6g}"
    )
    return ReducedInstance(
        graph=graph, indexer=indexer, r=r, delta=delta, p_equiv=p_equiv,
        n2_nominal=n2, m_used=m_used, truth=truth,
    )


class ReductionService:
    @staticmethod
    def restrict_clause(clause: Sequence[Tuple[int, int]], S: Sequence[int]) -> Tuple[Tuple[int, int], ...]:
        """按 S 中的位置取出文字, 保持顺序"""
        if any(i < 0 or i >= len(clause) for i in S):
            raise InvalidParameterError(f"subset {tuple(S)} does not fit a clause of width {len(clause)}")
        return tuple(tuple(clause[i]) for i in S)

    @staticmethod
    def truth_for(sigma: np.ndarray, indexer: TupleIndexer) -> HiddenPartition:
        """u: 文字为假时 +1; v: 元组取值之积为 -1 时 +1"""
        sigma = np.asarray(sigma, dtype=np.int8)
        u = np.empty(2 * sigma.size, dtype=np.int8)
        u[0::2] = -sigma
        u[1::2] = sigma
        total = _label_total(sigma, indexer)
        if len(indexer) == 0:
            return HiddenPartition(u=u, v=np.empty(0, dtype=np.int8), v_total=total)
        values = _code_values(indexer.decode(), sigma, indexer.codes_per_variable)
        v = -values.prod(axis=1)
        return HiddenPartition(u=u, v=v, v_total=total)

    @staticmethod
    def csp_to_bipartite(
        instance: PlantedCspInstance,
        report: FourierReport,
        thinning: Thinning = "dedup",
        *,
        epsilon: Optional[float] = None,
        restriction: Restriction = "first",
        seed: int = 0,
    ) -> ReducedInstance:
        _check_report(report)
        if instance.m == 0:
            raise InvalidParameterError("cannot reduce an empty instance")
        epsilon = settings.THINNING_EPSILON if epsilon is None else epsilon
        S = list(report.S)
        kept = _thinned_count(instance.m, thinning, epsilon, seed)
        codes = _literal_codes(instance.variables[:kept, S], instance.signs[:kept, S])
        position, rest = _split_left(codes, restriction, seed)
        left = codes[np.arange(kept), position]
        indexer = TupleIndexer(base=2 * instance.n, width=report.r - 1, codes_per_variable=2)
        return _assemble(instance.n, left, rest, indexer, report.r, report.delta, instance.sigma, kept)

    @staticmethod
    def goldreich_to_bipartite(
        instance: GoldreichInstance,
        report: FourierReport,
        thinning: Thinning = "dedup",
        *,
        mode: GoldreichMode = "fold-first",
        epsilon: Optional[float] = None,
        restriction: Restriction = "first",
        seed: int = 0,
    ) -> ReducedInstance:
        """把约束折叠成带噪 r-XOR: 文字取值之积等于 value·sign(P̂(S))·χ_S"""
        _check_report(report)
        if instance.m == 0:
            raise InvalidParameterError("cannot reduce an empty instance")
        epsilon = settings.THINNING_EPSILON if epsilon is None else epsilon
        S = list(report.S)
        r = report.r
        variables = instance.variables[:, S]
        folded = (instance.values * report.correlation_sign).astype(np.int8)
        delta = report.delta

        if mode == "discard":
            keep = folded > 0
            variables, folded = variables[keep], folded[keep]
            delta = _discard_delta(instance.predicate, instance.k, S, report.correlation_sign)
            if variables.shape[0] == 0:
                raise InvalidParameterError("no constraint survives discard mode")

        kept = _thinned_count(variables.shape[0], thinning, epsilon, seed)
        variables, folded = variables[:kept], folded[:kept]

        if mode == "fold-first":
            position, rest = _split_left(variables, restriction, seed)
            rows = np.arange(kept)
            left = _literal_codes(variables[rows, position], folded)
            indexer = TupleIndexer(base=instance.n, width=r - 1, codes_per_variable=1)
        elif mode in ("fold-spread", "discard"):
            signs = _spread_signs(stream_rng(seed, FOLD), folded, r)
            codes = _literal_codes(variables, signs)
            position, rest = _split_left(codes, restriction, seed)
            left = codes[np.arange(kept), position]
            indexer = TupleIndexer(base=2 * instance.n, width=r - 1, codes_per_variable=2)
        else:
            raise InvalidParameterError(f"unknown Goldreich mode: {mode}")
        return _assemble(instance.n, left, rest, indexer, r, delta, instance.sigma, kept)

    @staticmethod
    def partition_to_assignment(result, seed: int = 0) -> AssignmentResult:
        """score = result[2v] - result[2v+1], 取符号; 得分为 0 时掷硬币"""
        result = np.asarray(result, dtype=np.int64).reshape(-1)
        if result.size % 2:
            raise InvalidParameterError("literal vector must have even length")
        score = result[0::2] - result[1::2]
        coins = 2 * stream_rng(seed, TIES).integers(0, 2, size=score.size) - 1
        assignment = np.where(score > 0, 1, np.where(score < 0, -1, coins)).astype(np.int8)
        inconsistent = int(np.sum(result[0::2] == result[1::2]))
        flips = np.flatnonzero(score == 0).tolist()
        if inconsistent:
            logger.warning(f"{inconsistent} of {score.size} literal pairs are inconsistent")
        return AssignmentResult(assignment=assignment, inconsistencies=inconsistent, coin_flips=flips)


def _discard_delta(predicate: Sequence[int], k: int, S: Sequence[int], sign: int) -> float:
    """在 P = sign 的输入中, χ_S = +1 的比例乘 2"""
    table = np.asarray(predicate)
    chi = patterns(k)[:, list(S)].prod(axis=1)
    chosen = chi[table == sign]
    delta = 2.0 * float(np.mean(chosen > 0))
    if delta == 1.0:
        raise UnidentifiableError("kept constraints carry no parity bias")
    return delta
