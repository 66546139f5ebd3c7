import logging
from typing import Optional, Tuple

import numpy as np

from ..exceptions import InvalidParameterError
from ..schemas.csp import GoldreichInstance, PlantedCspInstance, PlantingDistribution, pattern_index
from ..schemas.graph import BipartiteGraph, BlockModelParams, HiddenPartition
from ..seeding import ASSIGNMENT, CLAUSES, EDGES, PARTITION, stream_rng

logger = logging.getLogger(__name__)


def _balanced_signs(rng: np.random.Generator, size: int) -> np.ndarray:
    signs = np.ones(size, dtype=np.int8)
    signs[rng.permutation(size)[: size // 2]] = -1
    return signs


def _block_pairs(rng: np.random.Generator, rows: np.ndarray, cols: np.ndarray, prob: float) -> np.ndarray:
    """在 rows × cols 中以概率 prob 独立取边, 几何跳跃采样"""
    total = rows.size * cols.size
    if prob <= 0.0 or total == 0:
        return np.empty((0, 2), dtype=np.int64)
    if prob >= 1.0:
        positions = np.arange(total, dtype=np.int64)
    else:
        chunks = []
        last = -1
        expected = total * prob
        while last < total:
            size = int(expected + 5.0 * np.sqrt(expected) + 16)
            steps = last + np.cumsum(rng.geometric(prob, size=size))
            chunks.append(steps)
            last = int(steps[-1])
        positions = np.concatenate(chunks)
        positions = positions[positions < total]
    return np.column_stack([rows[positions // cols.size], cols[positions % cols.size]]).astype(np.int64)


def _distinct_tuples(rng: np.random.Generator, n: int, k: int, size: int) -> np.ndarray:
    """size 个均匀有序的 k 元组, 元组内变量互不相同 (拒绝有重复的行)"""
    rows = []
    have = 0
    while have < size:
        draw = rng.integers(0, n, size=(max(2 * (size - have), 64), k), dtype=np.int64)
        ordered = np.sort(draw, axis=1)
        keep = draw[~np.any(ordered[:, 1:] == ordered[:, :-1], axis=1)]
        rows.append(keep)
        have += keep.shape[0]
    return np.concatenate(rows)[:size] if rows else np.empty((0, k), dtype=np.int64)


def _planted_sigma(seed: int, n: int, sigma) -> np.ndarray:
    if sigma is not None:
        sigma = np.asarray(sigma, dtype=np.int8)
        if sigma.shape != (n,):
            raise InvalidParameterError(f"sigma must have length n={n}")
        return sigma
    rng = stream_rng(seed, ASSIGNMENT)
    return (2 * rng.integers(0, 2, size=n) - 1).astype(np.int8)


class InstanceService:
    @staticmethod
    def sample_bipartite_block(
        params: BlockModelParams, partition: Optional[HiddenPartition] = None
    ) -> Tuple[BipartiteGraph, HiddenPartition]:
        """二部随机块模型: 同侧概率 δp, 跨侧概率 (2-δ)p"""
        n1, n2 = params.n1, params.n2
        if partition is None:
            if n1 % 2 or n2 % 2:
                raise InvalidParameterError("n1 and n2 must be even when no partition is supplied")
            rng = stream_rng(params.seed, PARTITION)
            partition = HiddenPartition(u=_balanced_signs(rng, n1), v=_balanced_signs(rng, n2))
        elif partition.u.size != n1 or partition.v.size != n2:
            raise InvalidParameterError("partition lengths must match n1 and n2")

        rng = stream_rng(params.seed, EDGES)
        a1, b1 = np.flatnonzero(partition.u > 0), np.flatnonzero(partition.u < 0)
        a2, b2 = np.flatnonzero(partition.v > 0), np.flatnonzero(partition.v < 0)
        same, cross = params.same_side_probability, params.cross_probability
        blocks = [
            _block_pairs(rng, a1, a2, same),
            _block_pairs(rng, b1, b2, same),
            _block_pairs(rng, a1, b2, cross),
            _block_pairs(rng, b1, a2, cross),
        ]
        edges = np.concatenate(blocks)
        edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
        graph = BipartiteGraph(n1=n1, n2=n2, edges=edges)
        logger.info(f"Sampled block model n1={n1} n2={n2} delta={params.delta} p={params.p}: {graph.num_edges} edges")
        return graph, partition

    @staticmethod
    def sample_planted_csp(
        Q: PlantingDistribution, n: int, m: int, seed: int = 0, sigma=None
    ) -> PlantedCspInstance:
        """拒绝采样: 均匀的 (元组, 符号) 提议, 以 Q(σ(C))/max Q 的概率接受"""
        k = Q.k
        if n < k:
            raise InvalidParameterError(f"need n >= k, got n={n}, k={k}")
        if m < 0:
            raise InvalidParameterError("m must be non-negative")
        sigma = _planted_sigma(seed, n, sigma)
        ratios = Q.acceptance_ratios()
        rng = stream_rng(seed, CLAUSES)

        accepted_vars, accepted_signs = [], []
        have = 0
        rate = max(float(ratios.mean()), 1e-6)
        while have < m:
            batch = int((m - have) / rate * 1.2) + 64
            variables = _distinct_tuples(rng, n, k, batch)
            signs = (2 * rng.integers(0, 2, size=(batch, k)) - 1).astype(np.int8)
            values = signs * sigma[variables]
            keep = rng.random(batch) < ratios[pattern_index(values)]
            accepted_vars.append(variables[keep])
            accepted_signs.append(signs[keep])
            have += int(keep.sum())

        variables = np.concatenate(accepted_vars)[:m] if accepted_vars else np.empty((0, k), dtype=np.int64)
        signs = np.concatenate(accepted_signs)[:m] if accepted_signs else np.empty((0, k), dtype=np.int8)
        instance = PlantedCspInstance(n=n, k=k, sigma=sigma, variables=variables, signs=signs)
        logger.info(f"Sampled planted CSP n={n} k={k} m={m}")
        return instance

    @staticmethod
    def sample_goldreich(predicate, n: int, m: int, seed: int = 0, sigma=None) -> GoldreichInstance:
        table = tuple(int(v) for v in predicate)
        k = int(np.log2(len(table))) if table else 0
        if len(table) != 2 ** k or k < 1:
            raise InvalidParameterError("predicate table length must be a power of two")
        if n < k:
            raise InvalidParameterError(f"need n >= k, got n={n}, k={k}")
        sigma = _planted_sigma(seed, n, sigma)
        variables = _distinct_tuples(stream_rng(seed, CLAUSES), n, k, m)
        values = np.asarray(table, dtype=np.int8)[pattern_index(sigma[variables])]
        instance = GoldreichInstance(n=n, k=k, predicate=table, sigma=sigma, variables=variables, values=values)
        logger.info(f"Sampled Goldreich instance n={n} k={k} m={m}")
        return instance

    @staticmethod
    def overlap(signs, truth) -> float:
        """|signs·truth| / n, 与全局符号无关"""
        signs = np.asarray(signs, dtype=np.float64).reshape(-1)
        truth = np.asarray(truth, dtype=np.float64).reshape(-1)
        if signs.shape != truth.shape:
            raise InvalidParameterError(f"length mismatch: {signs.size} vs {truth.size}")
        if signs.size == 0:
            raise InvalidParameterError("overlap of empty vectors")
        return float(abs(signs @ truth) / signs.size)

    @staticmethod
    def block_params_from_sbm(a: float, b: float, n: int, seed: int = 0) -> BlockModelParams:
        """经典两社区模型 (组内 a/n, 组间 b/n) 换算为 δ, p"""
        if a + b <= 0:
            raise InvalidParameterError("a + b must be positive")
        return BlockModelParams(n1=n, n2=n, delta=2.0 * a / (a + b), p=(a + b) / (2.0 * n), seed=seed)

    @staticmethod
    def threshold_density(n1: int, n2: int, delta: float, multiplier: float = 1.0) -> float:
        """p = C·ln(n1) / ((δ-1)²·√(n1·n2))"""
        if delta == 1.0:
            raise InvalidParameterError("delta = 1 carries no planted signal")
        return multiplier * np.log(n1) / ((delta - 1.0) ** 2 * np.sqrt(n1 * n2))
