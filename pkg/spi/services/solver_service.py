import logging
from typing import List, Optional, Sequence

import numpy as np
from scipy import sparse

from ..config import settings
from ..exceptions import InvalidParameterError
from ..models.instrumentation import AllocationAudit, OperationCounter
from ..models.split_graph import SparseVector, SplitGraphs, SubGraph
from ..schemas.csp import PlantedCspInstance
from ..schemas.graph import BipartiteGraph, HiddenPartition
from ..schemas.solver import AssignmentResult, RecoveryResult, SolverConfig
from ..seeding import INIT, SPLIT, TIES, stream_rng
from .instance_service import InstanceService

logger = logging.getLogger(__name__)


def _sign(x: np.ndarray) -> np.ndarray:
    # sgn(0) = +1
    return np.where(x >= 0, 1, -1).astype(np.int8)


def _initial_vector(n1: int, seed: int, initial) -> np.ndarray:
    if initial is None:
        x = (2 * stream_rng(seed, INIT).integers(0, 2, size=n1) - 1).astype(np.float64)
    else:
        x = np.asarray(initial, dtype=np.float64).reshape(-1)
        if x.size != n1:
            raise InvalidParameterError(f"initial vector must have length n1={n1}")
    norm = np.linalg.norm(x)
    if norm < settings.NORM_TOLERANCE:
        raise InvalidParameterError("initial vector is zero")
    return x / norm


class _ImplicitBackend:
    """y 以 (ŷ, L) 表示, 从不分配长度为 n2 的数组"""

    def __init__(self, split: SplitGraphs, counter=None, audit=None):
        self.split = split
        self.counter = counter
        self.audit = audit

    def forward(self, t: int, x: np.ndarray) -> SparseVector:
        return SolverService.apply_mt(self.split[t], x, counter=self.counter, audit=self.audit)

    def backward(self, t: int, y: SparseVector) -> np.ndarray:
        return SolverService.apply_m(
            self.split[t], y, self.split.q, self.split.n2, counter=self.counter, audit=self.audit
        )

    def norm(self, y: SparseVector) -> float:
        return y.norm(self.split.q, self.split.n2)

    def scale(self, y: SparseVector, factor: float) -> SparseVector:
        return y.scaled(factor)

    def dot(self, y: SparseVector, truth: HiddenPartition) -> float:
        return y.dot(truth.v, self.split.q, truth.right_total())


class _DenseBackend:
    """物化 M_t = A_t - qJ 的对照实现"""

    def __init__(self, split: SplitGraphs, audit=None):
        if split.n2 > settings.DENSE_REFERENCE_MAX_N2:
            raise InvalidParameterError(
                f"dense_reference mode supports n2 <= {settings.DENSE_REFERENCE_MAX_N2}, got {split.n2}"
            )
        self.split = split
        self.audit = audit
        self._cache = {}

    def matrix(self, t: int) -> np.ndarray:
        if t not in self._cache:
            sub = self.split[t]
            ones = np.ones(sub.num_edges)
            adjacency = sparse.coo_matrix((ones, (sub.left, sub.right)), shape=(self.split.n1, self.split.n2))
            self._cache[t] = adjacency.toarray() - self.split.q
            if self.audit is not None:
                self.audit.record("right", self.split.n2)
        return self._cache[t]

    def forward(self, t: int, x: np.ndarray) -> np.ndarray:
        return self.matrix(t).T @ x

    def backward(self, t: int, y: np.ndarray) -> np.ndarray:
        return self.matrix(t) @ y

    def norm(self, y: np.ndarray) -> float:
        return float(np.linalg.norm(y))

    def scale(self, y: np.ndarray, factor: float) -> np.ndarray:
        return y * factor

    def dot(self, y: np.ndarray, truth: HiddenPartition) -> float:
        v = truth.v
        seen = float(v @ y[:v.size])
        if v.size == y.size:
            return seen
        # 未编号的右顶点没有边, y 在这些分量上取同一个值
        return seen + float(y[-1]) * (truth.right_total() - float(v.sum()))


class SolverService:
    @staticmethod
    def split_edges(graph: BipartiteGraph, T: int, seed: int = 0, p: Optional[float] = None) -> SplitGraphs:
        """每条边独立均匀地分到 T 个子图之一"""
        if T < 2:
            raise InvalidParameterError(f"T must be at least 2, got {T}")
        p = graph.density() if p is None else p
        bucket = stream_rng(seed, SPLIT).integers(0, T, size=graph.num_edges)
        order = np.argsort(bucket, kind="stable")
        bounds = np.concatenate([[0], np.cumsum(np.bincount(bucket, minlength=T))])
        left, right = graph.left[order], graph.right[order]
        subs = tuple(
            SubGraph.from_edges(left[bounds[t]:bounds[t + 1]], right[bounds[t]:bounds[t + 1]], graph.n1)
            for t in range(T)
        )
        return SplitGraphs(n1=graph.n1, n2=graph.n2, p=p, subs=subs)

    @staticmethod
    def apply_mt(
        sub: SubGraph,
        x: np.ndarray,
        *,
        counter: Optional[OperationCounter] = None,
        audit: Optional[AllocationAudit] = None,
    ) -> SparseVector:
        """Mᵀx = ŷ - qL·1: ŷ 只在支撑集上取值, L = Σx"""
        values = np.bincount(sub.right_local, weights=x[sub.left], minlength=sub.support_size)
        if counter is not None:
            counter.touch(sub.num_edges)
            counter.vector(x.size)
        if audit is not None:
            audit.record("right", values.size)
            audit.record("edge", sub.num_edges)
        return SparseVector(support=sub.support, values=values, L=float(x.sum()))

    @staticmethod
    def apply_m(
        sub: SubGraph,
        y_hat: SparseVector,
        q: float,
        n2: int,
        *,
        counter: Optional[OperationCounter] = None,
        audit: Optional[AllocationAudit] = None,
    ) -> np.ndarray:
        """My = Aŷ - q(Σŷ)·1 - qL·A1 + q²L·n2·1"""
        n1 = sub.row_degree.size
        position = sub.locate(y_hat.support)
        present = position >= 0
        local = np.zeros(sub.support_size)
        local[position[present]] = y_hat.values[present]
        x = np.bincount(sub.left, weights=local[sub.right_local], minlength=n1)
        L = y_hat.L
        x -= q * float(y_hat.values.sum())
        x -= q * L * sub.row_degree
        x += q * q * L * n2
        if counter is not None:
            counter.touch(sub.num_edges, y_hat.support.size)
            counter.vector(n1)
        if audit is not None:
            audit.record("right", local.size)
            audit.record("left", n1)
        return x

    @staticmethod
    def vote(history: np.ndarray) -> np.ndarray:
        """逐列多数表决 (每行一次迭代的符号), 平局取 +1"""
        return _sign(np.asarray(history, dtype=np.int64).sum(axis=0))

    @staticmethod
    def spi_solve(
        graph: BipartiteGraph,
        config: Optional[SolverConfig] = None,
        truth: Optional[HiddenPartition] = None,
        *,
        initial=None,
        counter: Optional[OperationCounter] = None,
        audit: Optional[AllocationAudit] = None,
    ) -> RecoveryResult:
        """子采样幂迭代: 交替乘以新的 M_tᵀ 与 M_t, 取符号后在窗口内多数表决"""
        config = config or SolverConfig()
        n1, n2 = graph.n1, graph.n2
        T = config.resolve_T(n1)
        if graph.num_edges == 0:
            logger.warning("Graph has no edges, nothing to solve")
            return RecoveryResult(signs=np.ones(n1, dtype=np.int8), status="empty", T=T)

        p = config.p_override if config.p_override is not None else graph.density()
        split = SolverService.split_edges(graph, T, config.seed, p)
        if config.mode == "dense_reference":
            backend = _DenseBackend(split, audit)
        else:
            backend = _ImplicitBackend(split, counter, audit)

        x = _initial_vector(n1, config.seed, initial)
        iterations = T // 2
        history = np.empty((iterations, n1), dtype=np.int8)
        if audit is not None:
            audit.record("left", n1)
        track_u = truth is not None and truth.u.size == n1
        track_v = truth is not None and (truth.v.size == n2 or truth.v_total is not None)
        if truth is not None and not track_v:
            logger.warning(f"truth labels cover {truth.v.size} of {n2} right vertices, V is not tracked")
        U_trace: List[float] = []
        V_trace: List[float] = []
        status = "ok"
        done = 0

        for i in range(iterations):
            y = backend.forward(2 * i, x)
            norm = backend.norm(y)
            if norm < settings.NORM_TOLERANCE:
                status = "degenerate"
                break
            y = backend.scale(y, 1.0 / norm)
            if track_v:
                V_trace.append(backend.dot(y, truth))

            x_next = backend.backward(2 * i + 1, y)
            norm = float(np.linalg.norm(x_next))
            if norm < settings.NORM_TOLERANCE:
                status = "degenerate"
                break
            x = x_next / norm
            if track_u:
                U_trace.append(float(truth.u @ x))
            history[i] = _sign(x)
            done = i + 1
            logger.debug(f"iteration {done}/{iterations}: U={U_trace[-1] if track_u else None}")

        if status == "degenerate":
            logger.warning(f"Iterate norm fell below {settings.NORM_TOLERANCE} after {done} iterations")
            signs = history[done - 1] if done else _sign(x)
        else:
            lo, hi = config.window(iterations)
            signs = SolverService.vote(history[lo:hi])

        overlap = InstanceService.overlap(signs, truth.u) if track_u else None
        result = RecoveryResult(
            signs=signs,
            status=status,
            overlap=overlap,
            U_trace=U_trace,
            V_trace=V_trace,
            iterations=done,
            edges_used=split.num_edges,
            T=T,
            p_used=p,
            operations=counter.total if counter is not None else 0,
        )
        logger.info(f"spi_solve T={T} edges={split.num_edges} status={status} overlap={overlap}")
        return result

    @staticmethod
    def power_iteration_baseline(
        graph: BipartiteGraph,
        iterations: int = 50,
        seed: int = 0,
        *,
        p: Optional[float] = None,
        truth: Optional[HiddenPartition] = None,
        counter: Optional[OperationCounter] = None,
        audit: Optional[AllocationAudit] = None,
    ) -> RecoveryResult:
        """不做子采样: 在完整的中心化矩阵上重复 x ← M(Mᵀx)/‖·‖ (q = p)"""
        if iterations < 1:
            raise InvalidParameterError("iterations must be at least 1")
        n1, n2 = graph.n1, graph.n2
        if graph.num_edges == 0:
            return RecoveryResult(signs=np.ones(n1, dtype=np.int8), status="empty")
        q = graph.density() if p is None else p
        full = SubGraph.from_edges(graph.left, graph.right, n1)
        x = _initial_vector(n1, seed, None)
        track_u = truth is not None and truth.u.size == n1
        U_trace: List[float] = []
        status = "ok"
        done = 0
        for _ in range(iterations):
            y = SolverService.apply_mt(full, x, counter=counter, audit=audit)
            norm = y.norm(q, n2)
            if norm < settings.NORM_TOLERANCE:
                status = "degenerate"
                break
            x_next = SolverService.apply_m(full, y.scaled(1.0 / norm), q, n2, counter=counter, audit=audit)
            norm = float(np.linalg.norm(x_next))
            if norm < settings.NORM_TOLERANCE:
                status = "degenerate"
                break
            x = x_next / norm
            done += 1
            if track_u:
                U_trace.append(float(truth.u @ x))
        signs = _sign(x)
        overlap = InstanceService.overlap(signs, truth.u) if track_u else None
        logger.info(f"power iteration baseline: {done} iterations, status={status} overlap={overlap}")
        return RecoveryResult(
            signs=signs, status=status, overlap=overlap, U_trace=U_trace, iterations=done,
            edges_used=graph.num_edges, p_used=q, operations=counter.total if counter is not None else 0,
        )

    @staticmethod
    def majority_vote_r1(
        instance: PlantedCspInstance, S: Sequence[int], seed: int = 0, bias_sign: int = 1
    ) -> AssignmentResult:
        """变量以正文字出现多于负文字则取 +1 (偏置为负时反转)"""
        S = tuple(S)
        if len(S) != 1:
            raise InvalidParameterError(f"majority vote needs a singleton witness set, got {S}")
        if not 0 <= S[0] < instance.k:
            raise InvalidParameterError(f"position {S[0]} outside clause width {instance.k}")
        variables = instance.variables[:, S[0]]
        signs = instance.signs[:, S[0]].astype(np.float64)
        counts = np.bincount(variables, weights=signs, minlength=instance.n) * bias_sign
        coins = 2 * stream_rng(seed, TIES).integers(0, 2, size=instance.n) - 1
        assignment = np.where(counts > 0, 1, np.where(counts < 0, -1, coins)).astype(np.int8)
        flips = np.flatnonzero(counts == 0).tolist()
        if flips:
            logger.warning(f"{len(flips)} variables tied in the majority vote, decided by coin")
        return AssignmentResult(assignment=assignment, inconsistencies=0, coin_flips=flips)
