import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..schemas.csp import GoldreichInstance, PlantedCspInstance, PlantingDistribution
from ..schemas.fourier import FourierReport
from ..schemas.pipeline import PipelineOptions, SolveReport
from .fourier_service import FourierService
from .instance_service import InstanceService
from .reduction_service import ReductionService
from .solver_service import SolverService

logger = logging.getLogger(__name__)

Attempt = Tuple[np.ndarray, SolveReport]


def _graph_attempt(reduced, candidate: FourierReport, options: PipelineOptions) -> Attempt:
    result = SolverService.spi_solve(reduced.graph, options.solver, reduced.truth)
    assignment = ReductionService.partition_to_assignment(result.signs, seed=options.seed)
    report = SolveReport(
        status=result.status,
        path="spi",
        r=candidate.r,
        S=candidate.S,
        delta=reduced.delta,
        inconsistencies=assignment.inconsistencies,
        coin_flips=len(assignment.coin_flips),
        edges_used=result.edges_used,
    )
    return assignment.assignment, report


def _majority_attempt(instance: PlantedCspInstance, candidate: FourierReport, options: PipelineOptions,
                      bias_sign: int) -> Attempt:
    assignment = SolverService.majority_vote_r1(instance, candidate.S, seed=options.seed, bias_sign=bias_sign)
    report = SolveReport(
        status="ok",
        path="majority",
        r=1,
        S=candidate.S,
        delta=candidate.delta,
        coin_flips=len(assignment.coin_flips),
        edges_used=instance.m,
    )
    return assignment.assignment, report


def _best(candidates: List[FourierReport], attempt: Callable[[FourierReport], Attempt],
          sigma: Optional[np.ndarray]) -> Attempt:
    """依次尝试见证集合, 保留成功且不一致数最少的结果 (平局取先者)"""
    best: Optional[Attempt] = None
    for candidate in candidates:
        assignment, report = attempt(candidate)
        key = (report.status != "ok", report.inconsistencies)
        if best is None or key < (best[1].status != "ok", best[1].inconsistencies):
            best = (assignment, report)
    assignment, report = best
    overlap = InstanceService.overlap(assignment, sigma) if sigma is not None else None
    report = report.model_copy(update={"overlap": overlap, "candidates_tried": len(candidates)})
    logger.info(f"Pipeline finished via {report.path}: r={report.r} S={report.S} status={report.status} overlap={overlap}")
    return assignment, report


class PipelineService:
    @staticmethod
    def solve_csp_end_to_end(
        instance: PlantedCspInstance, Q: PlantingDistribution, options: Optional[PipelineOptions] = None
    ) -> Tuple[Optional[np.ndarray], SolveReport]:
        """复杂度分析 → r = 1 多数表决, 否则约化 → spi_solve → 读出赋值"""
        options = options or PipelineOptions()
        fourier = FourierService.distribution_complexity(Q)
        if fourier.is_infinite:
            logger.warning("Planting distribution is uniform, planted assignment is unidentifiable")
            return None, SolveReport(status="unidentifiable")
        candidates = FourierService.candidate_witnesses(Q) if options.try_all else [fourier]

        def attempt(candidate: FourierReport) -> Attempt:
            if candidate.r == 1:
                return _majority_attempt(instance, candidate, options, candidate.correlation_sign)
            reduced = ReductionService.csp_to_bipartite(
                instance, candidate, options.thinning,
                epsilon=options.epsilon, restriction=options.restriction, seed=options.seed,
            )
            return _graph_attempt(reduced, candidate, options)

        return _best(candidates, attempt, instance.sigma)

    @staticmethod
    def solve_goldreich_end_to_end(
        instance: GoldreichInstance, options: Optional[PipelineOptions] = None
    ) -> Tuple[Optional[np.ndarray], SolveReport]:
        options = options or PipelineOptions()
        fourier = FourierService.predicate_lowest_degree(instance.predicate)
        if fourier.is_degenerate:
            return None, SolveReport(status="unidentifiable", r=0)
        candidates = FourierService.candidate_witnesses(instance.predicate) if options.try_all else [fourier]

        def attempt(candidate: FourierReport) -> Attempt:
            if candidate.r == 1:
                # 观测值乘以相关符号即为该位置变量的带噪投票
                folded = (instance.values * candidate.correlation_sign).astype(np.int8)
                votes = PlantedCspInstance(
                    n=instance.n, k=instance.k, variables=instance.variables,
                    signs=np.repeat(folded[:, None], instance.k, axis=1),
                )
                return _majority_attempt(votes, candidate, options, 1)
            reduced = ReductionService.goldreich_to_bipartite(
                instance, candidate, options.thinning, mode=options.goldreich_mode,
                epsilon=options.epsilon, restriction=options.restriction, seed=options.seed,
            )
            return _graph_attempt(reduced, candidate, options)

        return _best(candidates, attempt, instance.sigma)
