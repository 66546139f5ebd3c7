import asyncio
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import List, Tuple

import numpy as np
import pandas as pd

from ..exceptions import InvalidParameterError, UnidentifiableError
from ..schemas.csp import PlantingDistribution
from ..schemas.graph import BlockModelParams
from ..schemas.pipeline import PipelineOptions
from ..schemas.solver import SolverConfig
from ..schemas.sweep import SweepRow, SweepSpec, TrialOutcome
from ..seeding import derive_seed
from ..storage import write_sweep_csv
from .fourier_service import FourierService
from .instance_service import InstanceService
from .pipeline_service import PipelineService
from .solver_service import SolverService

logger = logging.getLogger(__name__)

EXACT_TOLERANCE = 1e-12


def constraint_count(n: int, r: int, multiplier: float) -> int:
    """m = C · n^{max(r,2)/2} · ln n"""
    return int(np.ceil(multiplier * n ** (max(r, 2) / 2.0) * np.log(n)))


def _complexity(spec: SweepSpec) -> int:
    if spec.family == "csp":
        report = FourierService.distribution_complexity(_distribution(spec))
    else:
        report = FourierService.predicate_lowest_degree(spec.predicate)
    if not report.identifiable:
        raise UnidentifiableError(f"{spec.family} sweep has no identifiable planted structure")
    return report.r


def _distribution(spec: SweepSpec) -> PlantingDistribution:
    k = int(round(np.log2(len(spec.weights))))
    return PlantingDistribution(k=k, weights=spec.weights)


def run_trial(spec: SweepSpec, multiplier_index: int, trial: int) -> TrialOutcome:
    """单次试验: 生成新实例, 求解, 记录重合度与耗时 (可在子进程中执行)"""
    multiplier = spec.multipliers[multiplier_index]
    seed = derive_seed(spec.seed, multiplier_index, trial)
    solver = SolverConfig(T_factor=spec.T_factor, seed=seed)

    if spec.family == "sbm":
        p = InstanceService.threshold_density(spec.n1, spec.n2, spec.delta, multiplier)
        if max(spec.delta, 2.0 - spec.delta) * p > 1.0:
            raise InvalidParameterError(f"multiplier {multiplier} gives edge probabilities above 1")
        graph, truth = InstanceService.sample_bipartite_block(
            BlockModelParams(n1=spec.n1, n2=spec.n2, delta=spec.delta, p=p, seed=seed)
        )
        started = time.perf_counter()
        result = SolverService.spi_solve(graph, solver.model_copy(update={"p_override": p}), truth)
        elapsed = time.perf_counter() - started
        overlap = result.overlap if result.ok else 0.0
        edges = result.edges_used
    else:
        m = constraint_count(spec.n, _complexity(spec), multiplier)
        options = PipelineOptions(solver=solver, seed=seed)
        if spec.family == "csp":
            instance = InstanceService.sample_planted_csp(_distribution(spec), spec.n, m, seed)
            started = time.perf_counter()
            _, report = PipelineService.solve_csp_end_to_end(instance, _distribution(spec), options)
        else:
            instance = InstanceService.sample_goldreich(spec.predicate, spec.n, m, seed)
            started = time.perf_counter()
            _, report = PipelineService.solve_goldreich_end_to_end(instance, options)
        elapsed = time.perf_counter() - started
        overlap = report.overlap if report.status == "ok" else 0.0
        edges = report.edges_used

    overlap = float(overlap or 0.0)
    return TrialOutcome(
        multiplier_index=multiplier_index,
        trial=trial,
        overlap=overlap,
        exact=overlap >= 1.0 - EXACT_TOLERANCE,
        runtime_ms=1000.0 * elapsed if spec.timing else 0.0,
        edges=int(edges),
    )


def aggregate(spec: SweepSpec, outcomes: List[TrialOutcome]) -> List[SweepRow]:
    """按 (multiplier, trial) 排序后逐个密度点汇总"""
    frame = pd.DataFrame([outcome.model_dump() for outcome in outcomes])
    frame = frame.sort_values(["multiplier_index", "trial"], kind="stable")
    rows = []
    for index, group in frame.groupby("multiplier_index", sort=True):
        rows.append(SweepRow(
            multiplier=spec.multipliers[int(index)],
            trials=int(group.shape[0]),
            exact_recovery_rate=float(group["exact"].mean()),
            mean_overlap=float(group["overlap"].mean()),
            mean_runtime_ms=float(group["runtime_ms"].mean()),
            mean_edges=float(group["edges"].mean()),
        ))
    return rows


class SweepService:
    @staticmethod
    def jobs(spec: SweepSpec) -> List[Tuple[int, int]]:
        return [(i, t) for i in range(len(spec.multipliers)) for t in range(spec.trials)]

    @staticmethod
    async def run_sweep(spec: SweepSpec) -> List[SweepRow]:
        """所有 (multiplier, trial) 作业在有界进程池中运行, 结果按作业顺序合并"""
        if spec.family != "sbm":
            _complexity(spec)
        jobs = SweepService.jobs(spec)
        logger.info(f"Running {len(jobs)} {spec.family} trials with {spec.workers} worker(s)")
        if spec.workers == 1:
            outcomes = []
            for i, t in jobs:
                outcomes.append(run_trial(spec, i, t))
                await asyncio.sleep(0)
        else:
            loop = asyncio.get_running_loop()
            with ProcessPoolExecutor(max_workers=spec.workers) as pool:
                futures = [loop.run_in_executor(pool, run_trial, spec, i, t) for i, t in jobs]
                outcomes = await asyncio.gather(*futures)
        rows = aggregate(spec, list(outcomes))
        if spec.output is not None:
            write_sweep_csv(spec.output, rows)
        for row in rows:
            logger.info(f"multiplier={row.multiplier}: exact_rate={row.exact_recovery_rate:.3f} "
                        f"mean_overlap={row.mean_overlap:.3f}")
        return rows
