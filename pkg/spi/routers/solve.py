"""solve / solve-csp / solve-goldreich"""
import argparse
import logging

from ..exceptions import SolveFailedError, UnidentifiableError
from ..services.pipeline_service import PipelineService
from ..services.solver_service import SolverService
from ..storage import read_csp, read_goldreich, read_sbm, write_payload
from .options import add_pipeline_args, add_solver_args, pipeline_options, solver_config

logger = logging.getLogger(__name__)


def solve(args: argparse.Namespace) -> int:
    loaded = read_sbm(args.input)
    # 原生块模型文件的 p 即模型参数; 约化文件的 p 只是等效密度, 改用边数估计
    p = loaded.header.get("p") if loaded.sidecar is None else None
    if args.baseline:
        result = SolverService.power_iteration_baseline(
            loaded.graph, args.iterations, args.seed,
            p=args.p_override if args.p_override is not None else p, truth=loaded.truth,
        )
    else:
        result = SolverService.spi_solve(loaded.graph, solver_config(args, p), loaded.truth)
    write_payload(args.output, result.to_json(), args.format or "json")
    if not result.ok:
        raise SolveFailedError(f"solver finished with status '{result.status}'")
    return 0


def _finish(args: argparse.Namespace, assignment, report) -> int:
    payload = report.to_json()
    payload["assignment"] = None if assignment is None else [int(v) for v in assignment]
    write_payload(args.output, payload, args.format or "json")
    if report.status == "unidentifiable":
        raise UnidentifiableError()
    if report.status != "ok":
        raise SolveFailedError(f"pipeline finished with status '{report.status}'")
    return 0


def solve_csp(args: argparse.Namespace) -> int:
    loaded = read_csp(args.input)
    assignment, report = PipelineService.solve_csp_end_to_end(
        loaded.instance, loaded.distribution, pipeline_options(args)
    )
    return _finish(args, assignment, report)


def solve_goldreich(args: argparse.Namespace) -> int:
    loaded = read_goldreich(args.input)
    assignment, report = PipelineService.solve_goldreich_end_to_end(loaded.instance, pipeline_options(args))
    return _finish(args, assignment, report)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("solve", parents=parents, help="recover the partition of a block model file")
    parser.add_argument("input")
    add_solver_args(parser)
    parser.add_argument("--baseline", action="store_true", help="plain power iteration without subsampling")
    parser.add_argument("--iterations", type=int, default=50)
    parser.set_defaults(handler=solve)

    parser = subparsers.add_parser("solve-csp", parents=parents, help="recover a planted assignment end to end")
    parser.add_argument("input")
    add_pipeline_args(parser)
    parser.set_defaults(handler=solve_csp)

    parser = subparsers.add_parser("solve-goldreich", parents=parents, help="invert Goldreich PRG constraints")
    parser.add_argument("input")
    add_pipeline_args(parser)
    parser.add_argument("--goldreich-mode", choices=["fold-first", "fold-spread", "discard"], default="fold-first")
    parser.set_defaults(handler=solve_goldreich)
