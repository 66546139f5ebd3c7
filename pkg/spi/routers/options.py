"""子命令共用的参数与解析辅助"""
import argparse
from typing import List, Optional

import numpy as np

from ..exceptions import UsageError
from ..presets import DISTRIBUTIONS, PREDICATES, by_true_count
from ..schemas.csp import PlantingDistribution
from ..schemas.pipeline import PipelineOptions
from ..schemas.solver import SolverConfig


def number_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.replace(" ", "").split(",") if item]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def table_k(size: int) -> int:
    k = int(round(np.log2(size))) if size else 0
    if k < 1 or 2 ** k != size:
        raise UsageError(f"table length {size} is not a power of two")
    return k


def add_distribution_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("planting distribution")
    group.add_argument("--weights", type=number_list, help="2^k comma-separated weights, bit i of the index is z_i = +1")
    group.add_argument("--preset", choices=sorted(DISTRIBUTIONS) + ["true-count"], default="noisy-xor")
    group.add_argument("--k", type=int, default=2)
    group.add_argument("--eta", type=float, default=0.8, help="noise parameter of noisy-xor")
    group.add_argument("--count-weights", type=number_list, help="k+1 weights by number of true literals")


def add_predicate_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("predicate")
    group.add_argument("--table", type=number_list, help="2^k comma-separated values in {+1,-1}")
    group.add_argument("--predicate", choices=sorted(PREDICATES), default=None)
    group.add_argument("--predicate-k", type=int, default=3)


def add_solver_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("solver")
    group.add_argument("--T-factor", dest="T_factor", type=float, default=None)
    group.add_argument("--T", dest="T", type=int, default=None, help="explicit number of sub-graphs")
    group.add_argument("--window", type=float, nargs=2, default=(0.5, 1.0), metavar=("START", "END"))
    group.add_argument("--mode", choices=["implicit_sparse", "dense_reference"], default="implicit_sparse")
    group.add_argument("--p", dest="p_override", type=float, default=None, help="centering density override")


def add_pipeline_args(parser: argparse.ArgumentParser) -> None:
    add_solver_args(parser)
    group = parser.add_argument_group("reduction")
    group.add_argument("--thinning", choices=["dedup", "poisson"], default="dedup")
    group.add_argument("--epsilon", type=float, default=None)
    group.add_argument("--restriction", choices=["first", "random"], default="first")
    group.add_argument("--try-all", action="store_true")


def resolve_distribution(args: argparse.Namespace) -> PlantingDistribution:
    if args.weights:
        return PlantingDistribution(k=table_k(len(args.weights)), weights=tuple(args.weights))
    if args.preset == "true-count":
        if not args.count_weights:
            raise UsageError("--preset true-count needs --count-weights")
        return by_true_count(args.k, args.count_weights)
    if args.preset == "noisy-xor":
        return DISTRIBUTIONS["noisy-xor"](args.k, args.eta)
    return DISTRIBUTIONS[args.preset](args.k)


def resolve_predicate(args: argparse.Namespace) -> Optional[tuple]:
    if args.table:
        table_k(len(args.table))
        return tuple(int(v) for v in args.table)
    if args.predicate is None:
        return None
    if args.predicate == "random":
        return PREDICATES["random"](args.predicate_k, args.seed)
    return PREDICATES[args.predicate](args.predicate_k)


def solver_config(args: argparse.Namespace, p_override: Optional[float] = None) -> SolverConfig:
    values = {
        "T": args.T,
        "majority_window": tuple(args.window),
        "seed": args.seed,
        "p_override": args.p_override if args.p_override is not None else p_override,
        "mode": args.mode,
    }
    if args.T_factor is not None:
        values["T_factor"] = args.T_factor
    return SolverConfig(**values)


def pipeline_options(args: argparse.Namespace) -> PipelineOptions:
    values = {
        "solver": solver_config(args),
        "thinning": args.thinning,
        "restriction": args.restriction,
        "try_all": args.try_all,
        "seed": args.seed,
    }
    if args.epsilon is not None:
        values["epsilon"] = args.epsilon
    if getattr(args, "goldreich_mode", None):
        values["goldreich_mode"] = args.goldreich_mode
    return PipelineOptions(**values)


def require_output(args: argparse.Namespace) -> None:
    if args.output is None:
        raise UsageError(f"{args.command} needs --output")
