"""reduce: CSP / Goldreich 文件 → 块模型文件 (附 reduction 记录)"""
import argparse

from ..exceptions import UnidentifiableError
from ..services.fourier_service import FourierService
from ..services.reduction_service import ReductionService
from ..storage import peek_type, read_csp, read_goldreich, write_reduced
from .options import require_output


def reduce_instance(args: argparse.Namespace) -> int:
    require_output(args)
    kind = peek_type(args.input)
    if kind == "goldreich":
        instance = read_goldreich(args.input).instance
        report = FourierService.predicate_lowest_degree(instance.predicate)
        reduced = ReductionService.goldreich_to_bipartite(
            instance, report, args.thinning, mode=args.goldreich_mode,
            epsilon=args.epsilon, restriction=args.restriction, seed=args.seed,
        )
    else:
        loaded = read_csp(args.input)
        report = FourierService.distribution_complexity(loaded.distribution)
        if report.is_infinite:
            raise UnidentifiableError("planting distribution is uniform, nothing to reduce")
        reduced = ReductionService.csp_to_bipartite(
            loaded.instance, report, args.thinning,
            epsilon=args.epsilon, restriction=args.restriction, seed=args.seed,
        )
    write_reduced(args.output, reduced, args.seed)
    return 0


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("reduce", parents=parents, help="reduce a planted CSP to a block model file")
    parser.add_argument("input")
    parser.add_argument("--thinning", choices=["dedup", "poisson"], default="dedup")
    parser.add_argument("--epsilon", type=float, default=None)
    parser.add_argument("--restriction", choices=["first", "random"], default="first")
    parser.add_argument("--goldreich-mode", choices=["fold-first", "fold-spread", "discard"], default="fold-first")
    parser.set_defaults(handler=reduce_instance)
