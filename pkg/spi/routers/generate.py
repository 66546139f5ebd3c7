"""gen-sbm / gen-csp / gen-goldreich: 写出 JSON-lines 实例文件"""
import argparse
import logging

from ..exceptions import UsageError
from ..schemas.graph import BlockModelParams
from ..services.fourier_service import FourierService
from ..services.instance_service import InstanceService
from ..services.sweep_service import constraint_count
from ..storage import write_csp, write_goldreich, write_sbm
from .options import add_distribution_args, add_predicate_args, require_output, resolve_distribution, resolve_predicate

logger = logging.getLogger(__name__)


def gen_sbm(args: argparse.Namespace) -> int:
    require_output(args)
    if args.p is None and args.multiplier is None:
        raise UsageError("gen-sbm needs --p or --multiplier")
    p = args.p
    if p is None:
        p = InstanceService.threshold_density(args.n1, args.n2, args.delta, args.multiplier)
    params = BlockModelParams(n1=args.n1, n2=args.n2, delta=args.delta, p=p, seed=args.seed)
    graph, truth = InstanceService.sample_bipartite_block(params)
    header = {"delta": params.delta, "p": params.p, "seed": params.seed}
    write_sbm(args.output, graph, header, None if args.no_truth else truth)
    return 0


def _constraints(args: argparse.Namespace, r) -> int:
    if args.m is not None:
        return args.m
    if args.multiplier is None:
        raise UsageError(f"{args.command} needs --m or --multiplier")
    if r is None or r < 1:
        raise UsageError("--multiplier needs an identifiable planting")
    return constraint_count(args.n, r, args.multiplier)


def gen_csp(args: argparse.Namespace) -> int:
    require_output(args)
    Q = resolve_distribution(args)
    m = _constraints(args, FourierService.distribution_complexity(Q).r if args.m is None else None)
    instance = InstanceService.sample_planted_csp(Q, args.n, m, args.seed)
    if args.no_truth:
        instance = instance.model_copy(update={"sigma": None})
    write_csp(args.output, instance, Q, args.seed)
    return 0


def gen_goldreich(args: argparse.Namespace) -> int:
    require_output(args)
    predicate = resolve_predicate(args)
    if predicate is None:
        raise UsageError("gen-goldreich needs --predicate or --table")
    m = _constraints(args, FourierService.predicate_lowest_degree(predicate).r if args.m is None else None)
    instance = InstanceService.sample_goldreich(predicate, args.n, m, args.seed)
    if args.no_truth:
        instance = instance.model_copy(update={"sigma": None})
    write_goldreich(args.output, instance, args.seed)
    return 0


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("gen-sbm", parents=parents, help="sample a bipartite block model")
    parser.add_argument("--n1", type=int, required=True)
    parser.add_argument("--n2", type=int, required=True)
    parser.add_argument("--delta", type=float, required=True)
    parser.add_argument("--p", type=float)
    parser.add_argument("--multiplier", type=float, help="p = C ln(n1) / ((delta-1)^2 sqrt(n1 n2))")
    parser.add_argument("--no-truth", action="store_true")
    parser.set_defaults(handler=gen_sbm)

    parser = subparsers.add_parser("gen-csp", parents=parents, help="sample a planted k-CSP")
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--m", type=int)
    parser.add_argument("--multiplier", type=float, help="m = C n^(max(r,2)/2) ln n")
    parser.add_argument("--no-truth", action="store_true")
    add_distribution_args(parser)
    parser.set_defaults(handler=gen_csp)

    parser = subparsers.add_parser("gen-goldreich", parents=parents, help="sample Goldreich PRG constraints")
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--m", type=int)
    parser.add_argument("--multiplier", type=float)
    parser.add_argument("--no-truth", action="store_true")
    add_predicate_args(parser)
    parser.set_defaults(handler=gen_goldreich)
