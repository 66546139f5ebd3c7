"""analyze-q: 植入分布或谓词的 Fourier 分析"""
import argparse

from ..services.fourier_service import FourierService
from ..storage import write_payload
from .options import add_distribution_args, add_predicate_args, resolve_distribution, resolve_predicate


def analyze_q(args: argparse.Namespace) -> int:
    predicate = resolve_predicate(args)
    if predicate is not None:
        report = FourierService.predicate_lowest_degree(predicate)
        payload = report.to_json()
        payload["correlation_sign"] = report.correlation_sign
    else:
        payload = FourierService.distribution_complexity(resolve_distribution(args)).to_json()
    write_payload(args.output, payload, args.format or "json")
    return 0


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("analyze-q", parents=parents, help="distribution complexity and witness set")
    add_distribution_args(parser)
    add_predicate_args(parser)
    parser.set_defaults(handler=analyze_q)
