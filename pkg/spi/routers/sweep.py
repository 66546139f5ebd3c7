"""sweep: 按 TOML/JSON 扫描配置运行密度扫描, 输出 CSV"""
import argparse
import asyncio

from ..schemas.sweep import SweepSpec
from ..services.sweep_service import SweepService
from ..storage import read_sweep_spec, write_json, write_sweep_csv


def sweep(args: argparse.Namespace) -> int:
    spec = read_sweep_spec(args.spec)
    update = {"output": None}
    if args.workers is not None:
        update["workers"] = args.workers
    if args.no_timing:
        update["timing"] = False
    output = args.output if args.output is not None else spec.output
    spec = SweepSpec(**{**spec.model_dump(), **update})
    rows = asyncio.run(SweepService.run_sweep(spec))
    if (args.format or "csv") == "csv":
        write_sweep_csv(output, rows)
    else:
        write_json(output, {"rows": [row.as_record() for row in rows]})
    return 0


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("sweep", parents=parents, help="density sweep with recovery-rate CSV output")
    parser.add_argument("spec", help="sweep specification (.toml or .json)")
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--no-timing", action="store_true", help="write 0 runtimes for reproducible files")
    parser.set_defaults(handler=sweep)
