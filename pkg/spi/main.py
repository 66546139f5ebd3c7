import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from . import __version__
from .config import settings
from .exceptions import SpiError, UsageError
from .routers import analyze, generate, reduce, solve, sweep

logger = logging.getLogger(__name__)


class SpiArgumentParser(argparse.ArgumentParser):
    """参数错误时抛出 UsageError 而不是直接退出"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", type=Path, default=None)
    parser.add_argument("--format", choices=["json", "csv"], default=None)
    parser.add_argument("--quiet", action="store_true")
    parser.add_argument("--print-config", action="store_true", help="print the effective configuration and exit")
    return parser


def create_parser() -> SpiArgumentParser:
    parser = SpiArgumentParser(
        prog="spi",
        description="Planted CSP and bipartite block model recovery by subsampled power iteration",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [common_parser()]
    for router in (generate, analyze, reduce, solve, sweep):
        router.register(subparsers, parents)
    return parser


def configure_logging(quiet: bool = False) -> None:
    level = logging.WARNING if quiet else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def effective_config(args: argparse.Namespace) -> dict:
    options = {key: str(value) if isinstance(value, Path) else value
               for key, value in vars(args).items() if key not in ("handler", "print_config")}
    return {"settings": settings.dict(), "command": options}


def main(argv: Optional[List[str]] = None) -> int:
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"error: {e.detail}\n")
        return e.exit_code
    except SystemExit as e:
        # --help / --version
        return int(e.code or 0)

    configure_logging(args.quiet)
    if args.print_config:
        sys.stdout.write(json.dumps(effective_config(args), indent=2, default=list) + "\n")
        return 0
    try:
        return args.handler(args)
    except SpiError as e:
        logger.error(e.detail)
        return e.exit_code
    except ValidationError as e:
        logger.error(f"invalid parameters: {e}")
        return UsageError.exit_code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
