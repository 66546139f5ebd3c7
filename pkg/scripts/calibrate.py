"""试点扫描: 为测试中冻结的常数 C 取值

用法: python -m scripts.calibrate [--trials 20] [--workers 4]
每个实验族打印各倍数下的恢复率, 以及恢复率首次达到 90% 的倍数。
"""
import argparse
import asyncio
import logging


from spi.presets import noisy_xor, satisfying_sat
from spi.schemas.sweep import SweepRow, SweepSpec
from spi.services.sweep_service import SweepService

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

PILOTS = {
    "sbm-square": dict(family="sbm", n1=1000, n2=1000, delta=1.8, multipliers=[5, 10, 20, 30, 40]),
    "sbm-lopsided": dict(family="sbm", n1=100, n2=10_000, delta=1.8, multipliers=[10, 20, 30, 40]),
    "noisy-2xor": dict(family="csp", n=300, weights=noisy_xor(2, 0.8).weights, T_factor=4.0,
                       multipliers=[50, 100, 150, 200]),
    "noisy-3xor": dict(family="csp", n=100, weights=noisy_xor(3, 0.8).weights, multipliers=[60, 90, 120, 150]),
    "sat3-majority": dict(family="csp", n=500, weights=satisfying_sat(3).weights, multipliers=[50, 100, 150]),
}


def first_reliable(rows: list[SweepRow], rate: float = 0.9):
    for row in rows:
        if row.exact_recovery_rate >= rate:
            return row.multiplier
    return None


async def calibrate(name: str, trials: int, workers: int) -> list[SweepRow]:
    spec = SweepSpec(**PILOTS[name], trials=trials, workers=workers, seed=2024)
    logger.info(f"Calibrating {name} ...")
    rows = await SweepService.run_sweep(spec)
    for row in rows:
        logger.info(f"  C={row.multiplier:g}: exact={row.exact_recovery_rate:.2f} overlap={row.mean_overlap:.3f} "
                    f"edges={row.mean_edges:.0f} runtime={row.mean_runtime_ms:.1f}ms")
    logger.info(f"{name}: first multiplier with >= 90% exact recovery: {first_reliable(rows)}")
    return rows


async def main(argv=None):
    parser = argparse.ArgumentParser(description="pilot sweeps for the calibrated constants")
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--only", choices=sorted(PILOTS), nargs="*")
    args = parser.parse_args(argv)
    for name in args.only or PILOTS:
        await calibrate(name, args.trials, args.workers)


if __name__ == "__main__":
    asyncio.run(main())
