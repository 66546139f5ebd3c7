"""常用的植入分布与谓词"""
from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from .schemas.csp import PlantingDistribution
from .seeding import stream_rng


def patterns(k: int) -> np.ndarray:
    """按表索引顺序列出 {±1}^k 的全部取值 (第 i 位为 1 ⟺ z_i = +1)"""
    index = np.arange(2 ** k)[:, None]
    bits = (index >> np.arange(k)) & 1
    return np.where(bits == 1, 1, -1).astype(np.int8)


def uniform(k: int) -> PlantingDistribution:
    return PlantingDistribution(k=k, weights=tuple([1.0] * 2 ** k))


def satisfying_sat(k: int) -> PlantingDistribution:
    """至少一个真文字的模式上的均匀分布 (植入 k-SAT)"""
    z = patterns(k)
    weights = (z > 0).any(axis=1).astype(float)
    return PlantingDistribution(k=k, weights=tuple(weights))


def noisy_xor(k: int, eta: float) -> PlantingDistribution:
    """Q(z) = (1 + eta * z_1...z_k) / 2^k"""
    if not -1.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [-1, 1]")
    z = patterns(k)
    weights = (1.0 + eta * z.prod(axis=1)) / 2 ** k
    return PlantingDistribution(k=k, weights=tuple(weights))


def by_true_count(k: int, count_weights: Sequence[float]) -> PlantingDistribution:
    """按真文字个数赋权 (安静植入的常见写法), count_weights[t] 为恰有 t 个真文字的权重"""
    if len(count_weights) != k + 1:
        raise ValueError(f"need {k + 1} weights, one per true-literal count")
    z = patterns(k)
    counts = (z > 0).sum(axis=1)
    weights = np.asarray(count_weights, dtype=float)[counts]
    return PlantingDistribution(k=k, weights=tuple(weights))


def parity(k: int) -> Tuple[int, ...]:
    return tuple(int(v) for v in patterns(k).prod(axis=1))


def majority(k: int) -> Tuple[int, ...]:
    if k % 2 == 0:
        raise ValueError("majority needs an odd number of inputs")
    return tuple(int(v) for v in np.sign(patterns(k).sum(axis=1)))


def constant(k: int, value: int = 1) -> Tuple[int, ...]:
    return tuple([int(value)] * 2 ** k)


def random_predicate(k: int, seed: int = 0) -> Tuple[int, ...]:
    rng = stream_rng(seed, 0)
    return tuple(int(v) for v in rng.choice([-1, 1], size=2 ** k))


DISTRIBUTIONS: Dict[str, Callable[..., PlantingDistribution]] = {
    "uniform": uniform,
    "sat": satisfying_sat,
    "noisy-xor": noisy_xor,
}

PREDICATES: Dict[str, Callable[..., Tuple[int, ...]]] = {
    "parity": parity,
    "majority": majority,
    "constant": constant,
    "random": random_predicate,
}

