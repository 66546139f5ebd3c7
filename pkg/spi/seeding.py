"""随机数流

所有随机性都来自一个 64 位种子, 经 SeedSequence 按命名流拆分 (PCG64)。
每个操作只从自己的流中取数, 新增流不会改变已有流的输出。
"""
import numpy as np

PARTITION = 0
EDGES = 1
ASSIGNMENT = 2
CLAUSES = 3
SPLIT = 10
INIT = 11
TIES = 12
THINNING = 20
RESTRICTION = 21
FOLD = 22

SEED_BITS = 64


def stream_rng(seed: int, stream: int, *extra: int) -> np.random.Generator:
    """返回 (seed, stream, *extra) 对应的独立生成器"""
    sequence = np.random.SeedSequence(int(seed), spawn_key=(stream, *extra))
    return np.random.Generator(np.random.PCG64(sequence))


def derive_seed(seed: int, *key: int) -> int:
    """从父种子派生一个子种子 (用于批量试验)"""
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
