import logging

import pytest

from spi import presets
from spi.schemas import BlockModelParams, HiddenPartition, PlantedCspInstance, SolverConfig
from spi.services import InstanceService

# 设置日志级别为INFO
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


@pytest.fixture
def small_partition():
    """4 × 4, 每侧前一半为 +1"""
    return HiddenPartition(u=[1, 1, -1, -1], v=[1, 1, -1, -1])


@pytest.fixture
def square_sbm():
    """n1 = n2 = 200 的中等密度块模型, 用于确定性与对照测试"""
    params = BlockModelParams(n1=200, n2=200, delta=1.8, p=0.1, seed=7)
    return InstanceService.sample_bipartite_block(params)


@pytest.fixture
def noisy_xor3():
    return presets.noisy_xor(3, 0.5)


@pytest.fixture
def sat3():
    return presets.satisfying_sat(3)


@pytest.fixture
def two_literal_instance():
    """单个子句 (x0, ¬x1), σ = (+1, +1)"""
    return PlantedCspInstance(n=2, k=2, sigma=[1, 1], variables=[[0, 1]], signs=[[1, -1]])


@pytest.fixture
def short_solver():
    return SolverConfig(T=10, seed=3)
