from .csp import GoldreichInstance, PlantedCspInstance, PlantingDistribution
from .fourier import FourierReport
from .graph import BipartiteGraph, BlockModelParams, HiddenPartition
from .pipeline import PipelineOptions, SolveReport
from .reduction import ReducedInstance
from .solver import AssignmentResult, RecoveryResult, SolverConfig
from .sweep import SweepRow, SweepSpec

__all__ = [
    "BipartiteGraph", "BlockModelParams", "HiddenPartition",
    "PlantingDistribution", "PlantedCspInstance", "GoldreichInstance",
    "FourierReport", "ReducedInstance",
    "SolverConfig", "RecoveryResult", "AssignmentResult",
    "PipelineOptions", "SolveReport",
    "SweepSpec", "SweepRow",
]
