from .fourier_service import FourierService
from .instance_service import InstanceService
from .pipeline_service import PipelineService
from .reduction_service import ReductionService
from .solver_service import SolverService
from .sweep_service import SweepService

__all__ = [
    "FourierService", "InstanceService", "PipelineService",
    "ReductionService", "SolverService", "SweepService",
]
