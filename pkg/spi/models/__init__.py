from .instrumentation import AllocationAudit, OperationCounter
from .split_graph import SparseVector, SplitGraphs, SubGraph
from .tuple_indexer import TupleIndexer

__all__ = ["AllocationAudit", "OperationCounter", "SparseVector", "SplitGraphs", "SubGraph", "TupleIndexer"]
