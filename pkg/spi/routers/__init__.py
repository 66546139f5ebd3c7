from . import analyze, generate, reduce, solve, sweep

__all__ = ["analyze", "generate", "reduce", "solve", "sweep"]
