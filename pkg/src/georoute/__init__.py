"""Geographic routing with imprecise destination information in random networks."""
from .core import DomainError, Point2, PolarStep, ScalingParams
from .strategies import Kind, StrategySpec

__version__ = "0.1.0"

__all__ = ["DomainError", "Kind", "Point2", "PolarStep", "ScalingParams", "StrategySpec", "__version__"]
