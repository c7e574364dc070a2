from .base import VariationStrategy
from .baseline import BaselineStrategy
from .factory import StrategyFactory
from .pbo import PBOStrategy

__all__ = [
    "VariationStrategy",
    "PBOStrategy",
    "BaselineStrategy",
    "StrategyFactory",
]
