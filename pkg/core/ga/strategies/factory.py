from typing import Any, Dict, Optional, Type

from core.errors import ConfigError
from core.ga.strategies.base import VariationStrategy
from core.ga.strategies.baseline import BaselineStrategy
from core.ga.strategies.pbo import PBOStrategy


class StrategyFactory:
    """Factory class for creating and managing variation strategies."""

    # Strategy registry mapping names to their implementation classes
    _STRATEGY_REGISTRY: Dict[str, Type[VariationStrategy]] = {
        "pbo": PBOStrategy,
        "baseline": BaselineStrategy,
    }

    @staticmethod
    def get_strategy(strategy_type: str = "pbo", config: Optional[Dict[str, Any]] = None) -> VariationStrategy:
        """
        Factory method to get an initialized strategy instance.

        Args:
            strategy_type: Registered strategy name ('pbo' or 'baseline').
            config: Parameter groups passed to initialize().

        Raises:
            ConfigError: If strategy_type is not registered.
        """
        if config is None:
            config = {}

        strategy_type = strategy_type.lower().strip()

        if strategy_type not in StrategyFactory._STRATEGY_REGISTRY:
            supported = ", ".join(StrategyFactory._STRATEGY_REGISTRY.keys())
            raise ConfigError(
                f"Unsupported strategy: '{strategy_type}'. "
                f"Supported strategies: {supported}"
            )

        strategy = StrategyFactory._STRATEGY_REGISTRY[strategy_type]()
        strategy.initialize(config)
        return strategy

    @staticmethod
    def register_strategy(name: str, strategy_class: Type[VariationStrategy]) -> None:
        """Register a new strategy under `name`."""
        StrategyFactory._STRATEGY_REGISTRY[name.lower()] = strategy_class

    @staticmethod
    def get_supported_strategies() -> list:
        return list(StrategyFactory._STRATEGY_REGISTRY.keys())
