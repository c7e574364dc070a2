from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Dict

from core.ga.evaluation import PopulationEvaluator
from core.ga.schemas import Population


class VariationStrategy(ABC):
    """
    Abstract base class for generation-to-generation variation schemes.
    Defines the interface the generation loop drives.
    """

    name: str = "abstract"

    @abstractmethod
    def initialize(self, config: Dict[str, Any]) -> None:
        """
        Initialize the strategy from configuration.

        Args:
            config: Parameter models (or their dict form) keyed by group name,
                    e.g. {"pbo": PBOParams(...), "anneal": AnnealParams(...)}
        """
        pass

    @property
    @abstractmethod
    def g_size(self) -> int:
        """Number of generations the loop runs."""
        pass

    @abstractmethod
    def variation_rate(self, generation: int) -> float:
        """Probability that a non-elite individual is varied in `generation` (logged as p_ann)."""
        pass

    @abstractmethod
    def advance(self, pop: Population, generation: int, evaluator: PopulationEvaluator) -> Population:
        """
        Produce generation `generation + 1`.

        Args:
            pop: Evaluated population with normalized fitness.
            generation: Current generation index.
            evaluator: Used for any intermediate evaluation the scheme needs.

        Returns:
            The next population; members may be stale.
        """
        pass
