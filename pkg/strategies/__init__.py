"""
Strategies package for the benchmarking harness.
Provides a unified interface over heuristics and full-information baselines.
"""

from .base import KINDS, Predictions, Strategy, StrategyError, StrategySpec, Task, load_strategies, parse_strategies
from .lexicographic import Minimalist, TakeTheBest
from .regression import LinearStrategy, LogisticStrategy
from .tallying import Tallying
from .trees import FastFrugalTreeStrategy, OneCleverCue, PlaySafe

_REGISTRY: dict[str, type[Strategy]] = {
    "ttb": TakeTheBest,
    "tallying": Tallying,
    "minimalist": Minimalist,
    "fft": FastFrugalTreeStrategy,
    "threshold": OneCleverCue,
    "linear": LinearStrategy,
    "logistic": LogisticStrategy,
    "play_safe": PlaySafe,
}


def get_strategy(spec: StrategySpec) -> Strategy:
    """
    Factory function returning a fresh, unfitted strategy for a spec.

    Returns:
        An instance of the strategy class registered for spec.kind.

    Raises:
        ValueError: If the kind is not supported.
    """
    try:
        return _REGISTRY[spec.kind](spec)
    except KeyError:
        raise ValueError(f"Unsupported strategy kind: {spec.kind}") from None


__all__ = [
    "KINDS",
    "Predictions",
    "Strategy",
    "StrategyError",
    "StrategySpec",
    "Task",
    "load_strategies",
    "parse_strategies",
    "TakeTheBest",
    "Minimalist",
    "Tallying",
    "FastFrugalTreeStrategy",
    "OneCleverCue",
    "PlaySafe",
    "LinearStrategy",
    "LogisticStrategy",
    "get_strategy",
]
