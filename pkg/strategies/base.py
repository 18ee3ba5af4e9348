"""
Base class for benchmarked strategies.
Provides a common interface for heuristics and baselines run by the harness.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from envmodel import CueDefinition, CueKind, Environment
from fftbuild import Binarization, ConstantCueError, CostRatio, ExitPolicy, OrderingRule, SingleClassError, best_split
from seeding import fair_coin
from toolbox import Polarity

KINDS = ("ttb", "tallying", "minimalist", "fft", "threshold", "linear", "logistic", "play_safe")


class StrategyError(RuntimeError):
    """A strategy failed to fit or evaluate; carries the strategy name."""

    def __init__(self, strategy: str, message: str):
        super().__init__(f"{strategy}: {message}")
        self.strategy = strategy


class Task(str, Enum):
    CLASSIFICATION = "classification"
    COMPARISON = "comparison"


@dataclass(frozen=True)
class StrategySpec:
    """A strategy kind plus its parameters; `name` labels it in reports."""

    kind: str
    name: str | None = None
    ordering: str = "validity"
    exit_policy: str = "max"
    max_depth: int = 3
    cost_fn: float = 1.0
    cost_fp: float = 1.0
    cues: tuple[str, ...] | None = None
    threshold: float | None = None
    polarity: str = "above_is_positive"
    binarize: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown strategy kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "name", self.name or self.kind)
        object.__setattr__(self, "ordering", OrderingRule.parse(self.ordering).value)
        object.__setattr__(self, "exit_policy", ExitPolicy.parse(self.exit_policy).value)
        object.__setattr__(self, "polarity", Polarity(self.polarity).value)
        if self.cues is not None:
            object.__setattr__(self, "cues", tuple(self.cues))
            if not self.cues:
                raise ValueError(f"{self.name}: cues must be nonempty when given")
        if self.max_depth < 1:
            raise ValueError(f"{self.name}: max_depth must be >= 1")
        CostRatio(self.cost_fn, self.cost_fp)
        if self.threshold is not None and not math.isfinite(self.threshold):
            raise ValueError(f"{self.name}: threshold must be finite")
        if self.kind == "threshold" and self.cues is not None and len(self.cues) != 1:
            raise ValueError(f"{self.name}: a threshold strategy reads exactly one cue")
        if self.threshold is not None and self.kind != "threshold":
            raise ValueError(f"{self.name}: only threshold strategies take a threshold")

    @classmethod
    def from_dict(cls, data: dict) -> "StrategySpec":
        allowed = set(cls.__dataclass_fields__)
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"Unknown strategy fields: {sorted(unknown)}")
        if "kind" not in data:
            raise ValueError("Every strategy needs a 'kind'")
        return cls(**data)

    def to_dict(self) -> dict:
        data = asdict(self)
        if data["cues"] is not None:
            data["cues"] = list(data["cues"])
        return data


def parse_strategies(text: str) -> list[StrategySpec]:
    """Parse a JSON list of strategy objects."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"Strategy file is not valid JSON: {e}") from e
    if not isinstance(data, list) or not data:
        raise ValueError("Strategy file must hold a nonempty JSON list")
    specs = [StrategySpec.from_dict(item) for item in data]
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ValueError(f"Strategy names must be unique: {names}")
    return specs


def load_strategies(path: str) -> list[StrategySpec]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_strategies(f.read())


@dataclass(frozen=True, eq=False)
class Predictions:
    """Per-object labels (classification) or first-object-chosen flags (comparison)."""

    labels: np.ndarray
    cues_consulted: np.ndarray


class CueBinarizer:
    """Training-set split points applied to every cue with two or more distinct values.

    Binarized cues take 1 on the criterion-positive side, so their direction is +1.
    Cues that cannot be split (constant, or single-class training data) keep
    their raw values and declared direction.
    """

    def __init__(self):
        self.splits: list[Binarization | None] = []

    def fit(self, train: Environment) -> "CueBinarizer":
        self.splits = []
        for cue in range(train.n_cues):
            try:
                self.splits.append(best_split(train.values[:, cue], train.criterion))
            except (ConstantCueError, SingleClassError):
                self.splits.append(None)
        return self

    def transform(self, env: Environment) -> Environment:
        values = np.array(env.values, dtype=float)
        cues = list(env.cues)
        for cue, split in enumerate(self.splits):
            if split is None:
                continue
            values[:, cue] = split.comparison.holds(values[:, cue], split.threshold).astype(float)
            cues[cue] = CueDefinition(name=cues[cue].name, kind=CueKind.BINARY, direction=1)
        return env.with_values(values, cues)


class Strategy(ABC):
    """Abstract base class for strategies evaluated by the harness."""

    comparison_only = False

    def __init__(self, spec: StrategySpec):
        self.spec = spec

    @property
    def name(self) -> str:
        return self.spec.name

    @abstractmethod
    def fit(self, train: Environment) -> None:
        """
        Learn whatever the strategy needs from the training environment.

        Args:
            train: Training environment.
        """
        pass

    def classify(self, env: Environment) -> Predictions:
        """
        Label every object of an environment.

        Args:
            env: Environment sharing the training cues.

        Returns:
            Labels and cues consulted per object.
        """
        raise StrategyError(self.name, "is a paired-comparison heuristic and cannot classify")

    def compare(self, env: Environment, pairs: Sequence[tuple[int, int]], tie_seeds: Sequence[int]) -> Predictions:
        """
        Infer which object of each pair is criterion-positive.

        Classifiers prefer the object labelled positive and guess when both
        labels agree; cues consulted is the larger of the two exit depths.
        """
        predictions = self.classify(env)
        labels = predictions.labels
        chosen = np.empty(len(pairs), dtype=np.int8)
        consulted = np.empty(len(pairs), dtype=np.int64)
        for k, ((i, j), seed) in enumerate(zip(pairs, tie_seeds)):
            if labels[i] != labels[j]:
                chosen[k] = 1 if labels[i] > labels[j] else 0
            else:
                chosen[k] = 1 if fair_coin(seed) else 0
            consulted[k] = max(predictions.cues_consulted[i], predictions.cues_consulted[j])
        return Predictions(chosen, consulted)

    def _cue_indices(self, env: Environment) -> list[int]:
        if self.spec.cues is None:
            return list(range(env.n_cues))
        try:
            return [env.cue_index(name) for name in self.spec.cues]
        except KeyError as e:
            raise StrategyError(self.name, str(e)) from None
