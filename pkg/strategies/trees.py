"""
Classification heuristics: fast-and-frugal trees, one clever cue, and play-it-safe.
"""

from __future__ import annotations

import numpy as np

from envmodel import Environment
from fftbuild import CostRatio, FastFrugalTree, best_split, build_fft, classify_environment, compute_cue_stats, order_cues
from helpers import setup_logger
from toolbox import Comparison, Polarity, play_it_safe_classify, threshold_classify

from .base import Predictions, Strategy, StrategyError

logger = setup_logger(__name__)


class FastFrugalTreeStrategy(Strategy):
    def __init__(self, spec):
        super().__init__(spec)
        self.tree: FastFrugalTree | None = None

    def fit(self, train: Environment) -> None:
        env = train
        if self.spec.cues is not None:
            columns = self._cue_indices(train)
            env = train.with_values(train.values[:, columns], [train.cues[i] for i in columns])
        self.tree = build_fft(env, self.spec.ordering, self.spec.exit_policy, self.spec.max_depth,
                              CostRatio(self.spec.cost_fn, self.spec.cost_fp))

    def classify(self, env: Environment) -> Predictions:
        labels, depths = classify_environment(self.tree, env)
        return Predictions(labels, depths)


class OneCleverCue(Strategy):
    """Threshold on a single cue: the named one, or the most valid cue in training."""

    def __init__(self, spec):
        super().__init__(spec)
        self.cue: str | None = None
        self.threshold: float | None = None
        self.polarity = Polarity(spec.polarity)

    def fit(self, train: Environment) -> None:
        if self.spec.cues is not None:
            cue = self._cue_indices(train)[0]
        else:
            cue = order_cues(compute_cue_stats(train)).indices[0]
        self.cue = train.cue_names[cue]
        if self.spec.threshold is not None:
            self.threshold = self.spec.threshold
            return
        try:
            split = best_split(train.values[:, cue], train.criterion)
        except ValueError as e:
            raise StrategyError(self.name, f"cannot place a threshold on {self.cue!r}: {e}") from e
        self.threshold = split.threshold
        self.polarity = (Polarity.ABOVE_IS_POSITIVE if split.comparison is Comparison.GE
                         else Polarity.BELOW_IS_POSITIVE)
        logger.debug(f"[Threshold] {self.cue} at {self.threshold} ({self.polarity.value})")

    def classify(self, env: Environment) -> Predictions:
        column = env.column(self.cue)
        labels = np.array([int(threshold_classify(float(v), self.threshold, self.polarity)) for v in column],
                          dtype=np.int8)
        return Predictions(labels, np.ones(env.n_objects, dtype=np.int64))


class PlaySafe(Strategy):
    """Every case goes to the positive class; no cue is read."""

    def fit(self, train: Environment) -> None:
        pass

    def classify(self, env: Environment) -> Predictions:
        label = int(play_it_safe_classify())
        return Predictions(np.full(env.n_objects, label, dtype=np.int8), np.zeros(env.n_objects, dtype=np.int64))
