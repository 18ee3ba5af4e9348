"""
Full-information baselines wrapped as strategies.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from baselines import Model, fit_linear, fit_logistic, score_matrix
from envmodel import Environment
from seeding import fair_coin

from .base import Predictions, Strategy


class _Scoring(Strategy):
    model: Model | None = None

    def _scores(self, env: Environment) -> np.ndarray:
        return score_matrix(self.model, env.values)

    def classify(self, env: Environment) -> Predictions:
        labels = (self._scores(env) >= 0.5).astype(np.int8)
        return Predictions(labels, np.full(env.n_objects, env.n_cues, dtype=np.int64))

    def compare(self, env: Environment, pairs: Sequence[tuple[int, int]], tie_seeds: Sequence[int]) -> Predictions:
        """The higher score wins; exact ties go to a seeded coin."""
        scores = self._scores(env)
        chosen = np.empty(len(pairs), dtype=np.int8)
        for k, ((i, j), seed) in enumerate(zip(pairs, tie_seeds)):
            if scores[i] != scores[j]:
                chosen[k] = 1 if scores[i] > scores[j] else 0
            else:
                chosen[k] = 1 if fair_coin(seed) else 0
        return Predictions(chosen, np.full(len(pairs), env.n_cues, dtype=np.int64))


class LinearStrategy(_Scoring):
    def fit(self, train: Environment) -> None:
        self.model = fit_linear(train)


class LogisticStrategy(_Scoring):
    def fit(self, train: Environment) -> None:
        self.model = fit_logistic(train)
