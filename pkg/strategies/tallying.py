"""
Tallying: unit weights over a cue subset, for paired comparison and classification.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from envmodel import Environment
from fftbuild import Binarization, ConstantCueError, SingleClassError, best_split
from seeding import derive_seed
from toolbox import Choice, Label, tally_compare

from .base import CueBinarizer, Predictions, Strategy


class Tallying(Strategy):
    """Count direction-adjusted cue values; classification cuts the tally at a trained threshold."""

    def __init__(self, spec):
        super().__init__(spec)
        self.binarizer = CueBinarizer() if spec.binarize else None
        self.subset: list[int] = []
        self.cut: Binarization | None = None
        self.fallback = Label.POSITIVE

    def _prepare(self, env: Environment) -> Environment:
        return self.binarizer.transform(env) if self.binarizer else env

    def _tallies(self, env: Environment) -> np.ndarray:
        return env.values[:, self.subset] @ env.directions[self.subset]

    def fit(self, train: Environment) -> None:
        if self.binarizer:
            self.binarizer.fit(train)
        self.subset = self._cue_indices(train)
        prepared = self._prepare(train)
        try:
            self.cut = best_split(self._tallies(prepared), prepared.criterion)
        except (ConstantCueError, SingleClassError):
            # no usable cut: everyone gets the training majority, ties positive
            self.cut = None
            positives = int(prepared.criterion.sum())
            self.fallback = Label.POSITIVE if 2 * positives >= prepared.n_objects else Label.NEGATIVE

    def classify(self, env: Environment) -> Predictions:
        tallies = self._tallies(self._prepare(env))
        if self.cut is None:
            labels = np.full(env.n_objects, int(self.fallback), dtype=np.int8)
        else:
            labels = self.cut.comparison.holds(tallies, self.cut.threshold).astype(np.int8)
        return Predictions(labels, np.full(env.n_objects, len(self.subset), dtype=np.int64))

    def compare(self, env: Environment, pairs: Sequence[tuple[int, int]], tie_seeds: Sequence[int]) -> Predictions:
        prepared = self._prepare(env)
        values, directions = prepared.values, prepared.directions
        chosen = np.empty(len(pairs), dtype=np.int8)
        for k, ((i, j), seed) in enumerate(zip(pairs, tie_seeds)):
            outcome = tally_compare(values[i], values[j], self.subset, directions, derive_seed(seed, 0))
            chosen[k] = 1 if outcome.resolved is Choice.A else 0
        return Predictions(chosen, np.full(len(pairs), len(self.subset), dtype=np.int64))
