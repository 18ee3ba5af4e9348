"""
Lexicographic paired-comparison heuristics: take-the-best and minimalist.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from envmodel import Environment
from fftbuild import compute_cue_stats, order_cues
from seeding import derive_seed
from toolbox import Choice, CueOrder, lexicographic_compare, random_order

from .base import CueBinarizer, Predictions, Strategy


class _Lexicographic(Strategy):
    comparison_only = True

    def __init__(self, spec):
        super().__init__(spec)
        self.binarizer = CueBinarizer() if spec.binarize else None
        self.subset: list[int] = []

    def _prepare(self, env: Environment) -> Environment:
        return self.binarizer.transform(env) if self.binarizer else env

    def fit(self, train: Environment) -> None:
        if self.binarizer:
            self.binarizer.fit(train)
        self.subset = self._cue_indices(train)

    def _order_for(self, env: Environment, seed: int) -> CueOrder:
        raise NotImplementedError

    def compare(self, env: Environment, pairs: Sequence[tuple[int, int]], tie_seeds: Sequence[int]) -> Predictions:
        prepared = self._prepare(env)
        values = prepared.values
        chosen = np.empty(len(pairs), dtype=np.int8)
        consulted = np.empty(len(pairs), dtype=np.int64)
        for k, ((i, j), seed) in enumerate(zip(pairs, tie_seeds)):
            order = self._order_for(prepared, seed)
            outcome = lexicographic_compare(values[i], values[j], order, derive_seed(seed, 0))
            chosen[k] = 1 if outcome.resolved is Choice.A else 0
            consulted[k] = outcome.cues_consulted
        return Predictions(chosen, consulted)


class TakeTheBest(_Lexicographic):
    """Cues in order of training validity (or max predictive value); first discriminating cue decides."""

    def __init__(self, spec):
        super().__init__(spec)
        self.order: CueOrder | None = None

    def fit(self, train: Environment) -> None:
        super().fit(train)
        full = order_cues(compute_cue_stats(self._prepare(train)), self.spec.ordering)
        self.order = CueOrder(tuple(entry for entry in full if entry[0] in self.subset))

    def _order_for(self, env: Environment, seed: int) -> CueOrder:
        return self.order


class Minimalist(_Lexicographic):
    """Cues in a fresh random order for every pair."""

    def _order_for(self, env: Environment, seed: int) -> CueOrder:
        return random_order(env, seed, self.subset)
