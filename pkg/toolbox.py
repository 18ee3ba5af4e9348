"""
The adaptive toolbox: executable fast-and-frugal heuristics.

Each heuristic is a search rule (which cues, in what order), a stopping rule
(when to stop looking) and a decision rule (how to use what was found). Every
outcome reports how much information was consumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from envmodel import Environment
from helpers import setup_logger
from seeding import fair_coin, make_rng

if TYPE_CHECKING:
    from fftbuild import FastFrugalTree

logger = setup_logger(__name__)


class UnknownObjectError(KeyError):
    """An object id is not part of the environment."""


class EmptyOrderError(ValueError):
    """A search order (or cue subset) has no cues."""


class NonFiniteInputError(ValueError):
    """A value or threshold is NaN or infinite."""


class MissingCueError(KeyError):
    """A classifier needs a cue value the caller did not supply."""


# ==============================================================================
# Outcome types
# ==============================================================================

class Label(IntEnum):
    NEGATIVE = 0
    POSITIVE = 1

    @classmethod
    def parse(cls, text: str) -> "Label":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"Unknown label: {text!r}") from None

    def __str__(self) -> str:
        return self.name.lower()


class Choice(str, Enum):
    A = "A"
    B = "B"
    GUESS = "Guess"


class Polarity(str, Enum):
    ABOVE_IS_POSITIVE = "above_is_positive"
    BELOW_IS_POSITIVE = "below_is_positive"


class Comparison(str, Enum):
    GE = ">="
    LT = "<"

    def holds(self, value: float, threshold: float) -> bool:
        if self is Comparison.GE:
            return value >= threshold
        return value < threshold

    def negated(self) -> "Comparison":
        return Comparison.LT if self is Comparison.GE else Comparison.GE


@dataclass(frozen=True)
class CueOrder:
    """Ordered (cue index, direction) pairs consulted by lexicographic heuristics."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        entries = tuple((int(i), int(d)) for i, d in self.entries)
        indices = [i for i, _ in entries]
        if len(set(indices)) != len(indices):
            raise ValueError(f"Cue order repeats a cue: {indices}")
        if any(d not in (1, -1) for _, d in entries):
            raise ValueError("Cue order directions must be +1 or -1")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_indices(cls, env: Environment, indices: Sequence[int]) -> "CueOrder":
        """Order using the environment's declared cue directions."""
        return cls(tuple((i, env.cues[i].direction) for i in indices))

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def check(self, n_cues: int) -> None:
        if not self.entries:
            raise EmptyOrderError("Cue order is empty")
        bad = [i for i in self.indices if not 0 <= i < n_cues]
        if bad:
            raise ValueError(f"Cue indices {bad} out of range for {n_cues} cues")


@dataclass(frozen=True)
class InferenceOutcome:
    choice: Choice
    deciding_cue: int | None
    cues_consulted: int
    resolved: Choice

    def __post_init__(self):
        if (self.choice is Choice.GUESS) != (self.deciding_cue is None):
            raise ValueError("A guess has no deciding cue and every non-guess has one")
        if self.resolved is Choice.GUESS:
            raise ValueError("resolved must name A or B")


@dataclass(frozen=True)
class ClassificationOutcome:
    label: Label
    exit_depth: int
    cues_consulted: int

    def __post_init__(self):
        if self.cues_consulted != self.exit_depth:
            raise ValueError("cues_consulted must equal exit_depth")


def _guess(cues_consulted: int, tie_seed: int) -> InferenceOutcome:
    resolved = Choice.A if fair_coin(tie_seed) else Choice.B
    return InferenceOutcome(Choice.GUESS, None, cues_consulted, resolved)


def _decided(choice: Choice, cue: int, consulted: int) -> InferenceOutcome:
    return InferenceOutcome(choice, cue, consulted, choice)


def _resolve_pair(env: Environment, a: str, b: str) -> tuple[np.ndarray, np.ndarray]:
    if a == b:
        raise ValueError(f"Paired comparison needs two distinct objects, got {a!r} twice")
    rows = []
    for object_id in (a, b):
        try:
            rows.append(env.row(object_id))
        except KeyError:
            raise UnknownObjectError(f"Unknown object id: {object_id!r}") from None
    return rows[0], rows[1]


# ==============================================================================
# Paired comparison
# ==============================================================================

def lexicographic_compare(a_values: Sequence[float], b_values: Sequence[float], order: CueOrder,
                          tie_seed: int) -> InferenceOutcome:
    """Search cues in order, stop at the first one that discriminates, pick the higher."""
    if not order.entries:
        raise EmptyOrderError("Cue order is empty")
    for position, (cue, direction) in enumerate(order, start=1):
        a_value = direction * a_values[cue]
        b_value = direction * b_values[cue]
        if a_value != b_value:
            return _decided(Choice.A if a_value > b_value else Choice.B, cue, position)
    return _guess(len(order), tie_seed)


def ttb_compare(env: Environment, order: CueOrder, a: str, b: str, tie_seed: int) -> InferenceOutcome:
    """Take-the-best: consult cues by validity, decide on the first discriminating cue."""
    a_values, b_values = _resolve_pair(env, a, b)
    order.check(env.n_cues)
    return lexicographic_compare(a_values, b_values, order, tie_seed)


def tally_compare(a_values: Sequence[float], b_values: Sequence[float], cue_subset: Sequence[int],
                  directions: Sequence[float], tie_seed: int) -> InferenceOutcome:
    """Unit-weight sums of direction-adjusted values; the larger tally wins."""
    if len(cue_subset) == 0:
        raise EmptyOrderError("cue_subset is empty")
    a_tally = sum(directions[c] * a_values[c] for c in cue_subset)
    b_tally = sum(directions[c] * b_values[c] for c in cue_subset)
    if a_tally == b_tally:
        return _guess(len(cue_subset), tie_seed)
    # the tally is settled only once the last cue has been added
    last = max(cue_subset)
    return _decided(Choice.A if a_tally > b_tally else Choice.B, last, len(cue_subset))


def tallying_compare(env: Environment, cue_subset: Sequence[int], a: str, b: str,
                     tie_seed: int) -> InferenceOutcome:
    """Tallying: weight every cue in the subset equally."""
    a_values, b_values = _resolve_pair(env, a, b)
    if len(cue_subset) == 0:
        raise EmptyOrderError("cue_subset is empty")
    if len(set(cue_subset)) != len(cue_subset):
        raise ValueError(f"cue_subset repeats a cue: {list(cue_subset)}")
    CueOrder.from_indices(env, list(cue_subset)).check(env.n_cues)
    return tally_compare(a_values, b_values, cue_subset, env.directions, tie_seed)


def random_order(env: Environment, search_seed: int, cue_subset: Sequence[int] | None = None) -> CueOrder:
    """Cues in a seeded random order (the minimalist search rule)."""
    indices = list(cue_subset) if cue_subset is not None else list(range(env.n_cues))
    permuted = make_rng(search_seed).permutation(len(indices))
    return CueOrder.from_indices(env, [indices[i] for i in permuted])


def minimalist_compare(env: Environment, a: str, b: str, search_seed: int, tie_seed: int,
                       cue_subset: Sequence[int] | None = None) -> InferenceOutcome:
    """Search cues in random order and decide on the first one that discriminates."""
    a_values, b_values = _resolve_pair(env, a, b)
    order = random_order(env, search_seed, cue_subset)
    order.check(env.n_cues)
    return lexicographic_compare(a_values, b_values, order, tie_seed)


# ==============================================================================
# Classification
# ==============================================================================

def _cue_value(cue_values: Mapping[str, float] | Sequence[float], name: str, index: int) -> float:
    if isinstance(cue_values, Mapping):
        if name not in cue_values:
            raise MissingCueError(f"Missing value for cue {name!r}")
        return cue_values[name]
    if not 0 <= index < len(cue_values):
        raise MissingCueError(f"Missing value for cue {name!r} (index {index})")
    return cue_values[index]


def fft_classify(tree: "FastFrugalTree", cue_values: Mapping[str, float] | Sequence[float]) -> ClassificationOutcome:
    """Walk the tree; exit at the first node whose exit condition holds."""
    for depth, node in enumerate(tree.nodes, start=1):
        value = _cue_value(cue_values, node.cue_name, node.cue)
        if node.comparison.holds(value, node.threshold):
            return ClassificationOutcome(node.exit_label, depth, depth)
    final = tree.final
    depth = len(tree.nodes) + 1
    value = _cue_value(cue_values, final.cue_name, final.cue)
    label = final.hit_label if final.comparison.holds(value, final.threshold) else final.miss_label
    return ClassificationOutcome(label, depth, depth)


def threshold_classify(value: float, threshold: float, polarity: Polarity = Polarity.ABOVE_IS_POSITIVE) -> Label:
    """One-clever-cue classification; the boundary belongs to the positive side."""
    if not (math.isfinite(value) and math.isfinite(threshold)):
        raise NonFiniteInputError(f"Non-finite input: value={value}, threshold={threshold}")
    if Polarity(polarity) is Polarity.ABOVE_IS_POSITIVE:
        return Label.POSITIVE if value >= threshold else Label.NEGATIVE
    return Label.POSITIVE if value <= threshold else Label.NEGATIVE


def play_it_safe_classify() -> Label:
    """Send every case to the positive class without looking at any cue."""
    return Label.POSITIVE


# ==============================================================================
# Selection
# ==============================================================================

def top_k_with_ties(scores: Mapping[str, float], k: int) -> set[str]:
    """The k best-scoring ids, extended with every id tied at the boundary score."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(scores) <= k:
        return set(scores)
    ranked = sorted(scores.values(), reverse=True)
    boundary = ranked[k - 1]
    return {object_id for object_id, score in scores.items() if score >= boundary}


def top_fraction_select(scores: Mapping[str, float], fraction: float) -> set[str]:
    """Top X%: smallest descending prefix of size >= ceil(fraction * n), ties kept together."""
    if not scores:
        raise ValueError("scores must be nonempty")
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    k = max(1, math.ceil(fraction * len(scores) - 1e-9))
    return top_k_with_ties(scores, k)


@dataclass(frozen=True)
class SatisficingResult:
    choice: str | None
    examined: int


def _meets(option_id: str, values: Mapping[str, float], thresholds: Mapping[str, float]) -> bool:
    for cue, minimum in thresholds.items():
        if cue not in values:
            raise MissingCueError(f"Option {option_id!r} has no value for cue {cue!r}")
        if values[cue] < minimum:
            return False
    return True


def satisficing_select(options: Sequence[tuple[str, Mapping[str, float]]],
                       thresholds: Mapping[str, float]) -> SatisficingResult:
    """Pick the first option meeting every aspiration level."""
    for examined, (option_id, values) in enumerate(options, start=1):
        if _meets(option_id, values, thresholds):
            return SatisficingResult(option_id, examined)
    return SatisficingResult(None, len(options))


def aspiration_filter(options: Sequence[tuple[str, Mapping[str, float]]],
                      thresholds: Mapping[str, float]) -> list[str]:
    """Every option meeting all aspiration levels, in the given order."""
    return [option_id for option_id, values in options if _meets(option_id, values, thresholds)]
