"""
Fast-and-frugal tree construction.

Cue statistics (validity, predictive values), numeric-cue binarization, cue
ordering, exit assignment and cost tuning. Trees serialise to a line-oriented
text form:

    st_change >= 0.5 -> EXIT(positive)
    chest_pain_chief < 0.5 -> EXIT(negative)
    any_sign >= 0.5 -> EXIT(positive) | EXIT(negative)
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from envmodel import Environment
from helpers import setup_logger
from toolbox import Comparison, CueOrder, Label

logger = setup_logger(__name__)


class SingleClassError(ValueError):
    """Training data contains only one criterion class."""


class ConstantCueError(ValueError):
    """A cue has fewer than two distinct values."""


class TreeFormatError(ValueError):
    """Tree text could not be parsed."""


# ==============================================================================
# Cue statistics
# ==============================================================================

@dataclass(frozen=True)
class CueStat:
    cue: int
    name: str
    direction: int
    validity: float
    discrimination_rate: float
    ppv: float | None
    npv: float | None
    hit_rate: float | None
    false_alarm_rate: float | None
    threshold: float | None
    comparison: Comparison | None

    @property
    def constant(self) -> bool:
        return self.discrimination_rate == 0.0

    @property
    def max_predictive_value(self) -> float:
        values = [v for v in (self.ppv, self.npv) if v is not None]
        return max(values) if values else -1.0


@dataclass(frozen=True)
class Binarization:
    threshold: float
    comparison: Comparison


def _ratio(numerator: int, denominator: int) -> float | None:
    return numerator / denominator if denominator else None


def pair_counts(values: np.ndarray, criterion: np.ndarray) -> tuple[int, int]:
    """(correct, wrong) over pairs with unequal criterion where the values differ.

    A pair is correct when the criterion-positive object has the higher value.
    """
    positives = values[criterion == 1]
    negatives = np.sort(values[criterion == 0])
    if positives.size == 0 or negatives.size == 0:
        return 0, 0
    below = np.searchsorted(negatives, positives, side="left")
    above = negatives.size - np.searchsorted(negatives, positives, side="right")
    return int(below.sum()), int(above.sum())


def discrimination_rate(values: np.ndarray) -> float:
    """Share of all object pairs on which the cue takes different values."""
    n = values.size
    total = n * (n - 1) // 2
    if total == 0:
        return 0.0
    _, counts = np.unique(values, return_counts=True)
    tied = int((counts * (counts - 1) // 2).sum())
    return (total - tied) / total


def best_split(values: np.ndarray, criterion: np.ndarray) -> Binarization:
    """Threshold maximising balanced accuracy over midpoints of sorted distinct values.

    Ties go to the smaller threshold, and to >= over < at the same threshold.
    """
    distinct = np.unique(values)
    if distinct.size < 2:
        raise ConstantCueError("Cannot binarize a constant cue")
    y = criterion == 1
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("Binarization needs both criterion classes")
    positives = np.sort(values[y])
    negatives = np.sort(values[~y])
    midpoints = (distinct[:-1] + distinct[1:]) / 2.0
    # predicted positive when value >= threshold
    tp = n_pos - np.searchsorted(positives, midpoints, side="left")
    tn = np.searchsorted(negatives, midpoints, side="left")
    # balanced accuracy scaled by 2 * n_pos * n_neg, exact in integers
    ge_scores = tp * n_neg + tn * n_pos
    lt_scores = 2 * n_pos * n_neg - ge_scores

    best: tuple[int, float, Comparison] | None = None
    for threshold, ge, lt in zip(midpoints, ge_scores, lt_scores):
        for score, comparison in ((int(ge), Comparison.GE), (int(lt), Comparison.LT)):
            if best is None or score > best[0]:
                best = (score, float(threshold), comparison)
    return Binarization(threshold=best[1], comparison=best[2])


def binarize_cue(env: Environment, cue: int) -> Binarization:
    """Split point (threshold, comparison) for one cue of a training environment."""
    try:
        return best_split(env.values[:, cue], env.criterion)
    except ConstantCueError:
        raise ConstantCueError(f"Cue {env.cues[cue].name!r} is constant") from None


def compute_cue_stats(env: Environment) -> tuple[CueStat, ...]:
    """Validity, discrimination rate and binarized predictive values for every cue."""
    stats = []
    both_classes = env.has_both_classes()
    y = env.criterion == 1
    for cue, definition in enumerate(env.cues):
        column = env.values[:, cue]
        correct, wrong = pair_counts(definition.direction * column, env.criterion)
        validity = correct / (correct + wrong) if correct + wrong else 0.5
        rate = discrimination_rate(column)

        ppv = npv = hit_rate = false_alarm = None
        threshold = comparison = None
        if both_classes and rate > 0.0:
            split = best_split(column, env.criterion)
            threshold, comparison = split.threshold, split.comparison
            predicted = comparison.holds(column, threshold)
            tp = int((predicted & y).sum())
            fp = int((predicted & ~y).sum())
            tn = int((~predicted & ~y).sum())
            fn = int((~predicted & y).sum())
            ppv, npv = _ratio(tp, tp + fp), _ratio(tn, tn + fn)
            hit_rate, false_alarm = _ratio(tp, tp + fn), _ratio(fp, fp + tn)
        stats.append(CueStat(
            cue=cue, name=definition.name, direction=definition.direction,
            validity=validity, discrimination_rate=rate,
            ppv=ppv, npv=npv, hit_rate=hit_rate, false_alarm_rate=false_alarm,
            threshold=threshold, comparison=comparison,
        ))
    if not both_classes:
        logger.warning("[FFT] Single-class environment: predictive values are undefined")
    return tuple(stats)


# ==============================================================================
# Ordering
# ==============================================================================

class OrderingRule(str, Enum):
    BY_VALIDITY = "validity"
    BY_MAX_PREDICTIVE_VALUE = "maxpv"

    @classmethod
    def parse(cls, text: "str | OrderingRule") -> "OrderingRule":
        if isinstance(text, OrderingRule):
            return text
        aliases = {"by_validity": "validity", "by_max_predictive_value": "maxpv", "max_predictive_value": "maxpv"}
        return cls(aliases.get(text, text))


def order_cues(stats: Sequence[CueStat], rule: OrderingRule | str = OrderingRule.BY_VALIDITY) -> CueOrder:
    """Descending validity or max(ppv, npv); constant cues last, ties by cue index."""
    if not stats:
        raise ValueError("order_cues needs statistics for at least one cue")
    rule = OrderingRule.parse(rule)
    if rule is OrderingRule.BY_VALIDITY:
        key = lambda s: (s.constant, -s.validity, s.cue)
    else:
        key = lambda s: (s.constant, -s.max_predictive_value, s.cue)
    return CueOrder(tuple((s.cue, s.direction) for s in sorted(stats, key=key)))


# ==============================================================================
# Trees
# ==============================================================================

class ExitPolicy(str, Enum):
    ZIGZAG = "zigzag"
    MAX_SIDE = "max"

    @classmethod
    def parse(cls, text: "str | ExitPolicy") -> "ExitPolicy":
        if isinstance(text, ExitPolicy):
            return text
        return cls({"max_side": "max"}.get(text, text))


@dataclass(frozen=True)
class CostRatio:
    cost_fn: float = 1.0
    cost_fp: float = 1.0

    def __post_init__(self):
        if not (self.cost_fn > 0 and self.cost_fp > 0):
            raise ValueError(f"Costs must be positive, got fn={self.cost_fn}, fp={self.cost_fp}")


NEUTRAL_COSTS = CostRatio(1.0, 1.0)


@dataclass(frozen=True)
class TreeNode:
    cue: int
    cue_name: str
    threshold: float
    comparison: Comparison
    exit_label: Label


@dataclass(frozen=True)
class FinalNode:
    cue: int
    cue_name: str
    threshold: float
    comparison: Comparison
    hit_label: Label
    miss_label: Label


@dataclass(frozen=True)
class FastFrugalTree:
    """One exit per non-final node; the final node exits on both branches."""

    nodes: tuple[TreeNode, ...]
    final: FinalNode

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))

    @property
    def depth(self) -> int:
        return len(self.nodes) + 1

    @property
    def cue_names(self) -> tuple[str, ...]:
        return tuple(n.cue_name for n in self.nodes) + (self.final.cue_name,)

    def check(self, env: Environment) -> None:
        """Every referenced cue must exist in the environment."""
        missing = [name for name in self.cue_names if name not in env.cue_names]
        if missing:
            raise KeyError(f"Tree references cues absent from the environment: {missing}")


def green_mehr_tree() -> FastFrugalTree:
    """The coronary-care unit allocation tree.

    (1) ST-segment change -> coronary care; (2) otherwise, chest pain not the
    chief complaint -> regular bed; (3) otherwise any other sign -> coronary
    care, else regular bed. Cue indices follow fixtures/green_mehr.csv with the
    composite any_sign cue appended.
    """
    return FastFrugalTree(
        nodes=(
            TreeNode(0, "st_change", 0.5, Comparison.GE, Label.POSITIVE),
            TreeNode(1, "chest_pain_chief", 0.5, Comparison.LT, Label.NEGATIVE),
        ),
        final=FinalNode(7, "any_sign", 0.5, Comparison.GE, Label.POSITIVE, Label.NEGATIVE),
    )


GREEN_MEHR_SIGNS = ("s1", "s2", "s3", "s4", "s5")


def _confusion_counts(hit: np.ndarray, y: np.ndarray) -> tuple[int, int, int, int]:
    return (int((hit & y).sum()), int((hit & ~y).sum()),
            int((~hit & ~y).sum()), int((~hit & y).sum()))


def _weighted_label(positive_weight: float, negative_weight: float, costs: CostRatio) -> Label:
    if positive_weight != negative_weight:
        return Label.POSITIVE if positive_weight > negative_weight else Label.NEGATIVE
    return Label.POSITIVE if costs.cost_fn >= costs.cost_fp else Label.NEGATIVE


def _branch_label(positives: int, negatives: int, n_pos: int, n_neg: int, costs: CostRatio) -> Label:
    """Cost-weighted majority with each class weighted by its inverse training prevalence."""
    return _weighted_label(costs.cost_fn * positives * n_neg, costs.cost_fp * negatives * n_pos, costs)


def _positive_exit(ppv: float | None, npv: float | None, costs: CostRatio) -> bool:
    return costs.cost_fn * (ppv or 0.0) >= costs.cost_fp * (npv or 0.0)


def _max_side_exit(cell: tuple[int, int, int, int], n_pos: int, n_neg: int, costs: CostRatio) -> bool:
    """True for a positive exit on the hit side, False for a negative exit on the miss side.

    When only one branch carries the label its exit would give, that branch
    exits; otherwise the cost-weighted ppv/npv comparison decides.
    """
    tp, fp, tn, fn = cell
    hit_positive = _branch_label(tp, fp, n_pos, n_neg, costs) is Label.POSITIVE
    miss_negative = _branch_label(fn, tn, n_pos, n_neg, costs) is Label.NEGATIVE
    if hit_positive != miss_negative:
        return hit_positive
    return _positive_exit(_ratio(tp, tp + fp), _ratio(tn, tn + fn), costs)


def build_fft(train: Environment, ordering: OrderingRule | str = OrderingRule.BY_VALIDITY,
              exit_policy: ExitPolicy | str = ExitPolicy.MAX_SIDE, max_depth: int = 3,
              costs: CostRatio = NEUTRAL_COSTS) -> FastFrugalTree:
    """Binarize, order and truncate cues, then assign exits.

    Branch counts are measured on the training residue reaching each node along
    the cost-neutral path, so costs only move decisions. Branch labels are
    majorities weighted by cost and by inverse class prevalence; under max side
    a node whose residue reverses the cue's training direction is read with
    its sides swapped. This keeps two properties: a deeper tree never has lower
    training balanced accuracy at neutral costs, and the predicted-positive set
    only grows with cost_fn.
    """
    if not train.has_both_classes():
        raise SingleClassError("build_fft needs both criterion classes in the training data")
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    exit_policy = ExitPolicy.parse(exit_policy)

    stats = compute_cue_stats(train)
    usable = [s.cue for s in stats if not s.constant]
    if not usable:
        raise ConstantCueError("Every cue is constant; no tree can be built")
    order = [cue for cue in order_cues(stats, ordering).indices if cue in usable]
    if max_depth > len(order):
        logger.warning(f"[FFT] max_depth {max_depth} exceeds {len(order)} usable cues; clamping")
    chosen = order[:max_depth]

    y = train.criterion == 1
    n_pos, n_neg = int(y.sum()), int((~y).sum())

    # counts along the cost-neutral path
    residue = np.ones(train.n_objects, dtype=bool)
    counts = []
    swapped = []
    neutral_first = None
    for k, cue in enumerate(chosen):
        hit = stats[cue].comparison.holds(train.values[:, cue], stats[cue].threshold)
        cell = _confusion_counts(hit[residue], y[residue])
        last = k == len(chosen) - 1
        swap = (not last and exit_policy is ExitPolicy.MAX_SIDE
                and _branch_label(cell[0], cell[1], n_pos, n_neg, NEUTRAL_COSTS) is Label.NEGATIVE
                and _branch_label(cell[3], cell[2], n_pos, n_neg, NEUTRAL_COSTS) is Label.POSITIVE)
        if swap:
            hit = ~hit
            cell = (cell[3], cell[2], cell[1], cell[0])
        counts.append(cell)
        swapped.append(swap)
        if last:
            break
        if exit_policy is ExitPolicy.ZIGZAG:
            tp, fp, tn, fn = cell
            if neutral_first is None:
                neutral_first = _positive_exit(_ratio(tp, tp + fp), _ratio(tn, tn + fn), NEUTRAL_COSTS)
            positive = neutral_first if k % 2 == 0 else not neutral_first
        else:
            positive = _max_side_exit(cell, n_pos, n_neg, NEUTRAL_COSTS)
        residue &= ~hit if positive else hit

    nodes = []
    first_side = None
    for k, cue in enumerate(chosen[:-1]):
        if exit_policy is ExitPolicy.ZIGZAG:
            tp, fp, tn, fn = counts[k]
            if first_side is None:
                first_side = _positive_exit(_ratio(tp, tp + fp), _ratio(tn, tn + fn), costs)
            positive = first_side if k % 2 == 0 else not first_side
        else:
            positive = _max_side_exit(counts[k], n_pos, n_neg, costs)
        stat = stats[cue]
        hit_side = stat.comparison.negated() if swapped[k] else stat.comparison
        nodes.append(TreeNode(
            cue=cue, cue_name=stat.name, threshold=stat.threshold,
            comparison=hit_side if positive else hit_side.negated(),
            exit_label=Label.POSITIVE if positive else Label.NEGATIVE,
        ))

    last = stats[chosen[-1]]
    tp, fp, tn, fn = counts[-1]
    final = FinalNode(
        cue=last.cue, cue_name=last.name, threshold=last.threshold, comparison=last.comparison,
        hit_label=_branch_label(tp, fp, n_pos, n_neg, costs),
        miss_label=_branch_label(fn, tn, n_pos, n_neg, costs),
    )
    tree = FastFrugalTree(tuple(nodes), final)
    logger.debug(f"[FFT] Built depth-{tree.depth} tree on {tree.cue_names}")
    return tree


def classify_environment(tree: FastFrugalTree, env: Environment) -> tuple[np.ndarray, np.ndarray]:
    """Labels and exit depths for every object (cues looked up by name)."""
    tree.check(env)
    labels = np.zeros(env.n_objects, dtype=np.int8)
    depths = np.zeros(env.n_objects, dtype=np.int64)
    undecided = np.ones(env.n_objects, dtype=bool)
    for depth, node in enumerate(tree.nodes, start=1):
        exits = undecided & node.comparison.holds(env.column(node.cue_name), node.threshold)
        labels[exits] = int(node.exit_label)
        depths[exits] = depth
        undecided &= ~exits
    final = tree.final
    hit = final.comparison.holds(env.column(final.cue_name), final.threshold)
    labels[undecided & hit] = int(final.hit_label)
    labels[undecided & ~hit] = int(final.miss_label)
    depths[undecided] = tree.depth
    return labels, depths


@dataclass(frozen=True)
class TunedTree:
    tree: FastFrugalTree
    costs: CostRatio
    weighted_errors: tuple[float, ...]


def tune_fft_cost(train: Environment, validation: Environment | None, candidate_costs: Sequence[CostRatio],
                  ordering: OrderingRule | str = OrderingRule.BY_VALIDITY,
                  exit_policy: ExitPolicy | str = ExitPolicy.MAX_SIDE, max_depth: int = 3,
                  reference: CostRatio = NEUTRAL_COSTS) -> TunedTree:
    """Build one tree per candidate ratio and keep the one with the lowest validation cost.

    Validation cost is reference.cost_fn * fn + reference.cost_fp * fp; ties go to
    the earliest candidate.
    """
    if not candidate_costs:
        raise ValueError("tune_fft_cost needs at least one candidate cost ratio")
    if validation is None or validation.n_objects == 0:
        raise ValueError("tune_fft_cost needs a nonempty validation environment")
    y = validation.criterion == 1
    best = None
    errors = []
    for costs in candidate_costs:
        tree = build_fft(train, ordering, exit_policy, max_depth, costs)
        predicted, _ = classify_environment(tree, validation)
        predicted = predicted == 1
        fn = int((~predicted & y).sum())
        fp = int((predicted & ~y).sum())
        cost = reference.cost_fn * fn + reference.cost_fp * fp
        errors.append(cost)
        if best is None or cost < best[0]:
            best = (cost, tree, costs)
    logger.info(f"[FFT] Tuned over {len(candidate_costs)} cost ratios; chose fn={best[2].cost_fn}, fp={best[2].cost_fp}")
    return TunedTree(tree=best[1], costs=best[2], weighted_errors=tuple(errors))


# ==============================================================================
# Text codec
# ==============================================================================

_NODE_RE = re.compile(
    r"^(?P<cue>\S+)\s+(?P<op>>=|<)\s+(?P<thr>\S+)\s+->\s+EXIT\((?P<first>positive|negative)\)"
    r"(?:\s*\|\s*EXIT\((?P<second>positive|negative)\))?\s*$"
)


def tree_to_text(tree: FastFrugalTree) -> str:
    lines = [f"{n.cue_name} {n.comparison.value} {n.threshold!r} -> EXIT({n.exit_label})" for n in tree.nodes]
    f = tree.final
    lines.append(f"{f.cue_name} {f.comparison.value} {f.threshold!r} -> EXIT({f.hit_label}) | EXIT({f.miss_label})")
    return "\n".join(lines) + "\n"


def tree_from_text(text: str, cue_names: Sequence[str] | None = None) -> FastFrugalTree:
    """Parse the line form; cue indices come from cue_names, else order of appearance."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise TreeFormatError("Tree text is empty")
    seen: list[str] = []

    def index_of(name: str, line_no: int) -> int:
        if cue_names is not None:
            if name not in cue_names:
                raise TreeFormatError(f"Line {line_no}: unknown cue {name!r}")
            return list(cue_names).index(name)
        if name not in seen:
            seen.append(name)
        return seen.index(name)

    nodes = []
    final = None
    for line_no, line in enumerate(lines, start=1):
        match = _NODE_RE.match(line)
        if not match:
            raise TreeFormatError(f"Line {line_no}: cannot parse {line!r}")
        try:
            threshold = float(match["thr"])
        except ValueError:
            raise TreeFormatError(f"Line {line_no}: threshold {match['thr']!r} is not a number") from None
        if not math.isfinite(threshold):
            raise TreeFormatError(f"Line {line_no}: non-finite threshold")
        is_last = line_no == len(lines)
        if (match["second"] is not None) != is_last:
            raise TreeFormatError(f"Line {line_no}: only the final line carries two exits")
        cue = index_of(match["cue"], line_no)
        comparison = Comparison(match["op"])
        if is_last:
            final = FinalNode(cue, match["cue"], threshold, comparison,
                              Label.parse(match["first"]), Label.parse(match["second"]))
        else:
            nodes.append(TreeNode(cue, match["cue"], threshold, comparison, Label.parse(match["first"])))
    return FastFrugalTree(tuple(nodes), final)
