"""
Ecological benchmarking harness.

Fits every strategy on the same training split, evaluates it in sample
(fitting) and out of sample (prediction), and aggregates accuracy, frugality
and signal-detection rates over seeded replications.

Replication r uses seed_r = derive_seed(master_seed, r). Within a replication,
stream 0 generates the environment (simulated sources only), stream 1 the
split, and stream 2 the tie-breaking coins.
"""

from __future__ import annotations

import hashlib
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from baselines import LengthMismatchError
from config import config
from envmodel import Environment, SimSpec, simulate_environment, split_environment
from helpers import round_sig, setup_logger
from seeding import derive_seed
from strategies import Predictions, StrategyError, StrategySpec, Task, get_strategy

logger = setup_logger(__name__)

__all__ = [
    "ConfusionMatrix", "StrategySpec", "StrategyError", "Task", "EvaluationResult", "StrategyResult",
    "RunMetadata", "BenchmarkReport", "Finding", "Effect", "confusion_of", "comparison_pairs",
    "evaluate_classifier", "cross_validate", "less_is_more_probe",
]


# ==============================================================================
# Confusion matrices
# ==============================================================================

def _rate(numerator: int, denominator: int) -> float | None:
    """numerator / denominator, or None when the denominator is 0."""
    return numerator / denominator if denominator else None


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError(f"Confusion counts must be nonnegative: {self}")

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float | None:
        return _rate(self.tp + self.tn, self.total)

    @property
    def sensitivity(self) -> float | None:
        return _rate(self.tp, self.tp + self.fn)

    @property
    def specificity(self) -> float | None:
        return _rate(self.tn, self.tn + self.fp)

    @property
    def false_negative_rate(self) -> float | None:
        return _rate(self.fn, self.tp + self.fn)

    @property
    def false_alarm_rate(self) -> float | None:
        return _rate(self.fp, self.tn + self.fp)

    @property
    def ppv(self) -> float | None:
        return _rate(self.tp, self.tp + self.fp)

    @property
    def npv(self) -> float | None:
        return _rate(self.tn, self.tn + self.fn)

    @property
    def balanced_accuracy(self) -> float | None:
        """Mean of sensitivity and specificity; None unless both are defined."""
        if self.sensitivity is None or self.specificity is None:
            return None
        return (self.sensitivity + self.specificity) / 2.0


def confusion_of(predictions: Sequence[int], truth: Sequence[int]) -> ConfusionMatrix:
    predicted = np.asarray(predictions).reshape(-1)
    actual = np.asarray(truth).reshape(-1)
    if predicted.size != actual.size:
        raise LengthMismatchError(f"{predicted.size} predictions for {actual.size} truth labels")
    if predicted.size == 0:
        raise ValueError("confusion_of needs at least one prediction")
    if not (np.isin(predicted, (0, 1)).all() and np.isin(actual, (0, 1)).all()):
        raise ValueError("Predictions and truth must be 0/1 labels")
    predicted, actual = predicted == 1, actual == 1
    return ConfusionMatrix(
        tp=int((predicted & actual).sum()),
        fp=int((predicted & ~actual).sum()),
        tn=int((~predicted & ~actual).sum()),
        fn=int((~predicted & actual).sum()),
    )


# ==============================================================================
# Single evaluation
# ==============================================================================

def comparison_pairs(env: Environment) -> list[tuple[int, int]]:
    """Every (i, j), i < j, whose criterion values differ."""
    y = env.criterion
    return [(i, j) for i in range(env.n_objects) for j in range(i + 1, env.n_objects) if y[i] != y[j]]


@dataclass(frozen=True)
class EvaluationResult:
    train: ConfusionMatrix
    test: ConfusionMatrix
    mean_cues_consulted: float
    wall_ms: float = 0.0


def _score(strategy, env: Environment, task: Task, seed: int) -> tuple[ConfusionMatrix, Predictions]:
    if task is Task.CLASSIFICATION:
        predictions = strategy.classify(env)
        return confusion_of(predictions.labels, env.criterion), predictions
    pairs = comparison_pairs(env)
    if not pairs:
        raise ValueError("no object pairs with differing criterion to compare")
    tie_seeds = [derive_seed(seed, k) for k in range(len(pairs))]
    predictions = strategy.compare(env, pairs, tie_seeds)
    truth = [int(env.criterion[i]) for i, _ in pairs]
    return confusion_of(predictions.labels, truth), predictions


def evaluate_classifier(spec: StrategySpec, train: Environment, test: Environment, run_seed: int = 0,
                        task: Task | str = Task.CLASSIFICATION) -> EvaluationResult:
    """Fit on train only, then score on train (fitting) and test (prediction).

    Any failure is re-raised as StrategyError naming the strategy.
    """
    task = Task(task)
    if train.cue_names != test.cue_names:
        raise ValueError("train and test environments must share the same cues")
    start = time.perf_counter()
    strategy = get_strategy(spec)
    try:
        strategy.fit(train)
        fitted, _ = _score(strategy, train, task, derive_seed(run_seed, 0))
        predicted, predictions = _score(strategy, test, task, derive_seed(run_seed, 1))
    except StrategyError:
        raise
    except Exception as e:
        raise StrategyError(spec.name, f"{type(e).__name__}: {e}") from e
    elapsed = (time.perf_counter() - start) * 1000.0 if config.RECORD_TIMING else 0.0
    return EvaluationResult(fitted, predicted, float(np.mean(predictions.cues_consulted)), elapsed)


# ==============================================================================
# Reports
# ==============================================================================

@dataclass(frozen=True)
class StrategyResult:
    """Aggregates over the replications in which the strategy succeeded."""

    name: str
    kind: str
    fit_acc: float | None = None
    pred_acc: float | None = None
    pred_se: float | None = None
    frugality: float | None = None
    balanced_acc: float | None = None
    sens: float | None = None
    spec: float | None = None
    wall_ms: float | None = None
    n_ok: int = 0
    n_failed: int = 0
    error: str | None = None

    @property
    def populated(self) -> bool:
        return self.pred_acc is not None and self.frugality is not None


@dataclass(frozen=True)
class RunMetadata:
    seed: int
    task: str
    reps: int
    train_fraction: float
    source: dict
    strategies: tuple[dict, ...]
    partition_hashes: tuple[str, ...]

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("A report covers at least one replication")
        object.__setattr__(self, "strategies", tuple(self.strategies))
        object.__setattr__(self, "partition_hashes", tuple(self.partition_hashes))


@dataclass(frozen=True)
class BenchmarkReport:
    metadata: RunMetadata
    results: tuple[StrategyResult, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "results", tuple(self.results))

    def result(self, name: str) -> StrategyResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(f"No strategy named {name!r} in report")

    def to_dict(self) -> dict[str, Any]:
        meta = self.metadata
        return {
            "metadata": {
                "seed": meta.seed,
                "task": meta.task,
                "reps": meta.reps,
                "train_fraction": meta.train_fraction,
                "source": meta.source,
                "strategies": list(meta.strategies),
                "partition_hashes": list(meta.partition_hashes),
            },
            "results": [asdict(r) for r in self.results],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BenchmarkReport":
        meta = data["metadata"]
        return cls(
            metadata=RunMetadata(
                seed=meta["seed"], task=meta["task"], reps=meta["reps"],
                train_fraction=meta["train_fraction"], source=meta["source"],
                strategies=tuple(meta["strategies"]), partition_hashes=tuple(meta["partition_hashes"]),
            ),
            results=tuple(StrategyResult(**r) for r in data["results"]),
        )


# ==============================================================================
# Cross-validation
# ==============================================================================

@dataclass(frozen=True)
class _Replication:
    index: int
    partition_hash: str
    outcomes: dict[str, EvaluationResult | str]


def _partition_hash(train: Environment) -> str:
    return hashlib.sha256(",".join(train.objects).encode("utf-8")).hexdigest()[:16]


def _source_metadata(source: Environment | SimSpec) -> dict:
    if isinstance(source, SimSpec):
        return {"kind": "simulated", **source.to_dict()}
    return {"kind": "environment", "n_objects": source.n_objects, "n_cues": source.n_cues,
            "cues": list(source.cue_names), "criterion": source.criterion_name}


def _run_replication(index: int, source: Environment | SimSpec, strategies: Sequence[StrategySpec],
                     train_fraction: float, master_seed: int, task: Task) -> _Replication:
    seed = derive_seed(master_seed, index)
    env = simulate_environment(source.with_seed(derive_seed(seed, 0))) if isinstance(source, SimSpec) else source
    split = split_environment(env, train_fraction, derive_seed(seed, 1))
    outcomes: dict[str, EvaluationResult | str] = {}
    for spec in strategies:
        try:
            outcomes[spec.name] = evaluate_classifier(spec, split.train, split.test, derive_seed(seed, 2), task)
        except StrategyError as e:
            logger.warning(f"[Bench] Replication {index}: {e}")
            outcomes[spec.name] = str(e)
    return _Replication(index, _partition_hash(split.train), outcomes)


def _mean(values: list[float | None]) -> float | None:
    defined = [v for v in values if v is not None]
    return float(np.mean(defined)) if defined else None


def _aggregate(spec: StrategySpec, replications: Sequence[_Replication]) -> StrategyResult:
    runs = [r.outcomes[spec.name] for r in replications]
    ok = [run for run in runs if isinstance(run, EvaluationResult)]
    errors = [run for run in runs if isinstance(run, str)]
    if not ok:
        return StrategyResult(spec.name, spec.kind, n_ok=0, n_failed=len(errors), error=errors[0])
    predicted = np.array([run.test.accuracy for run in ok], dtype=float)
    se = float(predicted.std(ddof=1) / math.sqrt(len(ok))) if len(ok) > 1 else 0.0
    return StrategyResult(
        name=spec.name,
        kind=spec.kind,
        fit_acc=round_sig(_mean([run.train.accuracy for run in ok])),
        pred_acc=round_sig(float(predicted.mean())),
        pred_se=round_sig(se),
        frugality=round_sig(_mean([run.mean_cues_consulted for run in ok])),
        balanced_acc=round_sig(_mean([run.test.balanced_accuracy for run in ok])),
        sens=round_sig(_mean([run.test.sensitivity for run in ok])),
        spec=round_sig(_mean([run.test.specificity for run in ok])),
        wall_ms=round_sig(_mean([run.wall_ms for run in ok])),
        n_ok=len(ok),
        n_failed=len(errors),
        error=errors[0] if errors else None,
    )


def cross_validate(source: Environment | SimSpec, strategies: Sequence[StrategySpec], reps: int | None = None,
                   train_fraction: float | None = None, master_seed: int | None = None,
                   task: Task | str = Task.CLASSIFICATION, max_workers: int | None = None) -> BenchmarkReport:
    """Paired-split benchmark: every strategy sees the identical partition in each replication.

    Failing strategies become report cells with an error message; the run continues.
    """
    reps = config.REPS if reps is None else reps
    train_fraction = config.TRAIN_FRACTION if train_fraction is None else train_fraction
    master_seed = config.SEED if master_seed is None else master_seed
    max_workers = config.MAX_WORKERS if max_workers is None else max_workers
    task = Task(task)
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if not strategies:
        raise ValueError("cross_validate needs at least one strategy")
    names = [s.name for s in strategies]
    if len(set(names)) != len(names):
        raise ValueError(f"Strategy names must be unique: {names}")

    logger.info(f"[Bench] {len(strategies)} strategies x {reps} replications ({task.value}), seed {master_seed}")
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        replications = list(pool.map(
            lambda r: _run_replication(r, source, strategies, train_fraction, master_seed, task), range(reps)))

    report = BenchmarkReport(
        metadata=RunMetadata(
            seed=master_seed,
            task=task.value,
            reps=reps,
            train_fraction=train_fraction,
            source=_source_metadata(source),
            strategies=tuple(s.to_dict() for s in strategies),
            partition_hashes=tuple(r.partition_hash for r in replications),
        ),
        results=tuple(_aggregate(spec, replications) for spec in strategies),
    )
    failed = sum(r.n_failed for r in report.results)
    logger.info(f"[Bench] Complete. {failed} failed strategy cells")
    return report


# ==============================================================================
# Less-is-more probe
# ==============================================================================

class Effect(str, Enum):
    LESS_IS_MORE = "less_is_more"
    LESS_IS_EQUAL = "less_is_equal"
    MORE_IS_MORE = "more_is_more"


@dataclass(frozen=True)
class Finding:
    frugal: str
    greedy: str
    effect: Effect
    difference: float
    standard_error: float


def less_is_more_probe(report: BenchmarkReport) -> list[Finding]:
    """Compare every frugal/greedy pair of populated strategies at two pooled standard errors."""
    populated = [r for r in report.results if r.populated]
    findings = []
    for a in populated:
        for b in populated:
            if not a.frugality < b.frugality:
                continue
            difference = a.pred_acc - b.pred_acc
            se = math.sqrt((a.pred_se or 0.0) ** 2 + (b.pred_se or 0.0) ** 2)
            if difference > 2.0 * se:
                effect = Effect.LESS_IS_MORE
            elif abs(difference) <= 2.0 * se:
                effect = Effect.LESS_IS_EQUAL
            else:
                effect = Effect.MORE_IS_MORE
            findings.append(Finding(a.name, b.name, effect, difference, se))
    return findings
