"""
Information-greedy baselines: weighted-additive linear scoring and logistic regression.

Both models use every cue. Fitting is deterministic; fitted models are
immutable and serialise to a key-value text form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import expit

from config import config
from envmodel import Environment
from fftbuild import SingleClassError
from helpers import parse_bool, setup_logger

logger = setup_logger(__name__)


class LengthMismatchError(ValueError):
    """Two sequences that must align have different lengths."""


class ModelFormatError(ValueError):
    """Model text could not be parsed."""


@dataclass(frozen=True)
class LinearModel:
    weights: tuple[float, ...]
    intercept: float
    cue_names: tuple[str, ...] = ()
    rank_deficient: bool = False

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "cue_names", tuple(self.cue_names))
        if self.cue_names and len(self.cue_names) != len(self.weights):
            raise LengthMismatchError(f"{len(self.weights)} weights for {len(self.cue_names)} cue names")


@dataclass(frozen=True)
class LogisticModel:
    weights: tuple[float, ...]
    intercept: float
    converged: bool
    iterations: int
    cue_names: tuple[str, ...] = ()
    separated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "cue_names", tuple(self.cue_names))
        if self.cue_names and len(self.cue_names) != len(self.weights):
            raise LengthMismatchError(f"{len(self.weights)} weights for {len(self.cue_names)} cue names")
        if self.converged and not all(math.isfinite(w) for w in (*self.weights, self.intercept)):
            raise ValueError("A converged logistic model must have finite weights")


Model = LinearModel | LogisticModel


def _design(env: Environment) -> np.ndarray:
    return np.column_stack([np.ones(env.n_objects), env.values])


# ==============================================================================
# Fitting
# ==============================================================================

def fit_linear(train: Environment, ridge_lambda: float | None = None) -> LinearModel:
    """Ordinary least squares on the 0/1 criterion through the normal equations.

    A rank-deficient design falls back to ridge regularisation with a tiny
    lambda and sets the rank_deficient flag.
    """
    ridge_lambda = config.RIDGE_LAMBDA if ridge_lambda is None else ridge_lambda
    X = _design(train)
    y = train.criterion.astype(float)
    gram = X.T @ X
    rhs = X.T @ y
    rank_deficient = np.linalg.matrix_rank(X) < X.shape[1]
    if rank_deficient:
        logger.warning(f"[Linear] Rank-deficient design ({X.shape[1]} columns); ridge fallback lambda={ridge_lambda}")
        beta = np.linalg.solve(gram + ridge_lambda * np.eye(X.shape[1]), rhs)
    else:
        beta = np.linalg.solve(gram, rhs)
    return LinearModel(weights=tuple(beta[1:]), intercept=float(beta[0]),
                       cue_names=train.cue_names, rank_deficient=bool(rank_deficient))


def _log_likelihood(X: np.ndarray, y: np.ndarray, beta: np.ndarray) -> float:
    z = X @ beta
    # log p = -log(1 + e^-z), log(1 - p) = -log(1 + e^z)
    return float(-(y * np.logaddexp(0.0, -z) + (1.0 - y) * np.logaddexp(0.0, z)).sum())


def fit_logistic(train: Environment, max_iter: int | None = None, tol: float | None = None,
                 separation_bound: float | None = None) -> LogisticModel:
    """Maximum-likelihood logistic regression by Newton steps (IRLS) with step halving.

    Converged when the largest absolute update falls below tol. When any
    weight exceeds the separation bound the data are treated as separated: the
    coefficient vector is scaled back so its largest component sits on the
    bound and the model is flagged.
    """
    max_iter = config.LOGISTIC_MAX_ITER if max_iter is None else max_iter
    tol = config.LOGISTIC_TOL if tol is None else tol
    bound = config.SEPARATION_BOUND if separation_bound is None else separation_bound
    if not train.has_both_classes():
        raise SingleClassError("fit_logistic needs both criterion classes")

    X = _design(train)
    y = train.criterion.astype(float)
    beta = np.zeros(X.shape[1])
    current = _log_likelihood(X, y, beta)
    converged = separated = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        p = expit(X @ beta)
        gradient = X.T @ (y - p)
        hessian = X.T @ ((p * (1.0 - p))[:, None] * X) + 1e-8 * np.eye(X.shape[1])
        try:
            step = np.linalg.solve(hessian, gradient)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hessian, gradient, rcond=None)[0]

        scale = 1.0
        candidate = beta + step
        updated = _log_likelihood(X, y, candidate)
        while updated < current and scale > 1e-10:
            scale /= 2.0
            candidate = beta + scale * step
            updated = _log_likelihood(X, y, candidate)
        delta = float(np.max(np.abs(candidate - beta)))
        beta, current = candidate, updated

        largest = float(np.max(np.abs(beta)))
        if largest > bound:
            beta = beta * (bound / largest)
            separated = True
            logger.warning(f"[Logistic] Separation detected after {iterations} iterations; "
                           f"coefficients scaled to bound {bound}")
            break
        if delta < tol:
            converged = True
            break

    if not converged and not separated:
        logger.warning(f"[Logistic] No convergence within {max_iter} iterations (tol={tol})")
    return LogisticModel(weights=tuple(beta[1:]), intercept=float(beta[0]), converged=converged,
                         iterations=iterations, cue_names=train.cue_names, separated=separated)


# ==============================================================================
# Scoring
# ==============================================================================

def predict_score(model: Model, cue_values: Sequence[float]) -> float:
    """Linear: w.x + b. Logistic: sigmoid of the same."""
    values = np.asarray(cue_values, dtype=float).reshape(-1)
    if values.size != len(model.weights):
        raise LengthMismatchError(f"Model has {len(model.weights)} weights, got {values.size} cue values")
    linear = float(np.dot(np.asarray(model.weights), values) + model.intercept)
    if isinstance(model, LogisticModel):
        return float(expit(linear))
    return linear


def score_matrix(model: Model, values: np.ndarray) -> np.ndarray:
    """predict_score for every row of an objects x cues matrix."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[1] != len(model.weights):
        raise LengthMismatchError(f"Model has {len(model.weights)} weights, got matrix of shape {values.shape}")
    linear = values @ np.asarray(model.weights) + model.intercept
    return expit(linear) if isinstance(model, LogisticModel) else linear


def log_likelihood(model: Model, env: Environment) -> float:
    """Bernoulli log-likelihood of the environment's criterion under a logistic model."""
    if len(model.weights) != env.n_cues:
        raise LengthMismatchError(f"Model has {len(model.weights)} weights for {env.n_cues} cues")
    beta = np.concatenate([[model.intercept], model.weights])
    return _log_likelihood(_design(env), env.criterion.astype(float), beta)


# ==============================================================================
# Key-value codec
# ==============================================================================

def model_to_text(model: Model) -> str:
    kind = "logistic" if isinstance(model, LogisticModel) else "linear"
    names = model.cue_names or tuple(f"x{i + 1}" for i in range(len(model.weights)))
    lines = [f"model = {kind}", f"intercept = {model.intercept!r}"]
    if isinstance(model, LogisticModel):
        lines += [f"converged = {str(model.converged).lower()}",
                  f"iterations = {model.iterations}",
                  f"separated = {str(model.separated).lower()}"]
    else:
        lines.append(f"rank_deficient = {str(model.rank_deficient).lower()}")
    lines += [f"weight.{name} = {weight!r}" for name, weight in zip(names, model.weights)]
    return "\n".join(lines) + "\n"


def model_from_text(text: str) -> Model:
    fields: dict[str, str] = {}
    names: list[str] = []
    weights: list[float] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ModelFormatError(f"Line {line_no}: expected 'key = value', got {raw!r}")
        key, value = key.strip(), value.strip()
        try:
            if key.startswith("weight."):
                names.append(key[len("weight."):])
                weights.append(float(value))
            else:
                fields[key] = value
        except ValueError:
            raise ModelFormatError(f"Line {line_no}: bad number {value!r}") from None

    kind = fields.get("model")
    if kind not in ("linear", "logistic") or "intercept" not in fields:
        raise ModelFormatError("Model text needs 'model = linear|logistic' and an intercept")
    try:
        intercept = float(fields["intercept"])
        if kind == "linear":
            return LinearModel(tuple(weights), intercept, tuple(names),
                               rank_deficient=parse_bool(fields.get("rank_deficient")))
        return LogisticModel(tuple(weights), intercept,
                             converged=parse_bool(fields.get("converged")),
                             iterations=int(fields.get("iterations", "0")),
                             cue_names=tuple(names),
                             separated=parse_bool(fields.get("separated")))
    except ValueError as e:
        raise ModelFormatError(f"Invalid model text: {e}") from e
