"""
Evaluation environments: objects x cues matrices with a binary criterion.

Environments are ingested from CSV, split for out-of-sample evaluation, and
simulated with controlled ecological structure (redundancy, noise, weight
profile). Synthetic bibliometric worlds (researchers, institutions, papers)
are simulated here as well.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, NamedTuple, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import bisect

from config import config
from helpers import format_number, parse_direction, parse_float_cell, setup_logger
from seeding import make_rng

logger = setup_logger(__name__)


# ==============================================================================
# Errors
# ==============================================================================

class InvalidEnvironmentError(ValueError):
    """An Environment violates its structural invariants."""


class CSVParseError(ValueError):
    """The file could not be parsed as comma-separated values."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class SchemaError(ValueError):
    """The CSV parsed but violates the environment schema."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class TooFewObjectsError(ValueError):
    """A split would leave fewer than two objects on one side."""


class UnreachableRedundancyError(RuntimeError):
    """Redundancy calibration did not converge."""


# ==============================================================================
# Environment types
# ==============================================================================

class CueKind(str, Enum):
    BINARY = "binary"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class CueDefinition:
    name: str
    kind: CueKind = CueKind.BINARY
    direction: int = 1

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise InvalidEnvironmentError(f"Cue {self.name!r}: direction must be +1 or -1, got {self.direction}")
        if not self.name:
            raise InvalidEnvironmentError("Cue names must be non-empty")


@dataclass(frozen=True, eq=False)
class Environment:
    """Objects x cues matrix with one binary criterion label per object."""

    objects: tuple[str, ...]
    cues: tuple[CueDefinition, ...]
    values: np.ndarray
    criterion: np.ndarray
    criterion_name: str = "criterion"
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        objects = tuple(str(o) for o in self.objects)
        cues = tuple(self.cues)
        values = np.array(self.values, dtype=float, copy=True)
        criterion = np.array(self.criterion, dtype=np.int8, copy=True).reshape(-1)
        if values.ndim != 2:
            raise InvalidEnvironmentError(f"values must be a matrix, got shape {values.shape}")
        if len(objects) < 2:
            raise InvalidEnvironmentError(f"An environment needs at least 2 objects, got {len(objects)}")
        if len(cues) < 1:
            raise InvalidEnvironmentError("An environment needs at least 1 cue")
        if values.shape != (len(objects), len(cues)):
            raise InvalidEnvironmentError(
                f"values shape {values.shape} does not match {len(objects)} objects x {len(cues)} cues")
        if criterion.shape[0] != len(objects):
            raise InvalidEnvironmentError(
                f"criterion has {criterion.shape[0]} labels for {len(objects)} objects")
        if not np.all(np.isfinite(values)):
            raise InvalidEnvironmentError("Every cue value must be finite")
        if not np.all((criterion == 0) | (criterion == 1)):
            raise InvalidEnvironmentError("Criterion labels must be 0 or 1")
        names = [c.name for c in cues]
        if len(set(names)) != len(names):
            raise InvalidEnvironmentError(f"Duplicate cue names: {names}")
        if len(set(objects)) != len(objects):
            raise InvalidEnvironmentError("Object ids must be unique")
        values.setflags(write=False)
        criterion.setflags(write=False)
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "cues", cues)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "criterion", criterion)
        object.__setattr__(self, "_index", {o: i for i, o in enumerate(objects)})

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_cues(self) -> int:
        return len(self.cues)

    @property
    def cue_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.cues)

    @property
    def directions(self) -> np.ndarray:
        return np.array([c.direction for c in self.cues], dtype=float)

    def index_of(self, object_id: str) -> int:
        """Row index of an object id (KeyError when absent)."""
        return self._index[object_id]

    def cue_index(self, name: str) -> int:
        try:
            return self.cue_names.index(name)
        except ValueError:
            raise KeyError(f"Unknown cue: {name}") from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.cue_index(name)]

    def row(self, object_id: str) -> np.ndarray:
        return self.values[self.index_of(object_id)]

    def subset(self, rows: Sequence[int]) -> "Environment":
        rows = list(rows)
        return Environment(
            objects=tuple(self.objects[i] for i in rows),
            cues=self.cues,
            values=self.values[rows],
            criterion=self.criterion[rows],
            criterion_name=self.criterion_name,
        )

    def with_values(self, values: np.ndarray, cues: Sequence[CueDefinition] | None = None) -> "Environment":
        return Environment(
            objects=self.objects,
            cues=tuple(cues) if cues is not None else self.cues,
            values=values,
            criterion=self.criterion,
            criterion_name=self.criterion_name,
        )

    def has_both_classes(self) -> bool:
        positives = int(self.criterion.sum())
        return 0 < positives < self.n_objects


@dataclass(frozen=True, eq=False)
class SplitPair:
    train: Environment
    test: Environment
    seed: int


# ==============================================================================
# CSV ingestion / emission
# ==============================================================================

def _infer_kind(column: np.ndarray) -> CueKind:
    return CueKind.BINARY if np.all((column == 0) | (column == 1)) else CueKind.NUMERIC


def load_environment(path: str, criterion_column: str) -> Environment:
    """Read an environment CSV: header `id,<cues...>,<criterion>`, optional direction row.

    Cues keep file column order; direction defaults to +1 unless a second header
    row starting with `direction` is present.
    """
    logger.info(f"[Load] Reading environment from {path}")
    try:
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False,
                            encoding="utf-8", skipinitialspace=True)
    except FileNotFoundError:
        raise
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise CSVParseError(f"Malformed CSV {path}: {e}") from e

    if frame.shape[0] < 1:
        raise CSVParseError(f"Malformed CSV {path}: no header row", row=1)
    header = [str(h).strip() for h in frame.iloc[0].tolist()]
    seen: set[str] = set()
    for name in header:
        if name in seen:
            raise SchemaError(f"Duplicate column name {name!r} in header", row=1, column=name)
        seen.add(name)
    if header[0] != "id":
        raise SchemaError(f"First column must be 'id', got {header[0]!r}", row=1, column=header[0])
    if criterion_column not in header:
        raise SchemaError(f"Criterion column {criterion_column!r} not found", row=1, column=criterion_column)

    criterion_pos = header.index(criterion_column)
    cue_positions = [i for i in range(1, len(header)) if i != criterion_pos]
    if not cue_positions:
        raise SchemaError("The file declares no cue columns", row=1)

    data_start = 1
    directions = {i: 1 for i in cue_positions}
    if frame.shape[0] > 1 and str(frame.iat[1, 0]).strip().lower() == "direction":
        data_start = 2
        for i in cue_positions:
            direction = parse_direction(frame.iat[1, i])
            if direction is None:
                raise SchemaError(f"Direction for cue {header[i]!r} must be +1 or -1, got {frame.iat[1, i]!r}",
                                  row=2, column=header[i])
            directions[i] = direction

    body = frame.iloc[data_start:]
    objects: list[str] = []
    values = np.empty((len(body), len(cue_positions)), dtype=float)
    criterion = np.empty(len(body), dtype=np.int8)
    for r, (_, row) in enumerate(body.iterrows()):
        line = data_start + r + 1
        object_id = str(row.iloc[0]).strip()
        if not object_id:
            raise SchemaError("Missing object id", row=line, column="id")
        if object_id in objects:
            raise SchemaError(f"Duplicate object id {object_id!r}", row=line, column="id")
        objects.append(object_id)
        for c, pos in enumerate(cue_positions):
            number = parse_float_cell(row.iloc[pos])
            if number is None:
                raise SchemaError(f"Non-numeric value {row.iloc[pos]!r} in row {line}, column {header[pos]!r}",
                                  row=line, column=header[pos])
            values[r, c] = number
        label = parse_float_cell(row.iloc[criterion_pos])
        if label not in (0.0, 1.0):
            raise SchemaError(
                f"Criterion must be 0 or 1, got {row.iloc[criterion_pos]!r} in row {line}",
                row=line, column=criterion_column)
        criterion[r] = int(label)

    cues = tuple(
        CueDefinition(name=header[pos], kind=_infer_kind(values[:, c]), direction=directions[pos])
        for c, pos in enumerate(cue_positions)
    )
    try:
        env = Environment(objects=tuple(objects), cues=cues, values=values,
                          criterion=criterion, criterion_name=criterion_column)
    except InvalidEnvironmentError as e:
        raise SchemaError(str(e)) from e
    logger.info(f"[Load] Complete. {env.n_objects} objects, {env.n_cues} cues")
    return env


def write_environment(env: Environment, path: str, criterion_name: str | None = None) -> None:
    """Write an environment in the CSV format read by load_environment."""
    header = ["id", *env.cue_names, criterion_name or env.criterion_name]
    rows = []
    if any(c.direction == -1 for c in env.cues):
        rows.append(["direction", *[f"{c.direction:+d}" for c in env.cues], ""])
    for i, object_id in enumerate(env.objects):
        rows.append([object_id, *[format_number(v) for v in env.values[i]], str(int(env.criterion[i]))])
    frame = pd.DataFrame(rows, columns=header)
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"[Save] Environment written to {path}")


def add_any_cue(env: Environment, name: str, sources: Sequence[str]) -> Environment:
    """Append a binary cue that is 1 when any source cue is 1."""
    if not sources:
        raise ValueError("add_any_cue needs at least one source cue")
    columns = np.column_stack([env.column(s) for s in sources])
    composite = (columns > 0.5).any(axis=1).astype(float)
    values = np.column_stack([env.values, composite])
    cues = (*env.cues, CueDefinition(name=name, kind=CueKind.BINARY, direction=1))
    return env.with_values(values, cues)


# ==============================================================================
# Splitting
# ==============================================================================

def split_environment(env: Environment, train_fraction: float, seed: int) -> SplitPair:
    """Uniform random partition without replacement, deterministic per seed."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n_train = math.floor(train_fraction * env.n_objects)
    n_test = env.n_objects - n_train
    if n_train < 2 or n_test < 2:
        raise TooFewObjectsError(
            f"Splitting {env.n_objects} objects at {train_fraction} leaves {n_train} train / {n_test} test; "
            f"both sides need at least 2")
    order = make_rng(seed).permutation(env.n_objects)
    train_rows = np.sort(order[:n_train])
    test_rows = np.sort(order[n_train:])
    return SplitPair(train=env.subset(train_rows), test=env.subset(test_rows), seed=seed)


# ==============================================================================
# Environment simulation
# ==============================================================================

class WeightProfile(str, Enum):
    NONCOMPENSATORY = "noncompensatory"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class SimSpec:
    n_objects: int
    n_cues: int
    weight_profile: WeightProfile = WeightProfile.NONCOMPENSATORY
    redundancy: float = 0.0
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "weight_profile", WeightProfile(self.weight_profile))
        if self.n_objects < 4:
            raise ValueError(f"n_objects must be >= 4, got {self.n_objects}")
        if self.n_cues < 1:
            raise ValueError(f"n_cues must be >= 1, got {self.n_cues}")
        if not 0.0 <= self.redundancy <= 0.95:
            raise ValueError(f"redundancy must lie in [0, 0.95], got {self.redundancy}")
        if not 0.0 <= self.noise <= 0.5:
            raise ValueError(f"noise must lie in [0, 0.5], got {self.noise}")
        if self.seed < 0:
            raise ValueError(f"seed must be unsigned, got {self.seed}")

    @classmethod
    def from_dict(cls, data: dict) -> "SimSpec":
        allowed = {"n_objects", "n_cues", "weight_profile", "redundancy", "noise", "seed"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"Unknown SimSpec fields: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return {
            "n_objects": self.n_objects,
            "n_cues": self.n_cues,
            "weight_profile": self.weight_profile.value,
            "redundancy": self.redundancy,
            "noise": self.noise,
            "seed": self.seed,
        }

    def with_seed(self, seed: int) -> "SimSpec":
        return replace(self, seed=seed)


def cue_weights(profile: WeightProfile, n_cues: int) -> np.ndarray:
    """Normalised weights: halving (2^-k) for noncompensatory, equal for uniform."""
    if WeightProfile(profile) is WeightProfile.NONCOMPENSATORY:
        raw = 2.0 ** -np.arange(1, n_cues + 1)
    else:
        raw = np.ones(n_cues)
    return raw / raw.sum()


def binary_correlation(loading: float) -> float:
    """Correlation of median splits of two Gaussians sharing a common factor loading."""
    return (2.0 / math.pi) * math.asin(loading * loading)


def calibrate_loading(redundancy: float, iterations: int | None = None) -> float:
    """Common-factor loading whose median-split cues reach the target mean correlation."""
    iterations = iterations or config.CALIBRATION_ITERATIONS
    if redundancy <= 0.0:
        return 0.0
    try:
        return bisect(lambda lam: binary_correlation(lam) - redundancy, 0.0, 1.0,
                      xtol=1e-12, maxiter=iterations)
    except (RuntimeError, ValueError) as e:
        raise UnreachableRedundancyError(
            f"Could not reach redundancy {redundancy} within {iterations} bisection steps: {e}") from e


def simulate_environment(spec: SimSpec) -> Environment:
    """Synthetic environment with binary cues, a weighted criterion and label noise.

    Each cue is the median split of a latent Gaussian score built from one common
    factor (the loading sets the redundancy). The criterion marks objects whose
    weighted sum of direction-adjusted binary cues exceeds its median, then
    flips each label with probability spec.noise.
    """
    rng = make_rng(spec.seed)
    loading = calibrate_loading(spec.redundancy)
    n, k = spec.n_objects, spec.n_cues

    common = rng.standard_normal(n)
    unique = rng.standard_normal((n, k))
    latent = loading * common[:, None] + math.sqrt(1.0 - loading * loading) * unique
    cues = (latent > np.median(latent, axis=0)).astype(float)

    # simulated cues all carry direction +1
    score = cues @ cue_weights(spec.weight_profile, k)
    criterion = score > np.median(score)
    flips = rng.random(n) < spec.noise
    criterion = np.logical_xor(criterion, flips).astype(np.int8)

    width = len(str(n))
    env = Environment(
        objects=tuple(f"o{i + 1:0{width}d}" for i in range(n)),
        cues=tuple(CueDefinition(name=f"c{j + 1}", kind=CueKind.BINARY, direction=1) for j in range(k)),
        values=cues,
        criterion=criterion,
    )
    logger.debug(f"[Simulate] {n} objects, {k} cues, loading {loading:.4f}, noise {spec.noise}")
    return env


def mean_pairwise_correlation(env: Environment) -> float:
    """Mean Pearson correlation over all cue pairs (0 for single-cue environments)."""
    if env.n_cues < 2:
        return 0.0
    corr = np.corrcoef(env.values, rowvar=False)
    upper = corr[np.triu_indices(env.n_cues, k=1)]
    return float(np.nanmean(upper))


# ==============================================================================
# Bibliometric records
# ==============================================================================

class DocType(str, Enum):
    ARTICLE = "article"
    REVIEW = "review"
    OTHER = "other"


SUBSTANTIAL_DOC_TYPES = frozenset({DocType.ARTICLE, DocType.REVIEW})


@dataclass(frozen=True)
class PaperRecord:
    id: str
    field_id: str
    pub_year: int
    citations: int
    doc_type: DocType = DocType.ARTICLE
    n_hypotheses: int = 0
    n_tests: int = 0

    def __post_init__(self):
        object.__setattr__(self, "doc_type", DocType(self.doc_type))
        if self.citations < 0 or self.n_hypotheses < 0 or self.n_tests < 0:
            raise ValueError(f"Paper {self.id}: counts must be nonnegative")


@dataclass(frozen=True)
class ResearcherRecord:
    id: str
    academic_age: int
    phd_start: int
    phd_end: int
    papers: tuple[PaperRecord, ...] = ()
    institution_id: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "papers", tuple(self.papers))
        if self.phd_start > self.phd_end:
            raise ValueError(f"Researcher {self.id}: phd_start {self.phd_start} after phd_end {self.phd_end}")
        if self.academic_age < 0:
            raise ValueError(f"Researcher {self.id}: academic_age must be >= 0")


@dataclass(frozen=True)
class InstitutionRecord:
    id: str
    papers: tuple[PaperRecord, ...] = ()
    mission: str = ""

    def __post_init__(self):
        object.__setattr__(self, "papers", tuple(self.papers))


# ==============================================================================
# Bibliometric world simulation
# ==============================================================================

MISSIONS = ("research", "teaching", "applied")


@dataclass(frozen=True)
class WorldParams:
    """Configuration of the synthetic bibliometric world."""

    field_params: tuple[tuple[float, float], ...] | None = None
    papers_per_researcher: float | None = None
    first_year: int | None = None
    last_year: int | None = None
    doc_type_probs: tuple[float, float, float] = (0.7, 0.2, 0.1)
    hypotheses_mean: float = 2.0
    tests_mean: float = 2.5

    def resolved(self, n_fields: int) -> "WorldParams":
        fields = self.field_params or tuple((config.FIELD_MU, config.FIELD_SIGMA) for _ in range(n_fields))
        if len(fields) != n_fields:
            raise ValueError(f"field_params has {len(fields)} entries for {n_fields} fields")
        first = self.first_year if self.first_year is not None else config.FIRST_YEAR
        last = self.last_year if self.last_year is not None else config.LAST_YEAR
        if first > last:
            raise ValueError(f"first_year {first} after last_year {last}")
        return replace(
            self,
            field_params=tuple(fields),
            papers_per_researcher=self.papers_per_researcher or config.PAPERS_PER_RESEARCHER,
            first_year=first,
            last_year=last,
        )


class BibliometricWorld(NamedTuple):
    researchers: tuple[ResearcherRecord, ...]
    institutions: tuple[InstitutionRecord, ...]
    distributions: Any  # bbh.FieldYearDistribution


def discrete_lognormal(rng: np.random.Generator, mu: float, sigma: float, size: int) -> np.ndarray:
    """Citation counts floor(exp(mu + sigma * Z))."""
    return np.floor(np.exp(mu + sigma * rng.standard_normal(size))).astype(np.int64)


def simulate_bibliometric_world(n_researchers: int, n_institutions: int, n_fields: int, seed: int,
                                params: WorldParams | None = None) -> BibliometricWorld:
    """Researchers, institutions and field-year citation distributions, deterministic per seed."""
    from bbh import build_distributions

    if min(n_researchers, n_institutions, n_fields) < 1:
        raise ValueError("n_researchers, n_institutions and n_fields must all be >= 1")
    params = (params or WorldParams()).resolved(n_fields)
    rng = make_rng(seed)
    span = params.last_year - params.first_year + 1
    doc_types = (DocType.ARTICLE, DocType.REVIEW, DocType.OTHER)

    institution_papers: dict[int, list[PaperRecord]] = {i: [] for i in range(n_institutions)}
    researchers = []
    paper_no = 0
    for r in range(n_researchers):
        inst = int(rng.integers(n_institutions))
        field_no = int(rng.integers(n_fields))
        mu, sigma = params.field_params[field_no]
        age = int(rng.integers(1, span + 1))
        first_pub = params.last_year - age + 1
        phd_start = first_pub
        phd_end = phd_start + int(rng.integers(3, 7))
        n_papers = int(rng.poisson(params.papers_per_researcher))

        years = rng.integers(first_pub, params.last_year + 1, size=n_papers)
        citations = discrete_lognormal(rng, mu, sigma, n_papers)
        kinds = rng.choice(3, size=n_papers, p=params.doc_type_probs)
        hypotheses = rng.poisson(params.hypotheses_mean, size=n_papers)
        tests = rng.poisson(params.tests_mean, size=n_papers)

        papers = []
        for j in range(n_papers):
            paper_no += 1
            papers.append(PaperRecord(
                id=f"p{paper_no}",
                field_id=f"f{field_no + 1}",
                pub_year=int(years[j]),
                citations=int(citations[j]),
                doc_type=doc_types[int(kinds[j])],
                n_hypotheses=int(hypotheses[j]),
                n_tests=int(tests[j]),
            ))
        institution_papers[inst].extend(papers)
        researchers.append(ResearcherRecord(
            id=f"r{r + 1}", academic_age=age, phd_start=phd_start, phd_end=phd_end,
            papers=tuple(papers), institution_id=f"i{inst + 1}",
        ))

    institutions = tuple(
        InstitutionRecord(id=f"i{i + 1}", papers=tuple(institution_papers[i]),
                          mission=MISSIONS[int(rng.integers(len(MISSIONS)))])
        for i in range(n_institutions)
    )
    all_papers = [p for res in researchers for p in res.papers]
    logger.info(f"[Simulate] World: {n_researchers} researchers, {n_institutions} institutions, "
                f"{len(all_papers)} papers")
    return BibliometricWorld(tuple(researchers), institutions, build_distributions(all_papers))


RESEARCHER_COLUMNS = ["id", "institution_id", "academic_age", "phd_start", "phd_end"]
INSTITUTION_COLUMNS = ["id", "mission"]
PAPER_COLUMNS = ["id", "researcher_id", "institution_id", "field_id", "pub_year", "citations",
                 "doc_type", "n_hypotheses", "n_tests"]


def write_world(world: BibliometricWorld, directory: str) -> dict[str, str]:
    """Emit researchers.csv, institutions.csv and papers.csv; returns the written paths."""
    os.makedirs(directory, exist_ok=True)
    researcher_rows = [[r.id, r.institution_id or "", r.academic_age, r.phd_start, r.phd_end]
                       for r in world.researchers]
    institution_rows = [[i.id, i.mission] for i in world.institutions]
    paper_rows = [[p.id, r.id, r.institution_id or "", p.field_id, p.pub_year, p.citations,
                   p.doc_type.value, p.n_hypotheses, p.n_tests]
                  for r in world.researchers for p in r.papers]
    paths = {
        "researchers": os.path.join(directory, "researchers.csv"),
        "institutions": os.path.join(directory, "institutions.csv"),
        "papers": os.path.join(directory, "papers.csv"),
    }
    pd.DataFrame(researcher_rows, columns=RESEARCHER_COLUMNS).to_csv(
        paths["researchers"], index=False, lineterminator="\n")
    pd.DataFrame(institution_rows, columns=INSTITUTION_COLUMNS).to_csv(
        paths["institutions"], index=False, lineterminator="\n")
    pd.DataFrame(paper_rows, columns=PAPER_COLUMNS).to_csv(
        paths["papers"], index=False, lineterminator="\n")
    logger.info(f"[Save] World written to {directory}")
    return paths


def _read_table(path: str, required: list[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise CSVParseError(f"Malformed CSV {path}: {e}") from e
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}", row=1, column=missing[0])
    return frame


def _int_cell(frame_row: pd.Series, column: str, line: int) -> int:
    number = parse_float_cell(frame_row[column])
    if number is None or not number.is_integer():
        raise SchemaError(f"Expected an integer in row {line}, column {column!r}, got {frame_row[column]!r}",
                          row=line, column=column)
    return int(number)


def load_papers(path: str) -> list[tuple[PaperRecord, str, str]]:
    """Papers with their researcher and institution ids."""
    frame = _read_table(path, PAPER_COLUMNS)
    rows = []
    for r, (_, row) in enumerate(frame.iterrows()):
        line = r + 2
        try:
            doc_type = DocType(row["doc_type"].strip())
        except ValueError:
            raise SchemaError(f"Unknown doc_type {row['doc_type']!r} in row {line}",
                              row=line, column="doc_type") from None
        paper = PaperRecord(
            id=row["id"].strip(),
            field_id=row["field_id"].strip(),
            pub_year=_int_cell(row, "pub_year", line),
            citations=_int_cell(row, "citations", line),
            doc_type=doc_type,
            n_hypotheses=_int_cell(row, "n_hypotheses", line),
            n_tests=_int_cell(row, "n_tests", line),
        )
        rows.append((paper, row["researcher_id"].strip(), row["institution_id"].strip()))
    return rows


def load_researchers(path: str, papers_path: str) -> list[ResearcherRecord]:
    """Researchers with their papers attached through papers.csv researcher_id."""
    frame = _read_table(path, RESEARCHER_COLUMNS)
    by_researcher: dict[str, list[PaperRecord]] = {}
    for paper, researcher_id, _ in load_papers(papers_path):
        by_researcher.setdefault(researcher_id, []).append(paper)
    researchers = []
    for r, (_, row) in enumerate(frame.iterrows()):
        line = r + 2
        researcher_id = row["id"].strip()
        researchers.append(ResearcherRecord(
            id=researcher_id,
            academic_age=_int_cell(row, "academic_age", line),
            phd_start=_int_cell(row, "phd_start", line),
            phd_end=_int_cell(row, "phd_end", line),
            papers=tuple(by_researcher.get(researcher_id, ())),
            institution_id=row["institution_id"].strip() or None,
        ))
    return researchers


def load_institutions(path: str, papers_path: str) -> list[InstitutionRecord]:
    """Institutions with their papers attached through papers.csv institution_id."""
    frame = _read_table(path, INSTITUTION_COLUMNS)
    by_institution: dict[str, list[PaperRecord]] = {}
    for paper, _, institution_id in load_papers(papers_path):
        by_institution.setdefault(institution_id, []).append(paper)
    return [
        InstitutionRecord(id=row["id"].strip(), papers=tuple(by_institution.get(row["id"].strip(), ())),
                          mission=row["mission"].strip())
        for _, row in frame.iterrows()
    ]


def load_world(directory: str) -> BibliometricWorld:
    """Read a world written by write_world and rebuild its field-year distributions."""
    from bbh import build_distributions

    papers_path = os.path.join(directory, "papers.csv")
    researchers = load_researchers(os.path.join(directory, "researchers.csv"), papers_path)
    institutions = load_institutions(os.path.join(directory, "institutions.csv"), papers_path)
    papers = [paper for paper, _, _ in load_papers(papers_path)]
    logger.info(f"[Load] World from {directory}: {len(researchers)} researchers, {len(papers)} papers")
    return BibliometricWorld(tuple(researchers), tuple(institutions), build_distributions(papers))
