"""
Bibliometrics-based heuristics.

Field-year citation percentiles, the PPtop share of a unit, and the named
heuristics (researcher comparison, institutional top-share assessment, PhD
pre-selection with citation refinement, final-round selection) plus the
f-index. Each heuristic is a search rule over a researcher's or institution's
papers, a stopping rule and a decision rule on the resulting counts.

Refinement by journal reputation is not implemented: there is no operational
definition of a reputable journal to build it on.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import pandas as pd

from config import config
from envmodel import SUBSTANTIAL_DOC_TYPES, DocType, InstitutionRecord, PaperRecord, ResearcherRecord
from helpers import format_sig, setup_logger
from seeding import make_rng
from toolbox import top_k_with_ties

logger = setup_logger(__name__)

# percentile comparisons tolerate float error in 1 - top_fraction
_EPS = 1e-12


class MissingCellError(KeyError):
    """A paper's (field, year) cell is absent from the distribution."""


class AgeMismatchError(ValueError):
    """Two researchers compared by activity differ in academic age."""


class EmptyPaperSetError(ValueError):
    """An indicator needs at least one paper."""


# ==============================================================================
# Field-year distributions
# ==============================================================================

@dataclass(frozen=True, eq=False)
class FieldYearDistribution:
    """(field_id, pub_year) -> ascending citation counts of every paper in that cell."""

    cells: dict[tuple[str, int], np.ndarray]

    def __post_init__(self):
        frozen = {}
        for key, counts in self.cells.items():
            array = np.sort(np.asarray(counts, dtype=np.int64))
            if array.size == 0:
                raise ValueError(f"Cell {key} is empty")
            array.setflags(write=False)
            frozen[key] = array
        object.__setattr__(self, "cells", frozen)

    def cell(self, field_id: str, pub_year: int) -> np.ndarray:
        try:
            return self.cells[(field_id, pub_year)]
        except KeyError:
            raise MissingCellError(f"No citation distribution for field {field_id!r}, year {pub_year}") from None

    def __contains__(self, key: tuple[str, int]) -> bool:
        return key in self.cells

    def __len__(self) -> int:
        return len(self.cells)


def build_distributions(papers: Iterable[PaperRecord]) -> FieldYearDistribution:
    grouped: dict[tuple[str, int], list[int]] = {}
    for paper in papers:
        grouped.setdefault((paper.field_id, paper.pub_year), []).append(paper.citations)
    return FieldYearDistribution(grouped)


def citation_percentile(paper: PaperRecord, dist: FieldYearDistribution) -> float:
    """Mid-rank percentile: (papers with fewer citations + half of those tied) / cell size.

    Examples:
        >>> d = build_distributions([PaperRecord(f"p{i}", "f", 2010, i) for i in range(10)])
        >>> citation_percentile(PaperRecord("p9", "f", 2010, 9), d)
        0.95
    """
    counts = dist.cell(paper.field_id, paper.pub_year)
    fewer = int(np.searchsorted(counts, paper.citations, side="left"))
    tied = int(np.searchsorted(counts, paper.citations, side="right")) - fewer
    return (fewer + 0.5 * tied) / counts.size


def _top_fraction(top_fraction: float | None) -> float:
    fraction = config.TOP_FRACTION if top_fraction is None else top_fraction
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"top_fraction must lie in (0, 1], got {fraction}")
    return fraction


def is_top_paper(paper: PaperRecord, dist: FieldYearDistribution, top_fraction: float | None = None) -> bool:
    return citation_percentile(paper, dist) >= 1.0 - _top_fraction(top_fraction) - _EPS


def pptop_share(papers: Sequence[PaperRecord], dist: FieldYearDistribution,
                top_fraction: float | None = None) -> float:
    """Share of papers in the top fraction of their field and publication year."""
    if not papers:
        raise EmptyPaperSetError("pptop_share needs at least one paper")
    fraction = _top_fraction(top_fraction)
    return sum(is_top_paper(p, dist, fraction) for p in papers) / len(papers)


def top_paper_count(papers: Sequence[PaperRecord], dist: FieldYearDistribution,
                    top_fraction: float | None = None) -> int:
    fraction = _top_fraction(top_fraction)
    return sum(is_top_paper(p, dist, fraction) for p in papers)


# ==============================================================================
# Publication counts
# ==============================================================================

def _count(papers: Iterable[PaperRecord], window: tuple[int, int] | None,
           doc_types: frozenset[DocType] | set[DocType]) -> int:
    if not doc_types:
        raise ValueError("doc_types must be nonempty")
    kinds = {DocType(d) for d in doc_types}
    total = 0
    for paper in papers:
        if paper.doc_type not in kinds:
            continue
        if window is not None and not window[0] <= paper.pub_year <= window[1]:
            continue
        total += 1
    return total


def count_publications(researcher: ResearcherRecord, window: tuple[int, int] | None = None,
                       doc_types: frozenset[DocType] | set[DocType] = SUBSTANTIAL_DOC_TYPES) -> int:
    """Papers of the given kinds published within the inclusive year window (whole career if None)."""
    return _count(researcher.papers, window, doc_types)


def year_span(papers: Sequence[PaperRecord]) -> tuple[int, int] | None:
    if not papers:
        return None
    years = [p.pub_year for p in papers]
    return min(years), max(years)


# ==============================================================================
# Institutional assessment
# ==============================================================================

class Verdict(str, Enum):
    ABOVE_AVERAGE = "above_average"
    NOT_ABOVE = "not_above"


@dataclass(frozen=True)
class InstitutionAssessment:
    institution_id: str
    verdict: Verdict
    share: float
    n_papers: int
    first_year: int
    last_year: int


def assess_institution(inst: InstitutionRecord, dist: FieldYearDistribution, x_threshold: float,
                       top_fraction: float | None = None) -> InstitutionAssessment:
    """Above average iff more than x_threshold of the papers are top papers of their field-year."""
    if not inst.papers:
        raise EmptyPaperSetError(f"Institution {inst.id} has no papers to assess")
    share = pptop_share(inst.papers, dist, top_fraction)
    first, last = year_span(inst.papers)
    verdict = Verdict.ABOVE_AVERAGE if share > x_threshold else Verdict.NOT_ABOVE
    logger.debug(f"[BBH] Institution {inst.id}: share {share:.4f} over {first}-{last} -> {verdict.value}")
    return InstitutionAssessment(inst.id, verdict, share, len(inst.papers), first, last)


# ==============================================================================
# Researcher comparison and selection
# ==============================================================================

class Activity(str, Enum):
    A_MORE_ACTIVE = "a_more_active"
    B_MORE_ACTIVE = "b_more_active"
    INDETERMINATE = "indeterminate"


def compare_researchers(a: ResearcherRecord, b: ResearcherRecord,
                        doc_types: frozenset[DocType] | set[DocType] = SUBSTANTIAL_DOC_TYPES,
                        age_tolerance: int | None = None) -> Activity:
    """The researcher with more substantial publications is more active; requires equal academic age."""
    tolerance = config.AGE_TOLERANCE if age_tolerance is None else age_tolerance
    if abs(a.academic_age - b.academic_age) > tolerance:
        raise AgeMismatchError(
            f"Researchers {a.id} (academic age {a.academic_age}) and {b.id} "
            f"(academic age {b.academic_age}) differ by more than {tolerance} years")
    count_a = count_publications(a, doc_types=doc_types)
    count_b = count_publications(b, doc_types=doc_types)
    if count_a == count_b:
        return Activity.INDETERMINATE
    return Activity.A_MORE_ACTIVE if count_a > count_b else Activity.B_MORE_ACTIVE


def _select(candidates: Sequence[ResearcherRecord], scores: dict[str, float], k: int) -> list[ResearcherRecord]:
    chosen = top_k_with_ties(scores, k)
    return [c for c in candidates if c.id in chosen]


def preselect_candidates(candidates: Sequence[ResearcherRecord], k: int,
                         doc_types: frozenset[DocType] | set[DocType] = SUBSTANTIAL_DOC_TYPES
                         ) -> list[ResearcherRecord]:
    """Candidates with the most substantial publications in their own PhD window, boundary ties kept."""
    if not candidates:
        raise ValueError("preselect_candidates needs at least one candidate")
    scores = {c.id: count_publications(c, (c.phd_start, c.phd_end), doc_types) for c in candidates}
    selected = _select(candidates, scores, k)
    logger.info(f"[BBH] Pre-selected {len(selected)} of {len(candidates)} candidates (k={k})")
    return selected


@dataclass(frozen=True)
class MinCitations:
    threshold: int


@dataclass(frozen=True)
class TopCited:
    k: int
    top_fraction: float | None = None


@dataclass(frozen=True)
class HighlyCited:
    top_fraction: float | None = None


@dataclass(frozen=True)
class Lottery:
    seed: int


def refine_preselection(preselected: Sequence[ResearcherRecord], dist: FieldYearDistribution,
                        rule: MinCitations | TopCited) -> list[ResearcherRecord]:
    """Zoom in on the shortlist by total citations or by counts of top-cited papers."""
    if not preselected:
        raise ValueError("refine_preselection needs a nonempty shortlist")
    if isinstance(rule, MinCitations):
        return [c for c in preselected if sum(p.citations for p in c.papers) >= rule.threshold]
    if isinstance(rule, TopCited):
        scores = {c.id: top_paper_count(c.papers, dist, rule.top_fraction) for c in preselected}
        return _select(preselected, scores, rule.k)
    raise TypeError(f"Unknown refinement rule: {rule!r}")


def select_final_round(candidates: Sequence[ResearcherRecord], dist: FieldYearDistribution, n_awards: int,
                       mode: HighlyCited | Lottery) -> list[ResearcherRecord]:
    """Award by most top-cited papers (ties kept, may exceed n_awards) or by seeded lottery."""
    if not candidates:
        raise ValueError("select_final_round needs at least one candidate")
    if n_awards < 1:
        raise ValueError(f"n_awards must be >= 1, got {n_awards}")
    if isinstance(mode, HighlyCited):
        scores = {c.id: top_paper_count(c.papers, dist, mode.top_fraction) for c in candidates}
        return _select(candidates, scores, n_awards)
    if isinstance(mode, Lottery):
        drawn = make_rng(mode.seed).choice(len(candidates), size=min(n_awards, len(candidates)), replace=False)
        chosen = set(int(i) for i in drawn)
        return [c for i, c in enumerate(candidates) if i in chosen]
    raise TypeError(f"Unknown final-round mode: {mode!r}")


# ==============================================================================
# f-index
# ==============================================================================

class FIndex(NamedTuple):
    flag: bool
    excess: int


class JournalFIndex(NamedTuple):
    ratio: float
    flagged_share: float


def f_index(paper: PaperRecord) -> FIndex:
    """Flag papers reporting more statistical tests than stated hypotheses.

    Examples:
        >>> f_index(PaperRecord("p", "f", 2010, 0, n_hypotheses=2, n_tests=5))
        FIndex(flag=True, excess=3)
    """
    excess = paper.n_tests - paper.n_hypotheses
    return FIndex(excess > 0, excess)


def f_index_journal(papers: Sequence[PaperRecord]) -> JournalFIndex:
    if not papers:
        raise EmptyPaperSetError("f_index_journal needs at least one paper")
    tests = sum(p.n_tests for p in papers)
    hypotheses = sum(p.n_hypotheses for p in papers)
    flagged = sum(f_index(p).flag for p in papers)
    return JournalFIndex(tests / max(1, hypotheses), flagged / len(papers))


# ==============================================================================
# Indicator tables
# ==============================================================================

@dataclass(frozen=True)
class IndicatorValue:
    unit_id: str
    name: str
    value: float
    unit: str
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValueError(f"Indicator {self.name} for {self.unit_id} is not finite")


def indicator_table(units: Sequence[ResearcherRecord | InstitutionRecord], dist: FieldYearDistribution,
                    top_fraction: float | None = None) -> list[IndicatorValue]:
    """publications, pptop10 and f_index_ratio per unit; share indicators only for units with papers."""
    fraction = _top_fraction(top_fraction)
    rows = []
    for unit in units:
        substantial = [p for p in unit.papers if p.doc_type in SUBSTANTIAL_DOC_TYPES]
        rows.append(IndicatorValue(unit.id, "publications", float(len(substantial)), "count",
                                   tuple(p.id for p in substantial)))
        if not unit.papers:
            continue
        ids = tuple(p.id for p in unit.papers)
        rows.append(IndicatorValue(unit.id, "pptop10", pptop_share(unit.papers, dist, fraction), "share", ids))
        rows.append(IndicatorValue(unit.id, "f_index_ratio", f_index_journal(unit.papers).ratio, "ratio", ids))
    return rows


def write_indicator_table(rows: Sequence[IndicatorValue], path: str) -> None:
    frame = pd.DataFrame([[r.unit_id, r.name, format_sig(r.value)] for r in rows],
                         columns=["unit_id", "indicator", "value"])
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"[BBH] Wrote {len(rows)} indicator values to {path}")


def write_assessments(assessments: Sequence[InstitutionAssessment], path: str) -> None:
    frame = pd.DataFrame(
        [[a.institution_id, a.verdict.value, format_sig(a.share), a.n_papers, a.first_year, a.last_year]
         for a in assessments],
        columns=["institution_id", "verdict", "share", "n_papers", "first_year", "last_year"])
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"[BBH] Wrote {len(assessments)} verdicts to {path}")


def write_shortlist(candidates: Sequence[ResearcherRecord], path: str) -> None:
    frame = pd.DataFrame(
        [[c.id, count_publications(c, (c.phd_start, c.phd_end)), sum(p.citations for p in c.papers)]
         for c in candidates],
        columns=["researcher_id", "phd_publications", "citations"])
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"[BBH] Wrote shortlist of {len(candidates)} to {path}")
