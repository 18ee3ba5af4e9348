import pytest

from bbh import (
    Activity, AgeMismatchError, EmptyPaperSetError, HighlyCited, Lottery, MinCitations, MissingCellError, TopCited,
    Verdict, assess_institution, build_distributions, citation_percentile, compare_researchers,
    count_publications, f_index, f_index_journal, indicator_table, is_top_paper, pptop_share,
    preselect_candidates, refine_preselection, select_final_round, write_indicator_table,
)
from envmodel import (
    DocType, InstitutionRecord, PaperRecord, ResearcherRecord, WorldParams, simulate_bibliometric_world,
)


def _paper(pid, citations, year=2010, field="f", doc_type=DocType.ARTICLE, **counts):
    return PaperRecord(pid, field, year, citations, doc_type, **counts)


@pytest.fixture
def thousand_cell():
    """One field-year cell with citation counts 0..999; the top 10% are counts >= 900."""
    return build_distributions(_paper(f"d{c}", c) for c in range(1000))


def _researcher(rid, counts_by_year, age=10, phd=(2005, 2009), citations=1, doc_type=DocType.ARTICLE):
    papers = []
    for year, count in counts_by_year.items():
        papers += [_paper(f"{rid}-{year}-{k}", citations, year=year, doc_type=doc_type) for k in range(count)]
    return ResearcherRecord(rid, age, phd[0], phd[1], tuple(papers))


# ==============================================================================
# Percentiles
# ==============================================================================

def test_mid_rank_percentile():
    dist = build_distributions(_paper(f"p{i}", i) for i in range(10))
    assert citation_percentile(_paper("p9", 9), dist) == 0.95
    assert citation_percentile(_paper("p0", 0), dist) == 0.05
    assert is_top_paper(_paper("p9", 9), dist, 0.10)
    assert not is_top_paper(_paper("p8", 8), dist, 0.10)


def test_tied_counts_share_a_percentile():
    dist = build_distributions(_paper(f"p{i}", 3) for i in range(4))
    assert citation_percentile(_paper("p0", 3), dist) == 0.5


def test_missing_cell():
    dist = build_distributions([_paper("p1", 1)])
    with pytest.raises(MissingCellError):
        citation_percentile(_paper("p2", 1, year=1999), dist)


def test_pptop_share_needs_papers(thousand_cell):
    with pytest.raises(EmptyPaperSetError):
        pptop_share([], thousand_cell)
    with pytest.raises(ValueError):
        pptop_share([_paper("x", 1)], thousand_cell, top_fraction=0.0)


def test_simulated_world_share_near_top_fraction():
    # one publication year so every field-year cell holds several hundred papers
    world = simulate_bibliometric_world(300, 10, 2, seed=1, params=WorldParams(first_year=2010, last_year=2010))
    assert min(world.distributions.cell(field, 2010).size for field in ("f1", "f2")) >= 500
    shares = {inst.id: pptop_share(inst.papers, world.distributions, 0.10) for inst in world.institutions}
    assert sum(shares.values()) / len(shares) == pytest.approx(0.10, abs=0.02)

    flagged = {
        inst.id for inst in world.institutions
        if assess_institution(inst, world.distributions, 0.10, 0.10).verdict is Verdict.ABOVE_AVERAGE
    }
    assert flagged == {uid for uid, share in shares.items() if share > 0.10}


# ==============================================================================
# Institutions
# ==============================================================================

def _institution(n_top, n_other):
    papers = [_paper(f"t{k}", 900 + k, year=2010) for k in range(n_top)]
    papers += [_paper(f"o{k}", k, year=2010) for k in range(n_other)]
    return InstitutionRecord("inst", tuple(papers))


def test_institution_above_average(thousand_cell):
    result = assess_institution(_institution(25, 75), thousand_cell, 0.20, 0.10)
    assert result.verdict is Verdict.ABOVE_AVERAGE
    assert result.share == pytest.approx(0.25)
    assert (result.n_papers, result.first_year, result.last_year) == (100, 2010, 2010)


def test_institution_at_threshold_is_not_above(thousand_cell):
    result = assess_institution(_institution(20, 80), thousand_cell, 0.20, 0.10)
    assert result.verdict is Verdict.NOT_ABOVE


def test_institution_without_papers(thousand_cell):
    with pytest.raises(EmptyPaperSetError):
        assess_institution(InstitutionRecord("empty"), thousand_cell, 0.2)


# ==============================================================================
# Researchers
# ==============================================================================

def test_compare_researchers_counts_substantial_papers_only():
    a = _researcher("a", {2010: 5})
    b = ResearcherRecord("b", 10, 2005, 2009,
                         _researcher("b", {2010: 3}).papers + _researcher("bx", {2011: 4}, doc_type=DocType.OTHER).papers)
    assert compare_researchers(a, b) is Activity.A_MORE_ACTIVE
    assert compare_researchers(b, a) is Activity.B_MORE_ACTIVE
    assert compare_researchers(a, _researcher("c", {2012: 5})) is Activity.INDETERMINATE


def test_compare_researchers_requires_matching_age():
    a, b = _researcher("a", {2010: 1}, age=10), _researcher("b", {2010: 2}, age=12)
    with pytest.raises(AgeMismatchError):
        compare_researchers(a, b)
    assert compare_researchers(a, b, age_tolerance=2) is Activity.B_MORE_ACTIVE


def test_count_publications_window_is_inclusive():
    r = _researcher("r", {2004: 1, 2005: 2, 2009: 3, 2010: 4})
    assert count_publications(r, (2005, 2009)) == 5
    assert count_publications(r) == 10
    with pytest.raises(ValueError):
        count_publications(r, doc_types=set())


def test_preselect_keeps_boundary_ties_in_input_order():
    candidates = [
        _researcher("r1", {2006: 1}),
        _researcher("r2", {2006: 3, 2015: 9}),
        _researcher("r3", {2007: 5}),
        _researcher("r4", {2008: 3}),
    ]
    chosen = preselect_candidates(candidates, 2)
    assert [c.id for c in chosen] == ["r2", "r3", "r4"]


def test_refine_preselection(thousand_cell):
    low = ResearcherRecord("low", 5, 2005, 2009, (_paper("l1", 10), _paper("l2", 20)))
    high = ResearcherRecord("high", 5, 2005, 2009, (_paper("h1", 950), _paper("h2", 990), _paper("h3", 5)))
    mid = ResearcherRecord("mid", 5, 2005, 2009, (_paper("m1", 920), _paper("m2", 1)))
    shortlist = [low, high, mid]
    assert [c.id for c in refine_preselection(shortlist, thousand_cell, MinCitations(100))] == ["high", "mid"]
    assert [c.id for c in refine_preselection(shortlist, thousand_cell, TopCited(1, 0.10))] == ["high"]
    with pytest.raises(ValueError):
        refine_preselection([], thousand_cell, MinCitations(1))


def test_final_round_highly_cited(thousand_cell):
    a = ResearcherRecord("a", 5, 2005, 2009, (_paper("a1", 950),))
    b = ResearcherRecord("b", 5, 2005, 2009, (_paper("b1", 960),))
    c = ResearcherRecord("c", 5, 2005, 2009, (_paper("c1", 10),))
    chosen = select_final_round([a, b, c], thousand_cell, 1, HighlyCited(0.10))
    assert [r.id for r in chosen] == ["a", "b"]


def test_lottery_is_uniform_and_seeded(thousand_cell):
    candidates = [_researcher(f"r{i}", {2006: 1}) for i in range(5)]
    counts = {c.id: 0 for c in candidates}
    for seed in range(10_000):
        chosen = select_final_round(candidates, thousand_cell, 2, Lottery(seed))
        assert len(chosen) == 2
        for c in chosen:
            counts[c.id] += 1
    for count in counts.values():
        assert abs(count / 10_000 - 0.4) <= 0.02
    first = select_final_round(candidates, thousand_cell, 2, Lottery(42))
    assert first == select_final_round(candidates, thousand_cell, 2, Lottery(42))


# ==============================================================================
# f-index and indicator tables
# ==============================================================================

def test_f_index():
    assert tuple(f_index(_paper("p", 0, n_hypotheses=2, n_tests=5))) == (True, 3)
    assert tuple(f_index(_paper("p", 0, n_hypotheses=3, n_tests=3))) == (False, 0)
    journal = f_index_journal([_paper("a", 0, n_hypotheses=2, n_tests=4), _paper("b", 0, n_hypotheses=2, n_tests=2)])
    assert journal.ratio == 1.5
    assert journal.flagged_share == 0.5


def test_indicator_table(thousand_cell, tmp_path):
    active = ResearcherRecord("r1", 5, 2005, 2009, (
        _paper("a", 990, n_hypotheses=1, n_tests=2),
        _paper("b", 3, doc_type=DocType.OTHER, n_hypotheses=1, n_tests=1),
    ))
    idle = ResearcherRecord("r2", 5, 2005, 2009)
    rows = indicator_table([active, idle], thousand_cell, 0.10)
    values = {(r.unit_id, r.name): r.value for r in rows}
    assert values == {
        ("r1", "publications"): 1.0,
        ("r1", "pptop10"): 0.5,
        ("r1", "f_index_ratio"): 1.5,
        ("r2", "publications"): 0.0,
    }
    path = tmp_path / "indicators.csv"
    write_indicator_table(rows, str(path))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "unit_id,indicator,value"
    assert lines[1] == "r1,publications,1"
