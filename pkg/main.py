import argparse
import json
import sys

import pandas as pd

from bbh import (
    MinCitations, TopCited, assess_institution, build_distributions, indicator_table, preselect_candidates,
    refine_preselection, write_assessments, write_indicator_table, write_shortlist,
)
from config import config
from envmodel import (
    SimSpec, load_environment, load_institutions, load_papers, load_researchers, simulate_bibliometric_world,
    simulate_environment, write_environment, write_world,
)
from fftbuild import CostRatio, build_fft, tree_from_text, tree_to_text
from harness import cross_validate, less_is_more_probe
from helpers import parse_float_cell, set_log_level, setup_logger
from report_exporter import emit_report
from strategies import load_strategies
from toolbox import fft_classify

logger = setup_logger(__name__)


def _read_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


# ==============================================================================
# Commands
# ==============================================================================

def cmd_simulate(args, seed: int) -> None:
    logger.info(f"[Simulate] Reading spec from {args.spec}")
    spec = SimSpec.from_dict(_read_json(args.spec)).with_seed(seed)
    env = simulate_environment(spec)
    write_environment(env, args.out)
    logger.info(f"[Simulate] Complete. {env.n_objects} objects, {env.n_cues} cues -> {args.out}")


def cmd_world(args, seed: int) -> None:
    world = simulate_bibliometric_world(args.researchers, args.institutions, args.fields, seed)
    write_world(world, args.out_dir)


def cmd_bench(args, seed: int) -> None:
    if args.env:
        source = load_environment(args.env, args.criterion)
    else:
        source = SimSpec.from_dict(_read_json(args.spec))
    strategies = load_strategies(args.strategies)
    report = cross_validate(source, strategies, reps=args.reps, train_fraction=args.train_frac,
                            master_seed=seed, task=args.task, max_workers=args.workers)
    for finding in less_is_more_probe(report):
        logger.info(f"[Bench] {finding.frugal} vs {finding.greedy}: {finding.effect.value} "
                    f"(difference {finding.difference:+.4f}, se {finding.standard_error:.4f})")
    emit_report(report, args.format, args.out)


def cmd_fft_build(args, seed: int) -> None:
    train = load_environment(args.train, args.criterion)
    tree = build_fft(train, args.ordering, args.exit, args.depth, CostRatio(args.cost_fn, args.cost_fp))
    _write_text(args.out, tree_to_text(tree))
    logger.info(f"[FFT] Depth-{tree.depth} tree written to {args.out}")


def cmd_fft_classify(args, seed: int) -> None:
    with open(args.tree, "r", encoding="utf-8") as f:
        tree = tree_from_text(f.read())
    cases = pd.read_csv(args.cases, dtype=str, keep_default_na=False, encoding="utf-8")
    if "id" not in cases.columns:
        raise ValueError(f"{args.cases}: first column must be 'id'")
    rows = []
    for line, (_, row) in enumerate(cases.iterrows(), start=2):
        values = {}
        for name in tree.cue_names:
            if name not in cases.columns:
                continue
            number = parse_float_cell(row[name])
            if number is None:
                raise ValueError(f"{args.cases}: non-numeric value {row[name]!r} in row {line}, column {name!r}")
            values[name] = number
        outcome = fft_classify(tree, values)
        rows.append([row["id"], str(outcome.label), outcome.exit_depth])
    pd.DataFrame(rows, columns=["id", "label", "exit_depth"]).to_csv(args.out, index=False, lineterminator="\n")
    logger.info(f"[FFT] Classified {len(rows)} cases -> {args.out}")


def cmd_bbh_assess(args, seed: int) -> None:
    dist = build_distributions(paper for paper, _, _ in load_papers(args.papers))
    institutions = [i for i in load_institutions(args.institutions, args.papers) if i.papers]
    verdicts = [assess_institution(inst, dist, args.x, args.top) for inst in institutions]
    write_assessments(verdicts, args.out)


def cmd_bbh_preselect(args, seed: int) -> None:
    dist = build_distributions(paper for paper, _, _ in load_papers(args.papers))
    shortlist = preselect_candidates(load_researchers(args.researchers, args.papers), args.k)
    if args.min_citations is not None:
        shortlist = refine_preselection(shortlist, dist, MinCitations(args.min_citations))
    if args.top_cited is not None and shortlist:
        shortlist = refine_preselection(shortlist, dist, TopCited(args.top_cited))
    write_shortlist(shortlist, args.out)


def cmd_bbh_indicators(args, seed: int) -> None:
    dist = build_distributions(paper for paper, _, _ in load_papers(args.papers))
    researchers = load_researchers(args.researchers, args.papers)
    write_indicator_table(indicator_table(researchers, dist), args.out)


# ==============================================================================
# Argument parsing
# ==============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="Master seed (falls back to FRUGAL_SEED)")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="Only log warnings and errors")

    parser = argparse.ArgumentParser(description="Fast-and-frugal heuristics, bibliometric heuristics, "
                                                 "and an out-of-sample benchmarking harness",
                                     parents=[common])
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("simulate", parents=[common], help="Simulate an environment CSV")
    p.add_argument("--spec", required=True, help="SimSpec JSON file")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_simulate)

    p = commands.add_parser("world", parents=[common], help="Simulate a bibliometric world")
    p.add_argument("--researchers", type=int, required=True)
    p.add_argument("--institutions", type=int, required=True)
    p.add_argument("--fields", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=cmd_world)

    p = commands.add_parser("bench", parents=[common], help="Cross-validate strategies")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--env", help="Environment CSV")
    source.add_argument("--spec", help="SimSpec JSON file")
    p.add_argument("--criterion", default="criterion", help="Criterion column of --env")
    p.add_argument("--strategies", required=True, help="JSON list of strategy specs")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--train-frac", type=float, default=None)
    p.add_argument("--task", choices=["classification", "comparison"], default="classification")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--format", choices=["csv", "json"], default=None, help="Defaults to the --out extension")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_bench)

    fft = commands.add_parser("fft", help="Build or apply fast-and-frugal trees")
    fft_commands = fft.add_subparsers(dest="fft_command", required=True)
    p = fft_commands.add_parser("build", parents=[common])
    p.add_argument("--train", required=True)
    p.add_argument("--criterion", default="criterion")
    p.add_argument("--ordering", choices=["validity", "maxpv"], default="validity")
    p.add_argument("--exit", choices=["zigzag", "max"], default="max")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--cost-fn", type=float, default=1.0)
    p.add_argument("--cost-fp", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_fft_build)
    p = fft_commands.add_parser("classify", parents=[common])
    p.add_argument("--tree", required=True)
    p.add_argument("--cases", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_fft_classify)

    bbh = commands.add_parser("bbh", help="Bibliometrics-based heuristics")
    bbh_commands = bbh.add_subparsers(dest="bbh_command", required=True)
    p = bbh_commands.add_parser("assess", parents=[common])
    p.add_argument("--papers", required=True)
    p.add_argument("--institutions", required=True)
    p.add_argument("--top", type=float, default=None)
    p.add_argument("--x", type=float, default=0.20)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_bbh_assess)
    p = bbh_commands.add_parser("preselect", parents=[common])
    p.add_argument("--researchers", required=True)
    p.add_argument("--papers", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--min-citations", type=int, default=None)
    p.add_argument("--top-cited", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_bbh_preselect)
    p = bbh_commands.add_parser("indicators", parents=[common])
    p.add_argument("--researchers", required=True)
    p.add_argument("--papers", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_bbh_indicators)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "quiet", False):
        set_log_level("WARNING")
    seed = getattr(args, "seed", None)
    seed = config.SEED if seed is None else seed
    try:
        args.handler(args, seed)
    except (ValueError, KeyError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
