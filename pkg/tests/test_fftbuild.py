import numpy as np
import pytest

from conftest import make_env
from envmodel import SimSpec, simulate_environment, split_environment
from fftbuild import (
    ConstantCueError, CostRatio, CueStat, ExitPolicy, OrderingRule, SingleClassError, TreeFormatError,
    best_split, binarize_cue, build_fft, classify_environment, compute_cue_stats, discrimination_rate, green_mehr_tree,
    order_cues, tree_from_text, tree_to_text, tune_fft_cost,
)
from seeding import make_rng
from toolbox import Comparison, Label, fft_classify


def _validity_by_pairs(values, criterion, direction):
    correct = wrong = 0
    for i in range(len(values)):
        for j in range(len(values)):
            if criterion[i] == 1 and criterion[j] == 0:
                a, b = direction * values[i], direction * values[j]
                if a > b:
                    correct += 1
                elif a < b:
                    wrong += 1
    return correct / (correct + wrong) if correct + wrong else 0.5


# ==============================================================================
# Cue statistics
# ==============================================================================

def test_validity_examples():
    env = make_env([[1, 1], [1, 0], [0, 1], [0, 0]], [1, 1, 0, 0])
    stats = compute_cue_stats(env)
    assert stats[0].validity == 1.0
    assert stats[1].validity == 0.5
    assert stats[0].discrimination_rate == pytest.approx(4 / 6)


def test_validity_counts_only_discriminating_pairs():
    env = make_env([[1], [0], [0], [0]], [1, 1, 0, 0])
    assert compute_cue_stats(env)[0].validity == 1.0


def test_validity_respects_direction():
    env = make_env([[0], [0], [1], [1]], [1, 1, 0, 0], directions=[-1])
    assert compute_cue_stats(env)[0].validity == 1.0


def test_validity_matches_pairwise_count():
    rng = make_rng(17)
    for _ in range(1000):
        n = int(rng.integers(2, 12))
        values = rng.integers(0, 4, size=(n, 2)).astype(float)
        criterion = rng.integers(0, 2, size=n)
        directions = [int(d) for d in rng.choice([1, -1], size=2)]
        stats = compute_cue_stats(make_env(values, criterion, directions=directions))
        for cue in range(2):
            expected = _validity_by_pairs(values[:, cue], criterion, directions[cue])
            assert abs(stats[cue].validity - expected) <= 1e-12


def test_constant_cue_statistics():
    env = make_env([[1, 0], [1, 1], [1, 0]], [1, 0, 0])
    stat = compute_cue_stats(env)[0]
    assert stat.constant and stat.discrimination_rate == 0.0
    assert stat.validity == 0.5
    assert stat.ppv is None and stat.npv is None
    assert stat.max_predictive_value == -1.0


def test_predictive_values():
    env = make_env([[1], [1], [1], [0], [0]], [1, 1, 0, 0, 0])
    stat = compute_cue_stats(env)[0]
    assert (stat.threshold, stat.comparison) == (0.5, Comparison.GE)
    assert stat.ppv == pytest.approx(2 / 3)
    assert stat.npv == 1.0
    assert stat.hit_rate == 1.0
    assert stat.false_alarm_rate == pytest.approx(1 / 3)


def test_discrimination_rate_edge_cases():
    assert discrimination_rate(np.array([3.0])) == 0.0
    assert discrimination_rate(np.array([1.0, 2.0, 3.0])) == 1.0


# ==============================================================================
# Binarization
# ==============================================================================

def test_best_split_examples():
    split = best_split(np.array([1.0, 2.0, 3.0, 4.0]), np.array([0, 0, 1, 1]))
    assert (split.threshold, split.comparison) == (2.5, Comparison.GE)
    split = best_split(np.array([1.0, 2.0, 3.0, 4.0]), np.array([1, 1, 0, 0]))
    assert (split.threshold, split.comparison) == (2.5, Comparison.LT)


def test_best_split_prefers_smaller_threshold_on_ties():
    split = best_split(np.array([1.0, 2.0, 3.0]), np.array([0, 1, 0]))
    assert (split.threshold, split.comparison) == (1.5, Comparison.GE)


def test_binarize_cue_on_environment():
    env = make_env([[1, 7], [2, 7], [3, 7], [4, 7]], [1, 1, 0, 0])
    split = binarize_cue(env, 0)
    assert (split.threshold, split.comparison) == (2.5, Comparison.LT)
    binary = make_env([[1], [0], [1], [0]], [1, 0, 0, 1])
    assert binarize_cue(binary, 0).threshold == 0.5
    with pytest.raises(ConstantCueError, match="c2"):
        binarize_cue(env, 1)


def test_best_split_errors():
    with pytest.raises(ConstantCueError):
        best_split(np.array([2.0, 2.0]), np.array([0, 1]))
    with pytest.raises(SingleClassError):
        best_split(np.array([1.0, 2.0]), np.array([1, 1]))


# ==============================================================================
# Ordering
# ==============================================================================

def _ordering_env():
    values = [[1, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 0], [1, 0, 0, 0]]
    return make_env(values, [1, 1, 0, 0])


@pytest.mark.parametrize("rule", ["validity", "maxpv", "by_validity", OrderingRule.BY_MAX_PREDICTIVE_VALUE])
def test_order_cues_constant_last_ties_by_index(rule):
    order = order_cues(compute_cue_stats(_ordering_env()), rule)
    assert order.indices == (2, 3, 1, 0)


def _stat(cue, validity, ppv=None, npv=None):
    return CueStat(cue, f"c{cue + 1}", 1, validity, 0.5, ppv, npv, None, None, 0.5, Comparison.GE)


def test_order_by_validity_example():
    stats = [_stat(0, 0.9), _stat(1, 0.6), _stat(2, 0.75)]
    assert order_cues(stats, "validity").indices == (0, 2, 1)
    assert order_cues([_stat(k, 0.7) for k in range(3)]).indices == (0, 1, 2)


def test_order_by_max_predictive_value_example():
    stats = [_stat(0, 0.9, ppv=0.8, npv=0.4), _stat(1, 0.6, ppv=0.3, npv=0.9)]
    assert order_cues(stats, OrderingRule.BY_MAX_PREDICTIVE_VALUE).indices == (1, 0)


def test_order_cues_rejects_empty():
    with pytest.raises(ValueError):
        order_cues(())


# ==============================================================================
# Tree construction
# ==============================================================================

def test_green_mehr_tree_is_recovered(green_mehr_env):
    assert build_fft(green_mehr_env, max_depth=3) == green_mehr_tree()


def test_depth_one_tree(green_mehr_env):
    tree = build_fft(green_mehr_env, max_depth=1)
    assert tree.nodes == ()
    assert tree.final.cue_name == "st_change"
    assert (tree.final.hit_label, tree.final.miss_label) == (Label.POSITIVE, Label.NEGATIVE)


def test_depth_is_clamped_to_usable_cues(green_mehr_env):
    tree = build_fft(green_mehr_env, max_depth=20)
    assert tree.depth == green_mehr_env.n_cues


def test_build_errors():
    with pytest.raises(SingleClassError):
        build_fft(make_env([[0], [1], [1]], [1, 1, 1]))
    with pytest.raises(ConstantCueError):
        build_fft(make_env([[1], [1], [1]], [1, 0, 1]))
    with pytest.raises(ValueError):
        build_fft(make_env([[0], [1]], [0, 1]), max_depth=0)


def test_zigzag_alternates_exits(green_mehr_env):
    tree = build_fft(green_mehr_env, exit_policy=ExitPolicy.ZIGZAG, max_depth=4)
    labels = [node.exit_label for node in tree.nodes]
    assert all(labels[k] != labels[k + 1] for k in range(len(labels) - 1))


def test_false_negatives_fall_as_miss_cost_rises():
    for seed in range(100):
        env = simulate_environment(SimSpec(n_objects=60, n_cues=4, noise=0.2, seed=seed))
        split = split_environment(env, 0.5, seed)
        y = split.test.criterion == 1
        previous = None
        for cost_fn in (1, 2, 5, 10):
            tree = build_fft(split.train, costs=CostRatio(cost_fn, 1), max_depth=3)
            predicted, _ = classify_environment(tree, split.test)
            fn = int(((predicted == 0) & y).sum())
            assert previous is None or fn <= previous
            previous = fn


def _training_balanced_accuracy(tree, env) -> float:
    labels, _ = classify_environment(tree, env)
    predicted, y = labels == 1, env.criterion == 1
    return ((predicted & y).sum() / y.sum() + (~predicted & ~y).sum() / (~y).sum()) / 2


@pytest.mark.parametrize("profile", ["noncompensatory", "uniform"])
def test_deeper_trees_never_lose_training_balanced_accuracy(profile):
    for seed in range(100):
        env = simulate_environment(SimSpec(n_objects=60, n_cues=5, weight_profile=profile,
                                           redundancy=0.3, noise=0.2, seed=seed))
        previous = None
        for depth in range(1, 6):
            tree = build_fft(env, max_depth=depth)
            score = _training_balanced_accuracy(tree, env)
            assert previous is None or score >= previous - 1e-12, f"seed {seed}, depth {depth}"
            previous = score


def test_classify_environment_agrees_with_fft_classify():
    env = simulate_environment(SimSpec(n_objects=80, n_cues=5, redundancy=0.3, noise=0.1, seed=8))
    tree = build_fft(env, max_depth=4)
    labels, depths = classify_environment(tree, env)
    for i in range(env.n_objects):
        outcome = fft_classify(tree, dict(zip(env.cue_names, env.values[i])))
        assert (int(outcome.label), outcome.exit_depth) == (labels[i], depths[i])
        assert outcome.cues_consulted <= tree.depth


# ==============================================================================
# Cost tuning
# ==============================================================================

def _tuning_split():
    env = simulate_environment(SimSpec(n_objects=120, n_cues=4, noise=0.2, seed=31))
    return split_environment(env, 0.5, 2)


def test_tune_single_candidate_equals_direct_build():
    split = _tuning_split()
    costs = CostRatio(3, 1)
    tuned = tune_fft_cost(split.train, split.test, [costs])
    assert tuned.tree == build_fft(split.train, costs=costs)
    assert tuned.costs == costs


def test_tune_larger_candidate_set_never_worse():
    split = _tuning_split()
    few = [CostRatio(1, 1)]
    many = few + [CostRatio(c, 1) for c in (0.5, 2, 5, 10)]
    assert min(tune_fft_cost(split.train, split.test, many).weighted_errors) <= \
        min(tune_fft_cost(split.train, split.test, few).weighted_errors)


def test_tune_requires_validation_and_candidates():
    split = _tuning_split()
    with pytest.raises(ValueError):
        tune_fft_cost(split.train, None, [CostRatio()])
    with pytest.raises(ValueError):
        tune_fft_cost(split.train, split.test, [])


def test_cost_ratio_must_be_positive():
    with pytest.raises(ValueError):
        CostRatio(0, 1)


# ==============================================================================
# Text codec
# ==============================================================================

def test_text_round_trip(green_mehr_env):
    tree = green_mehr_tree()
    text = tree_to_text(tree)
    assert text.splitlines()[0] == "st_change >= 0.5 -> EXIT(positive)"
    assert tree_from_text(text, green_mehr_env.cue_names) == tree


def test_text_round_trip_of_built_tree():
    env = simulate_environment(SimSpec(n_objects=50, n_cues=3, noise=0.1, seed=4))
    tree = build_fft(env)
    again = tree_from_text(tree_to_text(tree), env.cue_names)
    assert again == tree


@pytest.mark.parametrize("text", [
    "",
    "garbage",
    "a >= 0.5 -> EXIT(positive) | EXIT(negative)\nb < 1 -> EXIT(negative)",
    "a >= 0.5 -> EXIT(positive)",
    "a >= nan -> EXIT(positive) | EXIT(negative)",
    "a >= abc -> EXIT(positive) | EXIT(negative)",
])
def test_text_parse_errors(text):
    with pytest.raises(TreeFormatError):
        tree_from_text(text)


def test_non_numeric_threshold_names_its_line():
    with pytest.raises(TreeFormatError, match="Line 2"):
        tree_from_text("a >= 0.5 -> EXIT(positive)\nb < 1,5 -> EXIT(negative) | EXIT(positive)")


def test_unknown_cue_in_text():
    with pytest.raises(TreeFormatError):
        tree_from_text("zzz >= 1 -> EXIT(positive) | EXIT(negative)", cue_names=["a"])
