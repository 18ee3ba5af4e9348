import os

import numpy as np
import pytest

from conftest import GREEN_MEHR_CSV, make_env
from envmodel import (
    CSVParseError, SchemaError, SimSpec, TooFewObjectsError, UnreachableRedundancyError, WorldParams,
    add_any_cue, calibrate_loading, cue_weights, load_environment, load_world, mean_pairwise_correlation,
    simulate_bibliometric_world, simulate_environment, split_environment, write_environment, write_world,
)


def _write(tmp_path, text: str) -> str:
    path = tmp_path / "env.csv"
    path.write_text(text, encoding="utf-8")
    return str(path)


# ==============================================================================
# Ingestion
# ==============================================================================

def test_load_three_rows(tmp_path):
    env = load_environment(_write(tmp_path, "id,a,b,y\nx1,1,0,1\nx2,0,1,0\nx3,1,1,1\n"), "y")
    assert env.n_objects == 3
    assert env.cue_names == ("a", "b")
    assert list(env.criterion) == [1, 0, 1]
    assert list(env.directions) == [1.0, 1.0]


def test_non_binary_criterion_names_row(tmp_path):
    with pytest.raises(SchemaError) as info:
        load_environment(_write(tmp_path, "id,a,y\nx1,1,1\nx2,0,2\n"), "y")
    assert info.value.row == 3
    assert info.value.column == "y"


def test_non_numeric_cell_names_row_and_column(tmp_path):
    with pytest.raises(SchemaError) as info:
        load_environment(_write(tmp_path, "id,a,b,y\nx1,1,0,1\nx2,zero,1,0\n"), "y")
    assert (info.value.row, info.value.column) == (3, "a")


def test_duplicate_cue_names(tmp_path):
    with pytest.raises(SchemaError):
        load_environment(_write(tmp_path, "id,a,a,y\nx1,1,0,1\nx2,0,1,0\n"), "y")


def test_missing_value_rejected(tmp_path):
    with pytest.raises(SchemaError):
        load_environment(_write(tmp_path, "id,a,y\nx1,,1\nx2,0,0\n"), "y")


def test_malformed_csv(tmp_path):
    with pytest.raises(CSVParseError):
        load_environment(_write(tmp_path, "id,a,y\nx1,1,1,9,9\nx2,0,0\n"), "y")


def test_direction_row(tmp_path):
    env = load_environment(_write(tmp_path, "id,a,b,y\ndirection,+1,-1,\nx1,1,0,1\nx2,0,5,0\n"), "y")
    assert [c.direction for c in env.cues] == [1, -1]
    assert env.n_objects == 2


def test_write_then_load_preserves_directions(tmp_path):
    env = make_env([[1, 2.5], [0, 3.0], [1, 0.0]], [1, 0, 1], directions=[1, -1])
    path = str(tmp_path / "out.csv")
    write_environment(env, path)
    again = load_environment(path, "criterion")
    assert again.cue_names == env.cue_names
    assert [c.direction for c in again.cues] == [1, -1]
    np.testing.assert_array_equal(again.values, env.values)


def test_green_mehr_fixture():
    env = load_environment(GREEN_MEHR_CSV, "ccu")
    assert env.n_objects == 128
    assert env.cue_names == ("st_change", "chest_pain_chief", "s1", "s2", "s3", "s4", "s5")
    assert len({tuple(row) for row in env.values}) == 128


def test_add_any_cue(green_mehr_env):
    any_sign = green_mehr_env.column("any_sign")
    signs = np.column_stack([green_mehr_env.column(f"s{i}") for i in range(1, 6)])
    np.testing.assert_array_equal(any_sign, signs.max(axis=1))


# ==============================================================================
# Splitting
# ==============================================================================

def test_split_cardinality_and_disjointness():
    env = make_env(np.arange(10), [0, 1] * 5)
    split = split_environment(env, 0.5, 7)
    assert split.train.n_objects == 5 and split.test.n_objects == 5
    assert set(split.train.objects).isdisjoint(split.test.objects)
    assert set(split.train.objects) | set(split.test.objects) == set(env.objects)
    assert split.train.cue_names == split.test.cue_names == env.cue_names


def test_split_is_deterministic():
    env = make_env(np.arange(10), [0, 1] * 5)
    first, second = split_environment(env, 0.5, 7), split_environment(env, 0.5, 7)
    assert first.train.objects == second.train.objects
    assert first.test.objects == second.test.objects


def test_split_too_few_objects():
    env = make_env(np.arange(3), [0, 1, 0])
    with pytest.raises(TooFewObjectsError):
        split_environment(env, 0.5, 0)


def test_split_fairness_over_seeds():
    env = make_env(np.arange(10), [0, 1] * 5)
    counts = {o: 0 for o in env.objects}
    for seed in range(1000):
        for o in split_environment(env, 0.3, seed).train.objects:
            counts[o] += 1
    for count in counts.values():
        assert abs(count / 1000 - 0.3) <= 0.05


# ==============================================================================
# Simulation
# ==============================================================================

@pytest.mark.parametrize("profile", ["noncompensatory", "uniform"])
def test_single_cue_noise_free_criterion_equals_cue(profile):
    env = simulate_environment(SimSpec(n_objects=50, n_cues=1, weight_profile=profile, seed=3))
    np.testing.assert_array_equal(env.values[:, 0], env.criterion)


def test_simulation_is_deterministic():
    spec = SimSpec(n_objects=40, n_cues=4, redundancy=0.3, noise=0.1, seed=11)
    a, b = simulate_environment(spec), simulate_environment(spec)
    assert a.objects == b.objects
    np.testing.assert_array_equal(a.values, b.values)
    np.testing.assert_array_equal(a.criterion, b.criterion)


@pytest.mark.parametrize("redundancy", [0.0, 0.3, 0.6, 0.9])
def test_redundancy_reached(redundancy):
    env = simulate_environment(SimSpec(n_objects=2000, n_cues=4, redundancy=redundancy, seed=5))
    assert abs(mean_pairwise_correlation(env) - redundancy) <= 0.1


@pytest.mark.parametrize("redundancy", [0.0, 0.5])
@pytest.mark.parametrize("profile", ["noncompensatory", "uniform"])
def test_noise_free_criterion_splits_weighted_cue_sum(profile, redundancy):
    env = simulate_environment(SimSpec(n_objects=2000, n_cues=4, weight_profile=profile,
                                       redundancy=redundancy, seed=3))
    score = env.values @ (cue_weights(profile, 4) * env.directions)
    np.testing.assert_array_equal(env.criterion, (score > np.median(score)).astype(np.int8))


def test_noncompensatory_least_squares_weights_favour_first_cue():
    # halving weights on binary cues: the first cue outweighs all others combined
    env = simulate_environment(SimSpec(n_objects=10_000, n_cues=4, seed=21))
    X = np.column_stack([np.ones(env.n_objects), env.values])
    beta = np.linalg.lstsq(X, env.criterion.astype(float), rcond=None)[0][1:]
    assert beta[0] > 0.5
    assert beta[0] > 4 * max(beta[1:])
    assert all(b >= -1e-6 for b in beta[1:])


def test_unreachable_redundancy():
    with pytest.raises(UnreachableRedundancyError):
        calibrate_loading(0.5, iterations=1)


def test_simspec_validation():
    with pytest.raises(ValueError):
        SimSpec(n_objects=3, n_cues=2)
    with pytest.raises(ValueError):
        SimSpec(n_objects=10, n_cues=2, noise=0.6)
    with pytest.raises(ValueError):
        SimSpec.from_dict({"n_objects": 10, "n_cues": 2, "bogus": 1})


# ==============================================================================
# Bibliometric world
# ==============================================================================

def test_world_zero_sigma_gives_identical_counts():
    world = simulate_bibliometric_world(30, 3, 1, seed=2, params=WorldParams(field_params=((1.5, 0.0),)))
    for counts in world.distributions.cells.values():
        assert len(set(counts.tolist())) == 1


def test_world_is_deterministic():
    a = simulate_bibliometric_world(20, 4, 2, seed=9)
    b = simulate_bibliometric_world(20, 4, 2, seed=9)
    assert a.researchers == b.researchers
    assert a.institutions == b.institutions


def test_world_csv_round_trip(tmp_path):
    world = simulate_bibliometric_world(15, 3, 2, seed=4)
    paths = write_world(world, str(tmp_path / "world"))
    assert all(os.path.exists(p) for p in paths.values())
    again = load_world(str(tmp_path / "world"))
    assert again.researchers == world.researchers
    assert {i.id: len(i.papers) for i in again.institutions} == {i.id: len(i.papers) for i in world.institutions}
