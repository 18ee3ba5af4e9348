import pytest

from config import DEFAULT_CONFIG, Config
from seeding import derive_seed, fair_coin, make_rng, splitmix64


def test_derived_seeds_are_distinct_and_stable():
    seeds = [derive_seed(42, r) for r in range(1000)]
    assert len(set(seeds)) == 1000
    assert seeds == [derive_seed(42, r) for r in range(1000)]
    assert all(0 <= s < 2**64 for s in seeds)


def test_master_seed_changes_every_stream():
    assert all(derive_seed(1, r) != derive_seed(2, r) for r in range(100))


def test_splitmix64_known_value():
    # first output of the reference generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_negative_seeds_rejected():
    with pytest.raises(ValueError):
        derive_seed(-1, 0)
    with pytest.raises(ValueError):
        make_rng(-3)


def test_fair_coin_is_balanced():
    heads = sum(fair_coin(derive_seed(7, k)) for k in range(10_000))
    assert abs(heads / 10_000 - 0.5) <= 0.02


def test_config_reads_prefixed_environment(monkeypatch):
    monkeypatch.setenv("FRUGAL_REPS", "7")
    monkeypatch.setenv("FRUGAL_RECORD_TIMING", "yes")
    monkeypatch.setenv("FRUGAL_TRAIN_FRACTION", " ")
    fresh = Config()
    assert fresh.REPS == 7
    assert fresh.RECORD_TIMING is True
    assert fresh.TRAIN_FRACTION == float(DEFAULT_CONFIG["train_fraction"])
    assert fresh.MAX_WORKERS >= 1
