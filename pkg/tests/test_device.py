import numpy as np
import pytest

from ternapg.device import (BiasModel, IDEAL_MODEL, build_device, device_from_biases,
                            format_device_spec, load_device_spec, parse_device_spec,
                            power_up_read, power_up_reads, fuzzy_cells, read_bit)
from ternapg.errors import AddressOutOfRangeError, ConfigurationError, FormatError


def test_fully_stable_model_gives_extreme_biases():
    dev = build_device(128, BiasModel(stable_fraction=1.0), 7)
    assert set(np.unique(dev.biases)) <= {0.0, 1.0}


def test_fully_fuzzy_model_gives_interior_biases():
    dev = build_device(128, BiasModel(stable_fraction=0.0), 7)
    assert np.all((dev.biases > 0.0) & (dev.biases < 1.0))


def test_build_is_deterministic():
    a = build_device(4096, BiasModel(), 7)
    b = build_device(4096, BiasModel(), 7)
    assert np.array_equal(a.biases, b.biases)
    assert a == b and a.device_id == b.device_id


def test_different_seeds_differ():
    a = build_device(128, BiasModel(), 7)
    b = build_device(128, BiasModel(), 8)
    assert not np.array_equal(a.biases, b.biases)
    assert a.device_id != b.device_id


@pytest.mark.parametrize("fraction", [-0.1, 1.5, float("nan")])
def test_invalid_stable_fraction(fraction):
    with pytest.raises(ConfigurationError):
        build_device(128, BiasModel(stable_fraction=fraction), 1)


def test_invalid_cell_count():
    with pytest.raises(ConfigurationError):
        build_device(0, BiasModel(), 1)


def test_default_model_fuzzy_share_near_five_percent():
    dev = build_device(device_seed=11)
    share = len(fuzzy_cells(dev)) / dev.cell_count
    # binomial(65536, 0.05): sd ~ 0.00085
    assert abs(share - 0.05) < 0.005
    fuzzy = dev.biases[fuzzy_cells(dev)]
    assert fuzzy.min() >= 0.05 and fuzzy.max() <= 0.95


def test_degenerate_biases_are_constant():
    dev = device_from_biases([1.0, 0.0] * 8)
    for seed in range(50):
        assert list(power_up_read(dev, seed).bits) == [1, 0] * 8


def test_half_bias_monte_carlo():
    dev = device_from_biases([0.5], device_seed=3)
    mean = np.mean([power_up_read(dev, s).bits[0] for s in range(10_000)])
    assert 0.45 <= mean <= 0.55


def test_power_up_read_is_pure():
    dev = build_device(2048, BiasModel(stable_fraction=0.5), 5)
    first = power_up_read(dev, 42)
    for _ in range(100):
        assert power_up_read(dev, 42) == first
    assert power_up_read(dev, 43) != first


def test_stable_device_snapshots_identical():
    dev = build_device(4096, IDEAL_MODEL, 5)
    ref = power_up_read(dev, 0).bits
    for seed in (1, 2, 2**63, 2**64 - 1):
        assert np.array_equal(power_up_read(dev, seed).bits, ref)


def test_empirical_frequency_tracks_bias():
    dev = build_device(512, BiasModel(stable_fraction=0.0), 9)
    reads = np.array([power_up_read(dev, s).bits for s in range(1000)])
    freq = reads.mean(axis=0)
    se = np.sqrt(dev.biases * (1 - dev.biases) / 1000)
    within = np.abs(freq - dev.biases) <= 3 * se
    assert within.mean() >= 0.99


def test_batched_reads_match_single_reads():
    dev = build_device(1024, BiasModel(stable_fraction=0.5), 4)
    seeds = [10, 11, 12]
    batch = power_up_reads(dev, seeds)
    for row, seed in zip(batch, seeds):
        assert np.array_equal(row, power_up_read(dev, seed).bits[fuzzy_cells(dev)])


def test_read_bit():
    dev = device_from_biases([1.0, 0.0, 1.0])
    snap = power_up_read(dev, 0)
    assert read_bit(snap, 0) == 1
    assert read_bit(snap, 1) == 0
    with pytest.raises(AddressOutOfRangeError):
        read_bit(snap, 3)


def test_device_spec_round_trip(tmp_path):
    text = format_device_spec(256, BiasModel(0.9, 0.1, 0.8), 77, {3: 0.5})
    path = tmp_path / "dev.txt"
    path.write_text(text)
    dev = load_device_spec(path)
    assert dev.cell_count == 256 and dev.device_seed == 77
    assert dev.biases[3] == 0.5
    assert dev.model == BiasModel(0.9, 0.1, 0.8)


def test_device_spec_comments_and_defaults():
    dev = parse_device_spec("# rig\ndevice_seed = 0x10  # hex ok\n\ncell_count=64\n")
    assert dev.device_seed == 16 and dev.cell_count == 64


@pytest.mark.parametrize("text", [
    "cell_count = 64\n",                      # no seed
    "device_seed = 1\ncolor = red\n",
    "device_seed = x\n",
    "device_seed = 1\nbias[99] = 0.5\ncell_count = 64\n",
    "device_seed = 1\nbias[0] = 2.0\ncell_count = 64\n",
])
def test_device_spec_rejects(text):
    with pytest.raises((FormatError, ConfigurationError)):
        parse_device_spec(text)
