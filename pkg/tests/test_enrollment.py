import numpy as np
import pytest
from hypothesis import given, strategies as st

from ternapg.device import BiasModel, IDEAL_MODEL, build_device, device_from_biases, power_up_read
from ternapg.enrollment import (CellState, TernaryMap, cycle_seeds, enroll, load_map,
                                map_from_bytes, map_to_bytes, pack_states, puf_noise,
                                reference_bit, save_map)
from ternapg.errors import (AddressOutOfRangeError, ConfigurationError, FormatError,
                            FuzzyCellError, UnsupportedVersionError)

from conftest import make_map


def brute_force_classify(device, read_count, base_seed):
    reads = np.array([power_up_read(device, s).bits for s in cycle_seeds(base_seed, read_count)])
    states = np.where(reads.min(axis=0) == reads.max(axis=0), reads[0], CellState.FUZZY)
    return states.astype(np.uint8)


def test_degenerate_cells():
    dev = device_from_biases([1.0, 0.0, 0.5])
    tmap = enroll(dev, 100, 0)
    assert list(tmap.states) == [CellState.STABLE1, CellState.STABLE0, CellState.FUZZY]
    assert tmap.render() == "10X"


def test_read_count_must_reveal_instability():
    dev = device_from_biases([0.5])
    with pytest.raises(ConfigurationError):
        enroll(dev, 1, 0)


def test_matches_brute_force_unanimity():
    dev = build_device(2048, BiasModel(stable_fraction=0.7), 12)
    tmap = enroll(dev, 25, 5)
    assert np.array_equal(tmap.states, brute_force_classify(dev, 25, 5))


def test_deterministic(default_device, default_map):
    assert enroll(default_device, 200, 0) == default_map


def test_more_reads_only_add_fuzzy_cells():
    dev = build_device(8192, BiasModel(stable_fraction=0.5, fuzzy_low=0.01, fuzzy_high=0.99), 3)
    previous = None
    for reads in (2, 5, 20, 100):
        fuzzy = enroll(dev, reads, 0).fuzzy_mask
        if previous is not None:
            assert np.all(fuzzy[previous])
        previous = fuzzy


def test_reference_bits_agree_with_every_enrollment_read():
    dev = build_device(1024, BiasModel(stable_fraction=0.6), 21)
    tmap = enroll(dev, 30, 100)
    stable = ~tmap.fuzzy_mask
    for seed in cycle_seeds(100, 30):
        bits = power_up_read(dev, seed).bits
        assert np.array_equal(bits[stable], tmap.states[stable])


@pytest.mark.parametrize("reads", [2, 3, 50])
def test_ideal_model_has_no_noise(reads):
    assert puf_noise(enroll(build_device(4096, IDEAL_MODEL, 1), reads, 0)) == 0.0


def test_noise_converges_between_200_and_1000_reads():
    dev = build_device(device_seed=5)
    assert abs(puf_noise(enroll(dev, 200, 0)) - puf_noise(enroll(dev, 1000, 0))) < 0.01


@pytest.mark.parametrize("fuzzy,total,expected", [(0, 128, 0.0), (128, 128, 1.0), (5, 100, 0.05)])
def test_puf_noise(fuzzy, total, expected):
    states = [CellState.FUZZY] * fuzzy + [CellState.STABLE1] * (total - fuzzy)
    assert puf_noise(make_map(states)) == expected


def test_reference_bit():
    tmap = make_map([1, 0, 2])
    assert reference_bit(tmap, 0) == 1
    assert reference_bit(tmap, 1) == 0
    with pytest.raises(FuzzyCellError):
        reference_bit(tmap, 2)
    with pytest.raises(AddressOutOfRangeError):
        reference_bit(tmap, 3)


def test_map_invariants():
    with pytest.raises(ConfigurationError):
        TernaryMap(np.zeros(4, np.uint8), read_count=1)
    with pytest.raises(ConfigurationError):
        TernaryMap(np.full(4, 3, np.uint8), read_count=2)


def test_packing_layout():
    # cell 0 in the low bits, four cells per byte
    assert pack_states(np.array([0, 1, 2, 0, 1], np.uint8)) == bytes([0b00100100, 0b01])


@given(st.lists(st.sampled_from([0, 1, 2]), min_size=1, max_size=300),
       st.integers(2, 2**32 - 1), st.binary(min_size=16, max_size=16))
def test_map_bytes_round_trip(states, reads, device_id):
    tmap = TernaryMap(np.array(states, np.uint8), reads, device_id)
    assert map_from_bytes(map_to_bytes(tmap)) == tmap


def test_map_header_layout(tmp_path, default_map):
    path = tmp_path / "m.puf3"
    save_map(default_map, path)
    data = path.read_bytes()
    assert data[:4] == b"PUF3"
    assert int.from_bytes(data[4:6], "little") == 1
    assert int.from_bytes(data[6:10], "little") == 65536
    assert int.from_bytes(data[10:14], "little") == 200
    assert len(data) == 30 + 65536 // 4
    assert load_map(path) == default_map


def test_map_rejects_bad_files(default_map):
    data = map_to_bytes(default_map)
    with pytest.raises(FormatError):
        map_from_bytes(b"XXXX" + data[4:])
    with pytest.raises(UnsupportedVersionError):
        map_from_bytes(data[:4] + (2).to_bytes(2, "little") + data[6:])
    with pytest.raises(FormatError):
        map_from_bytes(data[:-1])
    with pytest.raises(FormatError):
        map_from_bytes(data[:10])
    with pytest.raises(FormatError) as exc:
        map_from_bytes(data[:40] + b"\xff" + data[41:])
    assert exc.value.offset == 40
