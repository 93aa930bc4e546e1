import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ternapg.apg import PufResponse
from ternapg.device import BiasModel, IDEAL_MODEL, build_device, device_from_biases
from ternapg.enrollment import enroll, puf_noise
from ternapg.errors import ContractError
from ternapg.metrics import (hamming_distance, inter_device_study, intra_device_study,
                             pair_distance, write_csv)

CREDS = [(f"user{k}".encode(), f"pw{k}".encode()) for k in range(10)]
BITS = st.lists(st.integers(0, 1), min_size=128, max_size=128)


def test_hamming_examples():
    x = PufResponse(np.random.default_rng(0).integers(0, 2, 128))
    assert hamming_distance(x, x) == 0
    assert hamming_distance(PufResponse([0] * 128), PufResponse([1] * 128)) == 128
    a = [1, 0, 1, 1] + [0] * 124
    b = [0, 0, 1, 1] + [0] * 124
    assert hamming_distance(PufResponse(a), PufResponse(b)) == 1
    with pytest.raises(ContractError):
        hamming_distance([0, 1], [0, 1, 1])


@given(BITS, BITS, BITS)
def test_hamming_is_a_metric(a, b, c):
    ab, ba = hamming_distance(a, b), hamming_distance(b, a)
    assert ab == ba
    assert (ab == 0) == (a == b)
    assert hamming_distance(a, c) <= ab + hamming_distance(b, c)


def test_ideal_intra_is_zero(ideal_device, ideal_map):
    report = intra_device_study(ideal_device, ideal_map, CREDS, 20, seed=5)
    assert report.intra_hd_mean == 0.0 and report.intra_hd_max == 0.0


def test_masking_removes_intra_noise(default_device, default_map):
    masked = intra_device_study(default_device, default_map, CREDS, 100, seed=500)
    unmasked = intra_device_study(default_device, default_map, CREDS, 100, seed=500, mask=False)
    assert unmasked.intra_hd_mean > 0
    assert masked.intra_hd_mean < unmasked.intra_hd_mean
    assert masked.intra_hd_mean == 0.0


def test_noise_matches_enrollment(default_device, default_map):
    report = intra_device_study(default_device, default_map, CREDS, 1)
    assert report.noise == puf_noise(default_map)


def test_same_seed_devices_are_identical():
    dev = build_device(4096, BiasModel(), 8)
    tmap = enroll(dev, 50, 8)
    assert pair_distance(dev, tmap, dev, tmap, CREDS[0]) == 0


def test_complementary_devices_disagree_everywhere():
    biases = build_device(4096, IDEAL_MODEL, 4).biases
    a, b = device_from_biases(biases, 1), device_from_biases(1 - biases, 2)
    assert pair_distance(a, enroll(a, 2, 0), b, enroll(b, 2, 0), CREDS[0]) == 128


def test_inter_device_uniqueness():
    report = inter_device_study(BiasModel(), CREDS, 30, seed=1, cell_count=8192, read_count=50)
    assert 0.4 <= report.inter_hd_mean <= 0.6
    assert report.trials == 30 and 0 <= report.inter_hd_std <= 1


def test_csv_schema(ideal_device, ideal_map):
    report = intra_device_study(ideal_device, ideal_map, CREDS, 3, seed=0)
    text = write_csv(report.rows)
    lines = text.splitlines()
    assert lines[0] == "trial,seed,hd,normalized_hd"
    assert lines[1] == "0,1,0,0.000000"
    buf = io.StringIO()
    write_csv(report.rows, buf)
    assert buf.getvalue() == text
