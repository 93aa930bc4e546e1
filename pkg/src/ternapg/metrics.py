"""PUF quality statistics: noise, reproducibility and uniqueness."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import apg
from .apg import DEFAULT_CONFIG, ApgConfig, PufResponse
from .device import DEFAULT_CELL_COUNT, BiasModel, build_device, power_up_read
from .enrollment import DEFAULT_READ_COUNT, TernaryMap, enroll, puf_noise
from .errors import ConfigurationError, ContractError

CSV_COLUMNS = ("trial", "seed", "hd", "normalized_hd")


def hamming_distance(a, b) -> int:
    a = a.bits if isinstance(a, PufResponse) else np.asarray(a)
    b = b.bits if isinstance(b, PufResponse) else np.asarray(b)
    if a.shape != b.shape:
        raise ContractError(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))


@dataclass
class TrialRow:
    trial: int
    seed: int
    hd: int

    @property
    def normalized_hd(self) -> float:
        return self.hd / apg.RESPONSE_BITS


@dataclass
class MetricsReport:
    noise: float = 0.0
    intra_hd_mean: float = 0.0
    intra_hd_max: float = 0.0
    inter_hd_mean: float = 0.0
    inter_hd_std: float = 0.0
    trials: int = 0
    rows: list[TrialRow] = field(default_factory=list, repr=False)


def _addresses(user_id, password, tmap, config, mask):
    md = apg.password_digest(password, user_id, config.input_convention)
    long_digest = apg.expand(md, config.expander_variant)
    raw = apg.derive_addresses(long_digest, tmap.cell_count, config.endianness)
    return apg.mask_addresses(raw, tmap) if mask else raw


def intra_device_study(device, tmap: TernaryMap, credentials, trials: int, seed: int = 0,
                       mask: bool = True, config: ApgConfig = DEFAULT_CONFIG) -> MetricsReport:
    """Response drift of one device across fresh power cycles.

    Trial ``t`` uses credentials ``t % len(credentials)`` and cycle seed
    ``seed + 1 + t``. With masking the reference is the map's enrollment-time
    response. ``mask=False`` is diagnostic only: the raw addresses may hit
    fuzzy cells, which have no reference value, so the reference becomes a
    single power-up read at cycle ``seed``.
    """
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    credentials = list(credentials)
    if not credentials:
        raise ConfigurationError("at least one (user_id, password) pair is needed")
    plan = [_addresses(uid, pw, tmap, config, mask) for uid, pw in credentials]
    if mask:
        references = [apg.extract_response(a, tmap) for a in plan]
    else:
        ref_snapshot = power_up_read(device, seed)
        references = [apg._read_bits(a.addresses, ref_snapshot) for a in plan]
    rows = []
    for t in range(trials):
        k = t % len(credentials)
        cycle = seed + 1 + t
        fresh = apg._read_bits(plan[k].addresses, power_up_read(device, cycle))
        rows.append(TrialRow(t, cycle, hamming_distance(references[k], fresh)))
    hds = np.array([r.normalized_hd for r in rows])
    return MetricsReport(noise=puf_noise(tmap), intra_hd_mean=float(hds.mean()),
                         intra_hd_max=float(hds.max()), trials=trials, rows=rows)


def inter_device_study(model: BiasModel, credentials, device_pairs: int, seed: int = 0,
                       cell_count: int = DEFAULT_CELL_COUNT,
                       read_count: int = DEFAULT_READ_COUNT,
                       config: ApgConfig = DEFAULT_CONFIG) -> MetricsReport:
    """Response distance between independently seeded devices.

    Pair ``k`` uses device seeds ``seed + 2k`` and ``seed + 2k + 1``, each
    enrolled with its own map (base seed equal to its device seed), and
    credentials ``k % len(credentials)``.
    """
    if device_pairs < 1:
        raise ConfigurationError("device_pairs must be >= 1")
    credentials = list(credentials)
    rows = []
    for k in range(device_pairs):
        uid, pw = credentials[k % len(credentials)]
        responses = []
        for dseed in (seed + 2 * k, seed + 2 * k + 1):
            dev = build_device(cell_count, model, dseed)
            tmap = enroll(dev, read_count, dseed)
            responses.append(apg.generate_response(uid, pw, tmap, None, config))
        rows.append(TrialRow(k, seed + 2 * k, hamming_distance(*responses)))
    return _inter_report(rows)


def pair_distance(device_a, map_a, device_b, map_b, credentials,
                  config: ApgConfig = DEFAULT_CONFIG) -> int:
    uid, pw = credentials
    ra = apg.generate_response(uid, pw, map_a, None, config)
    rb = apg.generate_response(uid, pw, map_b, None, config)
    return hamming_distance(ra, rb)


def _inter_report(rows):
    hds = np.array([r.normalized_hd for r in rows])
    return MetricsReport(inter_hd_mean=float(hds.mean()), inter_hd_std=float(hds.std()),
                         trials=len(rows), rows=rows)


def write_csv(rows, stream=None) -> str:
    """Write ``trial,seed,hd,normalized_hd`` rows; returns the text when no stream is given."""
    buf = stream if stream is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow((r.trial, r.seed, r.hd, f"{r.normalized_hd:.6f}"))
    return buf.getvalue() if stream is None else ""
