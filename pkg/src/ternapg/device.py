"""Statistical model of an SRAM array's power-up state.

A device is a vector of per-cell biases, the probability that the cell
settles to 1 at power-on. Cells with bias exactly 0 or 1 are the stable
ones; the remainder are fuzzy and may flip from one power cycle to the
next. Addresses index single bits, so the 8 KiB PUF region is 65536 cells.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng
from .errors import AddressOutOfRangeError, ConfigurationError, FormatError

DEFAULT_CELL_COUNT = 65536


@dataclass(frozen=True)
class BiasModel:
    """Distribution the per-cell biases are drawn from.

    A fraction ``stable_fraction`` of cells get bias 0.0 or 1.0 (even odds);
    the rest get a bias drawn uniformly from ``(fuzzy_low, fuzzy_high)``.
    """

    stable_fraction: float = 0.95
    fuzzy_low: float = 0.05
    fuzzy_high: float = 0.95

    def validate(self):
        if not 0.0 <= self.stable_fraction <= 1.0:
            raise ConfigurationError(
                f"stable_fraction must lie in [0, 1], got {self.stable_fraction}")
        if not 0.0 < self.fuzzy_low <= self.fuzzy_high < 1.0:
            raise ConfigurationError(
                "fuzzy bias spread must satisfy 0 < fuzzy_low <= fuzzy_high < 1, "
                f"got ({self.fuzzy_low}, {self.fuzzy_high})")


IDEAL_MODEL = BiasModel(stable_fraction=1.0)


@dataclass(frozen=True, eq=False)
class SramPufDevice:
    cell_count: int
    biases: np.ndarray
    device_seed: int
    model: BiasModel = field(default_factory=BiasModel)

    def __post_init__(self):
        biases = np.array(self.biases, dtype=np.float64)
        if self.cell_count < 1 or biases.shape != (self.cell_count,):
            raise ConfigurationError("bias array must have one entry per cell")
        if np.any((biases < 0.0) | (biases > 1.0)) or np.any(np.isnan(biases)):
            raise ConfigurationError("every bias must lie in [0, 1]")
        biases.setflags(write=False)
        object.__setattr__(self, "biases", biases)
        # cells that actually need sampling at power-up
        fuzzy = np.flatnonzero((biases > 0.0) & (biases < 1.0))
        fuzzy.setflags(write=False)
        object.__setattr__(self, "_fuzzy_index", fuzzy)
        base = (biases >= 1.0).astype(np.uint8)
        base.setflags(write=False)
        object.__setattr__(self, "_base_bits", base)

    @property
    def device_id(self) -> bytes:
        """16-byte fingerprint of the seed and bias array."""
        h = hashlib.sha256()
        h.update(self.cell_count.to_bytes(4, "little"))
        h.update((self.device_seed & rng.MASK64).to_bytes(8, "little"))
        h.update(self.biases.astype("<f8").tobytes())
        return h.digest()[:16]

    def __eq__(self, other):
        if not isinstance(other, SramPufDevice):
            return NotImplemented
        return (self.cell_count == other.cell_count
                and self.device_seed == other.device_seed
                and np.array_equal(self.biases, other.biases))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class PowerUpSnapshot:
    bits: np.ndarray
    cycle_seed: int

    def __len__(self):
        return len(self.bits)

    def __eq__(self, other):
        if not isinstance(other, PowerUpSnapshot):
            return NotImplemented
        return self.cycle_seed == other.cycle_seed and np.array_equal(self.bits, other.bits)

    __hash__ = None


def draw_biases(cell_count: int, model: BiasModel, device_seed: int) -> np.ndarray:
    idx = np.arange(cell_count, dtype=np.uint64)
    split = rng.uniform(rng.derive_key(rng.DOMAIN_DEVICE_SPLIT, device_seed), idx)
    level = rng.uniform(rng.derive_key(rng.DOMAIN_DEVICE_LEVEL, device_seed), idx)
    spread = rng.uniform(rng.derive_key(rng.DOMAIN_DEVICE_SPREAD, device_seed), idx)
    stable = split < model.stable_fraction
    fuzzy_bias = model.fuzzy_low + (model.fuzzy_high - model.fuzzy_low) * spread
    # guard against rounding onto the closed interval ends
    fuzzy_bias = np.clip(fuzzy_bias, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))
    return np.where(stable, (level < 0.5).astype(np.float64), fuzzy_bias)


def build_device(cell_count: int = DEFAULT_CELL_COUNT, model: BiasModel | None = None,
                 device_seed: int = 0, overrides: dict[int, float] | None = None) -> SramPufDevice:
    """Instantiate a device whose biases depend only on the arguments.

    ``overrides`` pins individual biases after the draw (test rigs).
    """
    model = model or BiasModel()
    model.validate()
    if cell_count < 1:
        raise ConfigurationError(f"cell_count must be >= 1, got {cell_count}")
    biases = draw_biases(cell_count, model, device_seed)
    for address, p in (overrides or {}).items():
        if not 0 <= address < cell_count:
            raise ConfigurationError(f"bias override address {address} out of range")
        biases[address] = p
    return SramPufDevice(cell_count, biases, device_seed, model)


def device_from_biases(biases, device_seed: int = 0) -> SramPufDevice:
    biases = np.asarray(biases, dtype=np.float64)
    return SramPufDevice(len(biases), biases, device_seed)


def _power_up_key(device: SramPufDevice, cycle_seed: int) -> int:
    return rng.derive_key(rng.DOMAIN_POWER_UP, device.device_seed, cycle_seed)


def power_up_read(device: SramPufDevice, cycle_seed: int) -> PowerUpSnapshot:
    """One simulated power-off/power-on cycle.

    Bit ``i`` is 1 iff ``uniform(key(device_seed, cycle_seed), i) < biases[i]``.
    Cells with bias 0 or 1 are resolved without drawing, which gives the same
    bits as drawing for them.
    """
    bits = device._base_bits.copy()
    fuzzy = device._fuzzy_index
    if len(fuzzy):
        u = rng.uniform(_power_up_key(device, cycle_seed), fuzzy)
        bits[fuzzy] = u < device.biases[fuzzy]
    bits.setflags(write=False)
    return PowerUpSnapshot(bits, cycle_seed)


def power_up_reads(device: SramPufDevice, cycle_seeds) -> np.ndarray:
    """Bits of several cycles restricted to the fuzzy cells, shape (cycles, n_fuzzy).

    Row ``k`` equals ``power_up_read(device, cycle_seeds[k]).bits[fuzzy_cells]``.
    """
    fuzzy = device._fuzzy_index
    out = np.empty((len(cycle_seeds), len(fuzzy)), dtype=np.uint8)
    p = device.biases[fuzzy]
    for k, seed in enumerate(cycle_seeds):
        out[k] = rng.uniform(_power_up_key(device, seed), fuzzy) < p
    return out


def fuzzy_cells(device: SramPufDevice) -> np.ndarray:
    return device._fuzzy_index


def read_bit(snapshot: PowerUpSnapshot, address: int) -> int:
    if not 0 <= address < len(snapshot.bits):
        raise AddressOutOfRangeError(
            f"address {address:#06x} outside 0..{len(snapshot.bits) - 1}")
    return int(snapshot.bits[address])


# -- device spec files ---------------------------------------------------------
#
#   # comment
#   cell_count = 65536
#   stable_fraction = 0.95
#   fuzzy_low = 0.05          (optional)
#   fuzzy_high = 0.95         (optional)
#   device_seed = 7
#   bias[12] = 0.5            (optional, repeatable)

_LINE = re.compile(r"^\s*([a-z_]+)(?:\[(\d+)\])?\s*=\s*(\S+)\s*$")


def parse_device_spec(text: str) -> SramPufDevice:
    values = {}
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise FormatError(f"device spec line {lineno}: cannot parse {raw!r}")
        key, index, value = m.groups()
        try:
            if key == "bias" and index is not None:
                overrides[int(index)] = float(value)
            elif key in ("cell_count", "device_seed") and index is None:
                values[key] = int(value, 0)
            elif key in ("stable_fraction", "fuzzy_low", "fuzzy_high") and index is None:
                values[key] = float(value)
            else:
                raise FormatError(f"device spec line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"device spec line {lineno}: bad value {value!r}") from None
    if "device_seed" not in values:
        raise FormatError("device spec is missing device_seed")
    defaults = BiasModel()
    model = BiasModel(values.get("stable_fraction", defaults.stable_fraction),
                      values.get("fuzzy_low", defaults.fuzzy_low),
                      values.get("fuzzy_high", defaults.fuzzy_high))
    return build_device(values.get("cell_count", DEFAULT_CELL_COUNT), model,
                        values["device_seed"], overrides)


def format_device_spec(cell_count: int, model: BiasModel, device_seed: int,
                       overrides: dict[int, float] | None = None) -> str:
    lines = [
        f"cell_count = {cell_count}",
        f"stable_fraction = {model.stable_fraction!r}",
        f"fuzzy_low = {model.fuzzy_low!r}",
        f"fuzzy_high = {model.fuzzy_high!r}",
        f"device_seed = {device_seed}",
    ]
    lines += [f"bias[{a}] = {p!r}" for a, p in sorted((overrides or {}).items())]
    return "\n".join(lines) + "\n"


def load_device_spec(path) -> SramPufDevice:
    return parse_device_spec(Path(path).read_text())
