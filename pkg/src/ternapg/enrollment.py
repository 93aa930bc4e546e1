"""Ternary enrollment: classify every cell as stable 0, stable 1 or fuzzy ("X")."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from . import rng
from .device import SramPufDevice, fuzzy_cells, power_up_read
from .errors import (AddressOutOfRangeError, ConfigurationError, FormatError,
                     FuzzyCellError, UnsupportedVersionError)

DEFAULT_READ_COUNT = 200


class CellState(IntEnum):
    # values double as the 2-bit codes of the map file
    STABLE0 = 0
    STABLE1 = 1
    FUZZY = 2


@dataclass(frozen=True, eq=False)
class TernaryMap:
    states: np.ndarray
    read_count: int
    device_id: bytes = bytes(16)

    def __post_init__(self):
        states = np.array(self.states, dtype=np.uint8)
        if states.ndim != 1 or len(states) < 1:
            raise ConfigurationError("a ternary map needs at least one cell")
        if np.any(states > CellState.FUZZY):
            raise ConfigurationError("cell states must be 0, 1 or 2")
        if self.read_count < 2:
            raise ConfigurationError("read_count must be >= 2")
        if len(self.device_id) != 16:
            raise ConfigurationError("device_id must be 16 bytes")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "device_id", bytes(self.device_id))

    @property
    def cell_count(self) -> int:
        return len(self.states)

    @property
    def fuzzy_mask(self) -> np.ndarray:
        return self.states == CellState.FUZZY

    def __len__(self):
        return len(self.states)

    def __eq__(self, other):
        if not isinstance(other, TernaryMap):
            return NotImplemented
        return (self.read_count == other.read_count and self.device_id == other.device_id
                and np.array_equal(self.states, other.states))

    __hash__ = None

    def render(self) -> str:
        """Cells as a string over ``0``, ``1`` and ``X``."""
        return "".join("01X"[s] for s in self.states)


def cycle_seeds(base_seed: int, read_count: int) -> list[int]:
    """Sequential cycle seeds; longer enrollments extend shorter ones."""
    return [(base_seed + k) & rng.MASK64 for k in range(read_count)]


def enroll(device: SramPufDevice, read_count: int = DEFAULT_READ_COUNT,
           base_seed: int = 0) -> TernaryMap:
    """Power-cycle the device ``read_count`` times and mark unstable cells.

    A cell is stable only if all reads agree; one disagreement makes it fuzzy.
    """
    if read_count < 2:
        raise ConfigurationError(f"read_count must be >= 2, got {read_count}")
    seeds = cycle_seeds(base_seed, read_count)
    first = power_up_read(device, seeds[0]).bits
    states = first.astype(np.uint8)
    # cells with bias 0/1 cannot disagree; only the rest are re-read
    idx = fuzzy_cells(device)
    if len(idx):
        seen_one = first[idx].astype(bool)
        seen_zero = ~seen_one
        for seed in seeds[1:]:
            bits = power_up_read(device, seed).bits[idx].astype(bool)
            seen_one |= bits
            seen_zero |= ~bits
        states[idx[seen_one & seen_zero]] = CellState.FUZZY
    return TernaryMap(states, read_count, device.device_id)


def puf_noise(tmap: TernaryMap) -> float:
    """Fraction of fuzzy cells in the map."""
    return int(np.count_nonzero(tmap.fuzzy_mask)) / tmap.cell_count


def reference_bit(tmap: TernaryMap, address: int) -> int:
    if not 0 <= address < tmap.cell_count:
        raise AddressOutOfRangeError(
            f"address {address:#06x} outside 0..{tmap.cell_count - 1}")
    state = tmap.states[address]
    if state == CellState.FUZZY:
        raise FuzzyCellError(f"cell {address:#06x} is fuzzy; mask the address first")
    return int(state)


# -- map files -----------------------------------------------------------------
#
# header: b"PUF3", version u16, cell_count u32, read_count u32, device_id[16]
# body:   2 bits per cell, four cells per byte, cell i in bits 2*(i%4)..2*(i%4)+1
#         of byte i//4 (00 stable0, 01 stable1, 10 fuzzy, 11 invalid)

MAP_MAGIC = b"PUF3"
MAP_VERSION = 1
_MAP_HEADER = struct.Struct("<4sHII16s")


def pack_states(states: np.ndarray) -> bytes:
    n = len(states)
    padded = np.zeros(-(-n // 4) * 4, dtype=np.uint8)
    padded[:n] = states
    quads = padded.reshape(-1, 4)
    packed = quads[:, 0] | (quads[:, 1] << 2) | (quads[:, 2] << 4) | (quads[:, 3] << 6)
    return packed.astype(np.uint8).tobytes()


def unpack_states(data: bytes, cell_count: int) -> np.ndarray:
    raw = np.frombuffer(data, dtype=np.uint8)
    quads = np.stack([(raw >> s) & 3 for s in (0, 2, 4, 6)], axis=1)
    return quads.reshape(-1)[:cell_count].astype(np.uint8)


def map_to_bytes(tmap: TernaryMap) -> bytes:
    header = _MAP_HEADER.pack(MAP_MAGIC, MAP_VERSION, tmap.cell_count,
                              tmap.read_count, tmap.device_id)
    return header + pack_states(tmap.states)


def map_from_bytes(data: bytes) -> TernaryMap:
    if len(data) < _MAP_HEADER.size:
        raise FormatError("ternary map truncated inside header", len(data))
    magic, version, cell_count, read_count, device_id = _MAP_HEADER.unpack_from(data)
    if magic != MAP_MAGIC:
        raise FormatError(f"bad magic {magic!r}", 0)
    if version != MAP_VERSION:
        raise UnsupportedVersionError(f"ternary map version {version} not supported", 4)
    body = data[_MAP_HEADER.size:]
    need = -(-cell_count // 4)
    if len(body) != need:
        raise FormatError(f"expected {need} body bytes, found {len(body)}",
                          _MAP_HEADER.size + min(len(body), need))
    states = unpack_states(body, cell_count)
    bad = np.flatnonzero(states == 3)
    if len(bad):
        raise FormatError(f"reserved state code for cell {bad[0]}",
                          _MAP_HEADER.size + int(bad[0]) // 4)
    if cell_count < 1 or read_count < 2:
        raise FormatError("header describes an invalid map", 6)
    return TernaryMap(states, read_count, device_id)


def save_map(tmap: TernaryMap, path) -> None:
    Path(path).write_bytes(map_to_bytes(tmap))


def load_map(path) -> TernaryMap:
    return map_from_bytes(Path(path).read_bytes())
