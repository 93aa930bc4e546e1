"""Addressable PUF Generator: credentials to a 128-bit PUF response.

Pipeline::

    password --SHA-256--> digest (32 B)
             --expand-->  long digest (8 x 32 B)
             --pair bytes--> 128 addresses
             --mask fuzzy cells--> 128 addresses
             --read cells--> 128 response bits
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .device import DEFAULT_CELL_COUNT, PowerUpSnapshot
from .enrollment import CellState, TernaryMap
from .errors import (AddressOutOfRangeError, ConfigurationError, ContractError,
                     FuzzyCellError, UnmaskableError)

DIGEST_SIZE = 32
EXPANSION = 8
LONG_DIGEST_SIZE = DIGEST_SIZE * EXPANSION
ADDRESS_COUNT = LONG_DIGEST_SIZE // 2
RESPONSE_BITS = ADDRESS_COUNT

INPUT_CONVENTIONS = ("padded", "plain", "id+password")
EXPANDER_VARIANTS = ("a", "b")
ENDIANNESS = ("be", "le")


@dataclass(frozen=True)
class ApgConfig:
    """Conventions the paper's figures leave implicit.

    input_convention
        ``"padded"``: SHA-256 of the password NUL-padded to a multiple of 32
        bytes (a fixed 32-byte buffer for short passwords). This is the one
        that reproduces the board's printed digest for ``1-MBIT SRAM``.
        ``"plain"``: SHA-256 of the password bytes. ``"id+password"``:
        SHA-256 of ID then password.
    expander_variant
        ``"b"``: the first block of the long digest is the password digest
        itself, blocks 2..8 hash the rotated variants 1..7. ``"a"``: all eight
        blocks hash rotated variants 0..7.
    endianness
        Byte order used to pair long-digest bytes into addresses.
    """

    input_convention: str = "padded"
    expander_variant: str = "b"
    endianness: str = "be"

    def __post_init__(self):
        if self.input_convention not in INPUT_CONVENTIONS:
            raise ConfigurationError(f"unknown input convention {self.input_convention!r}")
        if self.expander_variant not in EXPANDER_VARIANTS:
            raise ConfigurationError(f"unknown expander variant {self.expander_variant!r}")
        if self.endianness not in ENDIANNESS:
            raise ConfigurationError(f"unknown endianness {self.endianness!r}")


DEFAULT_CONFIG = ApgConfig()


def hash_sha256(message: bytes) -> bytes:
    return hashlib.sha256(message).digest()


def password_digest(password: bytes, user_id: bytes = b"",
                    convention: str = "padded") -> bytes:
    if convention == "padded":
        width = max(DIGEST_SIZE, -(-len(password) // DIGEST_SIZE) * DIGEST_SIZE)
        return hash_sha256(password.ljust(width, b"\0"))
    if convention == "plain":
        return hash_sha256(password)
    if convention == "id+password":
        return hash_sha256(user_id + password)
    raise ConfigurationError(f"unknown input convention {convention!r}")


def rotate_left16(word: int, shifts: int) -> int:
    shifts %= 16
    word &= 0xFFFF
    return ((word << shifts) | (word >> (16 - shifts))) & 0xFFFF


def _check_digest(md: bytes):
    if len(md) != DIGEST_SIZE:
        raise ContractError(f"message digest must be {DIGEST_SIZE} bytes, got {len(md)}")


def rotated_variants(md: bytes) -> list[bytes]:
    """The eight digests whose leading 16-bit word is rotated left by 0..7."""
    _check_digest(md)
    lead = int.from_bytes(md[:2], "big")
    return [rotate_left16(lead, i).to_bytes(2, "big") + md[2:] for i in range(EXPANSION)]


def expanded_blocks(md: bytes, variant: str = "b") -> list[bytes]:
    variants = rotated_variants(md)
    if variant == "a":
        return [hash_sha256(v) for v in variants]
    if variant == "b":
        return [bytes(md)] + [hash_sha256(v) for v in variants[1:]]
    raise ConfigurationError(f"unknown expander variant {variant!r}")


def expand(md: bytes, variant: str = "b") -> bytes:
    """Stretch a 32-byte digest into the 256-byte long digest."""
    return b"".join(expanded_blocks(md, variant))


@dataclass(frozen=True, eq=False)
class AddressList:
    addresses: np.ndarray
    masked: bool = False

    def __post_init__(self):
        addresses = np.array(self.addresses, dtype=np.int64)
        if addresses.shape != (ADDRESS_COUNT,):
            raise ContractError(f"an address list holds exactly {ADDRESS_COUNT} addresses")
        if np.any((addresses < 0) | (addresses > 0xFFFF)):
            raise ContractError("addresses are 16-bit")
        addresses.setflags(write=False)
        object.__setattr__(self, "addresses", addresses)

    def __len__(self):
        return ADDRESS_COUNT

    def __iter__(self):
        return iter(int(a) for a in self.addresses)

    def __eq__(self, other):
        if not isinstance(other, AddressList):
            return NotImplemented
        return self.masked == other.masked and np.array_equal(self.addresses, other.addresses)

    __hash__ = None


def derive_addresses(long_digest: bytes, cell_count: int = DEFAULT_CELL_COUNT,
                     endianness: str = "be") -> AddressList:
    if len(long_digest) != LONG_DIGEST_SIZE:
        raise ContractError(f"long digest must be {LONG_DIGEST_SIZE} bytes")
    if endianness not in ENDIANNESS:
        raise ConfigurationError(f"unknown endianness {endianness!r}")
    words = np.frombuffer(long_digest, dtype=">u2" if endianness == "be" else "<u2")
    return AddressList(words.astype(np.int64) % cell_count)


def next_stable_table(tmap: TernaryMap) -> np.ndarray:
    """For every cell, the first non-fuzzy cell at or above it, wrapping to 0."""
    stable = np.flatnonzero(tmap.states != CellState.FUZZY)
    if len(stable) == 0:
        raise UnmaskableError("every cell is fuzzy; nothing to mask onto")
    pos = np.searchsorted(stable, np.arange(tmap.cell_count))
    return stable[pos % len(stable)]


def mask_addresses(alist: AddressList, tmap: TernaryMap) -> AddressList:
    """Replace each fuzzy-cell address by the next non-fuzzy one, in place order."""
    addrs = alist.addresses
    if np.any(addrs >= tmap.cell_count):
        raise AddressOutOfRangeError("address list exceeds the ternary map")
    table = next_stable_table(tmap)
    return AddressList(table[addrs], masked=True)


@dataclass(frozen=True, eq=False)
class PufResponse:
    bits: np.ndarray

    def __post_init__(self):
        bits = np.array(self.bits, dtype=np.uint8)
        if bits.shape != (RESPONSE_BITS,) or np.any(bits > 1):
            raise ContractError(f"a response is exactly {RESPONSE_BITS} bits")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __len__(self):
        return RESPONSE_BITS

    def __str__(self):
        return "".join("01"[b] for b in self.bits)

    def __eq__(self, other):
        if not isinstance(other, PufResponse):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    __hash__ = None

    def to_bytes(self) -> bytes:
        """16 bytes, first bit in the most significant position."""
        return np.packbits(self.bits).tobytes()

    @classmethod
    def from_string(cls, text: str) -> "PufResponse":
        return cls([int(c) for c in text])


def extract_response(alist: AddressList, source) -> PufResponse:
    """Read one bit per masked address from a ternary map or a fresh snapshot."""
    if not alist.masked:
        raise ContractError("addresses must be masked before extracting a response")
    return _read_bits(alist.addresses, source)


def _read_bits(addrs: np.ndarray, source) -> PufResponse:
    if isinstance(source, TernaryMap):
        if np.any(addrs >= source.cell_count):
            raise AddressOutOfRangeError("address outside the ternary map")
        states = source.states[addrs]
        hit = np.flatnonzero(states == CellState.FUZZY)
        if len(hit):
            raise FuzzyCellError(f"address {int(addrs[hit[0]]):#06x} points at a fuzzy cell")
        return PufResponse(states)
    if isinstance(source, PowerUpSnapshot):
        if np.any(addrs >= len(source.bits)):
            raise AddressOutOfRangeError("address outside the snapshot")
        return PufResponse(source.bits[addrs])
    raise TypeError(f"cannot read PUF bits from {type(source).__name__}")


@dataclass(frozen=True)
class PipelineTrace:
    """Every intermediate value of one run, for verbose output and debugging."""

    password_digest: bytes
    rotated: list[bytes]
    blocks: list[bytes]
    long_digest: bytes
    raw_addresses: AddressList
    masked_addresses: AddressList
    response: PufResponse
    config: ApgConfig = field(default=DEFAULT_CONFIG)


def trace_response(user_id: bytes, password: bytes, tmap: TernaryMap, source=None,
                   config: ApgConfig = DEFAULT_CONFIG) -> PipelineTrace:
    md = password_digest(password, user_id, config.input_convention)
    blocks = expanded_blocks(md, config.expander_variant)
    long_digest = b"".join(blocks)
    raw = derive_addresses(long_digest, tmap.cell_count, config.endianness)
    masked = mask_addresses(raw, tmap)
    response = extract_response(masked, tmap if source is None else source)
    return PipelineTrace(md, rotated_variants(md), blocks, long_digest, raw, masked,
                         response, config)


def generate_response(user_id: bytes, password: bytes, tmap: TernaryMap, source=None,
                      config: ApgConfig = DEFAULT_CONFIG) -> PufResponse:
    """Run the whole pipeline.

    With ``source=None`` the bits come from the map's reference values
    (enrollment time); pass a :class:`PowerUpSnapshot` for verification time.
    """
    return trace_response(user_id, password, tmap, source, config).response


# -- hex rendering -------------------------------------------------------------

def format_bytes(data: bytes) -> str:
    """``16 A8 DE ...``"""
    return " ".join(f"{b:02X}" for b in data)


def format_hex_field(data: bytes) -> str:
    """``0X31 2D 4D``; just ``0X`` for an empty field."""
    return "0X" + format_bytes(data)


def format_addresses(alist: AddressList, per_row: int = 16) -> str:
    words = [f"{a:04X}" for a in alist]
    return "\n".join(" ".join(words[i:i + per_row]) for i in range(0, len(words), per_row))


def format_trace(trace: PipelineTrace) -> str:
    lines = ["Results of Shifting Message Digest:"]
    lines += [format_bytes(v) for v in trace.rotated]
    lines.append("8 MD results:")
    lines += [f"MD{i}: {format_bytes(b)}" for i, b in enumerate(trace.blocks, 1)]
    lines.append("128 Addresses for extracting PUF Response:")
    lines.append(format_addresses(trace.masked_addresses))
    lines.append("128bit PUF Response:")
    lines.append(str(trace.response))
    return "\n".join(lines) + "\n"
