"""Password vault: user IDs bound to SHA-256 digests of PUF responses.

Neither the password nor the raw response is ever stored.
"""

from __future__ import annotations

import hmac
import os
import struct
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .apg import DEFAULT_CONFIG, ApgConfig, PufResponse, generate_response, hash_sha256
from .device import SramPufDevice, power_up_read
from .enrollment import TernaryMap
from .errors import (AlreadyEnrolledError, ConfigurationError, FormatError,
                     UnsupportedVersionError)

MAX_USER_ID = 64


@dataclass(frozen=True)
class UserRecord:
    user_id: bytes
    response_digest: bytes
    created_at: int
    expander_variant: str = "b"

    def __post_init__(self):
        if not 1 <= len(self.user_id) <= MAX_USER_ID:
            raise ConfigurationError(f"user_id must be 1..{MAX_USER_ID} bytes")
        if len(self.response_digest) != 32:
            raise ConfigurationError("response_digest must be 32 bytes")
        if self.expander_variant not in ("a", "b"):
            raise ConfigurationError(f"unknown expander variant {self.expander_variant!r}")


def response_digest(response: PufResponse) -> bytes:
    return hash_sha256(response.to_bytes())


@dataclass
class Vault:
    """Records keyed by exact user-ID bytes.

    One writer at a time (``enroll_user`` takes the lock); readers need none.
    """

    ternary_map_ref: str = ""
    records: dict[bytes, UserRecord] = field(default_factory=dict)

    def __post_init__(self):
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.records)

    def __contains__(self, user_id):
        return bytes(user_id) in self.records

    def __eq__(self, other):
        if not isinstance(other, Vault):
            return NotImplemented
        return self.ternary_map_ref == other.ternary_map_ref and self.records == other.records


def enroll_user(vault: Vault, user_id: bytes, password: bytes, tmap: TernaryMap,
                config: ApgConfig = DEFAULT_CONFIG, now: int | None = None) -> UserRecord:
    user_id, password = bytes(user_id), bytes(password)
    if not password:
        raise ConfigurationError("password must not be empty")
    response = generate_response(user_id, password, tmap, None, config)
    record = UserRecord(user_id, response_digest(response),
                        int(time.time()) if now is None else now, config.expander_variant)
    with vault._lock:
        if user_id in vault.records:
            raise AlreadyEnrolledError(f"user {user_id!r} is already enrolled")
        vault.records[user_id] = record
    return record


# compared against when the user is unknown, so that path does the same work
_DECOY = UserRecord(b"\0", bytes(32), 0)


def authenticate(vault: Vault, user_id: bytes, password: bytes, device: SramPufDevice,
                 tmap: TernaryMap, cycle_seed: int,
                 config: ApgConfig = DEFAULT_CONFIG) -> bool:
    """Replay the pipeline against a fresh power-up snapshot; True to accept."""
    if device is None or tmap is None:
        raise ConfigurationError("authentication needs both a device and its ternary map")
    record = vault.records.get(bytes(user_id))
    known = record is not None
    record = record or _DECOY
    if config.expander_variant != record.expander_variant:
        config = ApgConfig(config.input_convention, record.expander_variant, config.endianness)
    snapshot = power_up_read(device, cycle_seed)
    response = generate_response(bytes(user_id), bytes(password), tmap, snapshot, config)
    match = hmac.compare_digest(response_digest(response), record.response_digest)
    return match and known


# -- vault files ---------------------------------------------------------------
#
# header:  b"PVLT", version u16, record count u32, map-ref length u16, map-ref utf-8
# record:  length u16 (of the rest), id length u8, id, digest[32],
#          created_at i64, variant u8 (b"a"/b"b")
# all integers little-endian

VAULT_MAGIC = b"PVLT"
VAULT_VERSION = 1
_HEADER = struct.Struct("<4sHIH")
_U16 = struct.Struct("<H")
_TAIL = struct.Struct("<32sqB")


def vault_to_bytes(vault: Vault) -> bytes:
    ref = vault.ternary_map_ref.encode("utf-8")
    out = [_HEADER.pack(VAULT_MAGIC, VAULT_VERSION, len(vault.records), len(ref)), ref]
    for rec in vault.records.values():
        body = (bytes([len(rec.user_id)]) + rec.user_id
                + _TAIL.pack(rec.response_digest, rec.created_at, ord(rec.expander_variant)))
        out.append(_U16.pack(len(body)) + body)
    return b"".join(out)


def vault_from_bytes(data: bytes) -> Vault:
    if len(data) < _HEADER.size:
        raise FormatError("vault truncated inside header", len(data))
    magic, version, count, ref_len = _HEADER.unpack_from(data)
    if magic != VAULT_MAGIC:
        raise FormatError(f"bad magic {magic!r}", 0)
    if version != VAULT_VERSION:
        raise UnsupportedVersionError(f"vault version {version} not supported", 4)
    pos = _HEADER.size
    if pos + ref_len > len(data):
        raise FormatError("vault truncated inside map reference", len(data))
    try:
        ref = data[pos:pos + ref_len].decode("utf-8")
    except UnicodeDecodeError:
        raise FormatError("map reference is not UTF-8", pos) from None
    pos += ref_len
    records = {}
    for _ in range(count):
        if pos + 2 > len(data):
            raise FormatError("vault truncated before record length", pos)
        (length,) = _U16.unpack_from(data, pos)
        start = pos + 2
        end = start + length
        if end > len(data):
            raise FormatError("vault truncated inside record", len(data))
        body = data[start:end]
        id_len = body[0] if body else 0
        if length != 1 + id_len + _TAIL.size:
            raise FormatError("record length does not match its contents", pos)
        user_id = body[1:1 + id_len]
        digest, created_at, variant = _TAIL.unpack_from(body, 1 + id_len)
        try:
            rec = UserRecord(user_id, digest, created_at, chr(variant))
        except ConfigurationError as exc:
            raise FormatError(f"invalid record: {exc}", pos) from None
        if user_id in records:
            raise FormatError(f"duplicate user {user_id!r}", pos)
        records[user_id] = rec
        pos = end
    if pos != len(data):
        raise FormatError("trailing bytes after last record", pos)
    return Vault(ref, records)


def save_vault(vault: Vault, path) -> None:
    """Write atomically: a crash leaves either the old file or the new one."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(vault_to_bytes(vault))
    os.replace(tmp, path)


def load_vault(path) -> Vault:
    return vault_from_bytes(Path(path).read_bytes())
