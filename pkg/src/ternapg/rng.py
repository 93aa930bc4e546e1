"""Counter-based pseudorandom streams built on the SplitMix64 finalizer.

Every random quantity in the simulator is a pure function of a 64-bit key
and a cell index, so results do not depend on call order, thread count or
the platform's default generator.

Construction::

    mix64(z):
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)                  # all arithmetic mod 2**64

    derive_key(domain, *words):
        k = mix64(domain + GOLDEN)
        for w in words: k = mix64(k ^ mix64(w + GOLDEN))
        return k

    stream(key, i) = mix64(key + (i + 1) * GOLDEN)
    uniform(key, i) = (stream(key, i) >> 11) * 2**-53      # in [0, 1)
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# domain separators, one per kind of stream
DOMAIN_DEVICE_SPLIT = 0x01
DOMAIN_DEVICE_LEVEL = 0x02
DOMAIN_DEVICE_SPREAD = 0x03
DOMAIN_POWER_UP = 0x10


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_key(domain: int, *words: int) -> int:
    key = mix64(domain + GOLDEN)
    for w in words:
        key = mix64(key ^ mix64((w & MASK64) + GOLDEN))
    return key


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def stream(key: int, index) -> np.ndarray:
    """Raw 64-bit outputs for the given cell indices (any integer array shape)."""
    idx = np.asarray(index, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key & MASK64) + (idx + np.uint64(1)) * np.uint64(GOLDEN)
        return _mix64_array(z)


def uniform(key: int, index) -> np.ndarray:
    """Doubles in [0, 1) with 53 random bits each."""
    return (stream(key, index) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


def stream_int(key: int, index: int) -> int:
    """Pure-integer twin of :func:`stream` for a single index."""
    return mix64((key + (index + 1) * GOLDEN) & MASK64)
