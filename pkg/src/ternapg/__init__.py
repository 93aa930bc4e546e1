"""Ternary SRAM-PUF password manager simulator."""

from .apg import (ApgConfig, AddressList, PufResponse, derive_addresses, expand,
                  extract_response, generate_response, hash_sha256, mask_addresses,
                  password_digest, rotate_left16, trace_response)
from .device import (BiasModel, PowerUpSnapshot, SramPufDevice, build_device,
                     power_up_read, read_bit)
from .enrollment import CellState, TernaryMap, enroll, puf_noise, reference_bit
from .errors import *  # noqa: F401,F403
from .metrics import (MetricsReport, hamming_distance, inter_device_study,
                      intra_device_study)
from .vault import UserRecord, Vault, authenticate, enroll_user, load_vault, save_vault

__version__ = "0.1.0"
