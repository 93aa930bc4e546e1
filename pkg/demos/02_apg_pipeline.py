"""
Credentials to a 128-bit PUF response
=====================================

Walk the Addressable PUF Generator step by step with the credentials the
original board was demonstrated with, printing each block in the board's
terminal format.
"""

from ternapg import apg
from ternapg.device import build_device, power_up_read
from ternapg.enrollment import enroll

user_id = b"PasswordManagementWithWifire"
password = b"1-MBIT SRAM"

print("Entered Password:")
print(apg.format_hex_field(password))

# step 1: digest of the password (NUL-padded to a 32-byte buffer)
md = apg.password_digest(password)

# step 2: rotate the leading 16-bit word 0..7 times and hash rows 2..8
print("Results of Shifting Message Digest:")
for row in apg.rotated_variants(md):
    print(apg.format_bytes(row))
print("8 MD results:")
for i, block in enumerate(apg.expanded_blocks(md), 1):
    print(f"MD{i}: {apg.format_bytes(block)}")

# steps 3-5 depend on the device, so enroll one
device = build_device(device_seed=7)
tmap = enroll(device, 200, base_seed=0)
trace = apg.trace_response(user_id, password, tmap)

moved = sum(r != m for r, m in zip(trace.raw_addresses, trace.masked_addresses))
print(f"\n{moved} of 128 addresses pointed at fuzzy cells and were moved")
print("128 Addresses for extracting PUF Response:")
print(apg.format_addresses(trace.masked_addresses))
print("128bit PUF Response:")
print(trace.response)

# a fresh power-up gives the same bits because only stable cells are read
fresh = apg.generate_response(user_id, password, tmap, power_up_read(device, 12345))
print("fresh power-up matches enrollment:", fresh == trace.response)
