"""
Vault enrollment, authentication and the line protocol
======================================================
"""

import socket
import threading

from ternapg.device import build_device
from ternapg.enrollment import enroll
from ternapg.service import ServiceState, make_server
from ternapg.vault import Vault, authenticate, enroll_user, vault_to_bytes

device = build_device(device_seed=7)
tmap = enroll(device, 200, base_seed=0)

vault = Vault("dev7.puf3")
enroll_user(vault, b"alice", b"pw1", tmap)
print("stored digest:", vault.records[b"alice"].response_digest.hex())
print("file size:", len(vault_to_bytes(vault)), "bytes; no password or response inside")

print("alice/pw1 :", authenticate(vault, b"alice", b"pw1", device, tmap, cycle_seed=1))
print("alice/pw2 :", authenticate(vault, b"alice", b"pw2", device, tmap, cycle_seed=2))
print("mallory   :", authenticate(vault, b"mallory", b"pw1", device, tmap, cycle_seed=3))

# the same vault behind the TCP service (ephemeral port)
state = ServiceState(vault, device, tmap, next_cycle_seed=100)
with make_server(("127.0.0.1", 0), state) as server:
    threading.Thread(target=server.serve_forever, daemon=True).start()
    with socket.create_connection(server.server_address[:2]) as sock:
        f = sock.makefile("rwb")
        for request in (b"PING", b"ENROLL bob s3cret", b"AUTH bob s3cret",
                        b"AUTH bob guess", b"NOISE", b"hello?"):
            f.write(request + b"\n")
            f.flush()
            print(f"{request.decode():20s} -> {f.readline().decode().strip()}")
    server.shutdown()
