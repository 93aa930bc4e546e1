"""Operator surfaces: the board-style terminal session and the TCP auth service.

Wire protocol (UTF-8, one request per LF-terminated line)::

    PING                    -> OK
    NOISE                   -> OK 0.050000
    ENROLL <id> <password>  -> OK | ERR enrolled | ERR invalid <reason>
    AUTH <id> <password>    -> OK | FAIL
    anything else           -> ERR parse

Fields are separated by single spaces; ``%XX`` escapes arbitrary bytes.
Passwords travel in the clear: this is a desk-scale test service, not a
production endpoint.
"""

from __future__ import annotations

import logging
import re
import socketserver
import threading
from dataclasses import dataclass, field

from . import apg
from .apg import DEFAULT_CONFIG, ApgConfig
from .device import SramPufDevice, power_up_read
from .enrollment import TernaryMap, puf_noise
from .errors import AlreadyEnrolledError, ConfigurationError
from .vault import Vault, authenticate, enroll_user, save_vault

log = logging.getLogger(__name__)

MSG_SIZE = 64
MAX_LINE = 4096
CR, LF = b"\r", b"\n"


class SessionAborted(Exception):
    """The input stream closed in the middle of a field."""


@dataclass
class SessionContext:
    tmap: TernaryMap | None = None
    device: SramPufDevice | None = None
    cycle_seed: int = 0
    config: ApgConfig = DEFAULT_CONFIG


def read_field(inp, out, msg_size: int = MSG_SIZE) -> bytes:
    """Collect one field byte by byte, echoing each one.

    Stops after CR, LF or ``msg_size`` bytes; the last byte collected is
    dropped as the terminator, even when the stop was the size limit.
    """
    buf = bytearray()
    ch = b""
    while ch not in (CR, LF) and len(buf) < msg_size:
        ch = inp.read(1)
        if not ch:
            raise SessionAborted("input closed mid-field")
        out.write(ch)
        buf += ch
    return bytes(buf[:-1])


def interactive_session(inp, out, context: SessionContext | None = None,
                        verbose: bool = False, msg_size: int = MSG_SIZE):
    """Prompt for ID and password on binary streams, echo, then print hex blocks.

    Returns ``(user_id, password)``, or None when the input ends mid-field.
    """
    context = context or SessionContext()
    try:
        out.write(b"\nEnter your ID\n")
        user_id = read_field(inp, out, msg_size)
        out.write(b"\nEnter your Password\n")
        password = read_field(inp, out, msg_size)
    except SessionAborted:
        out.write(b"\n")
        out.flush()
        return None
    out.write(b"\nEntered ID:\n" + apg.format_hex_field(user_id).encode() + b"\n")
    out.write(b"Entered Password:\n" + apg.format_hex_field(password).encode() + b"\n")
    if verbose:
        out.write(_verbose_block(user_id, password, context).encode())
    out.flush()
    return user_id, password


def _verbose_block(user_id, password, ctx: SessionContext) -> str:
    cfg = ctx.config
    md = apg.password_digest(password, user_id, cfg.input_convention)
    if ctx.tmap is None:
        lines = ["Results of Shifting Message Digest:"]
        lines += [apg.format_bytes(v) for v in apg.rotated_variants(md)]
        lines.append("8 MD results:")
        blocks = apg.expanded_blocks(md, cfg.expander_variant)
        lines += [f"MD{i}: {apg.format_bytes(b)}" for i, b in enumerate(blocks, 1)]
        return "\n".join(lines) + "\n"
    source = None if ctx.device is None else power_up_read(ctx.device, ctx.cycle_seed)
    trace = apg.trace_response(user_id, password, ctx.tmap, source, cfg)
    return apg.format_trace(trace)


# -- wire protocol -------------------------------------------------------------

VERBS = {"PING": 1, "NOISE": 1, "ENROLL": 3, "AUTH": 3}
_TOKEN = re.compile(r"(?:[^%\s]|%[0-9A-Fa-f]{2})+")


class ParseError(ValueError):
    pass


def unescape(token: str) -> bytes:
    if not _TOKEN.fullmatch(token):
        raise ParseError(f"bad token {token!r}")
    out = bytearray()
    i = 0
    while i < len(token):
        if token[i] == "%":
            out.append(int(token[i + 1:i + 3], 16))
            i += 3
        else:
            out += token[i].encode("utf-8")
            i += 1
    return bytes(out)


def escape(data: bytes) -> str:
    return "".join(chr(b) if 0x21 <= b <= 0x7E and b != 0x25 else f"%{b:02X}"
                   for b in data)


def parse_request(line: bytes):
    """Split a request line into ``(verb, args)``; raises ParseError."""
    try:
        text = line.decode("utf-8")
    except UnicodeDecodeError:
        raise ParseError("not UTF-8") from None
    text = text.removesuffix("\n").removesuffix("\r")
    parts = text.split(" ")
    verb = parts[0]
    if VERBS.get(verb) != len(parts):
        raise ParseError(f"bad request {text[:40]!r}")
    return verb, [unescape(p) for p in parts[1:]]


@dataclass
class ServiceState:
    vault: Vault
    device: SramPufDevice
    tmap: TernaryMap
    config: ApgConfig = DEFAULT_CONFIG
    vault_path: str | None = None
    next_cycle_seed: int = 0
    write_lock: threading.Lock = field(default_factory=threading.Lock)
    device_lock: threading.Lock = field(default_factory=threading.Lock)

    def take_cycle_seed(self) -> int:
        with self.device_lock:
            seed = self.next_cycle_seed
            self.next_cycle_seed += 1
            return seed


def handle_line(line: bytes, state: ServiceState) -> str:
    """Execute one request line; always returns exactly one response (no LF)."""
    try:
        verb, args = parse_request(line)
    except ParseError:
        return "ERR parse"
    try:
        if verb == "PING":
            return "OK"
        if verb == "NOISE":
            return f"OK {puf_noise(state.tmap):.6f}"
        user_id, password = args
        if verb == "ENROLL":
            with state.write_lock:
                enroll_user(state.vault, user_id, password, state.tmap, state.config)
                if state.vault_path:
                    save_vault(state.vault, state.vault_path)
            return "OK"
        ok = authenticate(state.vault, user_id, password, state.device, state.tmap,
                          state.take_cycle_seed(), state.config)
        return "OK" if ok else "FAIL"
    except AlreadyEnrolledError:
        return "ERR enrolled"
    except ConfigurationError as exc:
        return "ERR invalid " + escape(str(exc).encode())
    except Exception:
        log.exception("request failed")
        return "ERR internal"


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        state = self.server.state
        while True:
            line = self.rfile.readline(MAX_LINE + 1)
            if not line:
                return
            if not line.endswith(LF) and len(line) > MAX_LINE:
                # overlong: discard through the next LF, answer once
                while line and not line.endswith(LF):
                    line = self.rfile.readline(MAX_LINE + 1)
                reply = "ERR parse"
            else:
                reply = handle_line(line, state)
            self.wfile.write(reply.encode() + LF)
            self.wfile.flush()


class AuthServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address, state: ServiceState):
        self.state = state
        super().__init__(address, _Handler)


def parse_listen(spec: str):
    host, sep, port = spec.rpartition(":")
    if not sep or not port.isdigit():
        raise ConfigurationError(f"--listen expects host:port, got {spec!r}")
    return host or "127.0.0.1", int(port)


def make_server(address, state: ServiceState) -> AuthServer:
    try:
        return AuthServer(address, state)
    except OSError as exc:
        raise ConfigurationError(f"cannot bind {address[0]}:{address[1]}: {exc.strerror or exc}") from None


def serve(address, vault: Vault, device: SramPufDevice, tmap: TernaryMap,
          config: ApgConfig = DEFAULT_CONFIG, vault_path=None, first_cycle_seed: int = 0):
    """Run the service until interrupted."""
    state = ServiceState(vault, device, tmap, config, vault_path, first_cycle_seed)
    with make_server(address, state) as server:
        log.info("listening on %s:%d", *server.server_address[:2])
        server.serve_forever()
