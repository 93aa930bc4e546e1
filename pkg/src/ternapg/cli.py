"""Command-line entry point (``ternapg``)."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import metrics
from .apg import ApgConfig
from .device import (DEFAULT_CELL_COUNT, BiasModel, format_device_spec, load_device_spec,
                     parse_device_spec)
from .enrollment import DEFAULT_READ_COUNT, enroll, load_map, puf_noise, save_map
from .errors import PufError
from .service import MSG_SIZE, SessionContext, interactive_session, parse_listen, serve
from .vault import Vault, authenticate, enroll_user, load_vault, save_vault


def _seed(text):
    return int(text, 0)


def _apg_flags(p):
    p.add_argument("--expander-variant", choices=("a", "b"), default="b")
    p.add_argument("--endianness", choices=("be", "le"), default="be")
    p.add_argument("--input-convention", choices=("padded", "plain", "id+password"),
                   default="padded")


def _config(args) -> ApgConfig:
    return ApgConfig(args.input_convention, args.expander_variant, args.endianness)


def _credentials(p):
    p.add_argument("--user", required=True)
    p.add_argument("--password", required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ternapg",
                                     description="Ternary SRAM-PUF password manager simulator")
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="command", required=True)

    dev = sub.add_parser("device", help="device spec files")
    dev_sub = dev.add_subparsers(dest="device_command", required=True)
    new = dev_sub.add_parser("new", help="write a device spec file")
    new.add_argument("--cell-count", type=int, default=DEFAULT_CELL_COUNT)
    new.add_argument("--stable-fraction", type=float, default=BiasModel.stable_fraction)
    new.add_argument("--fuzzy-low", type=float, default=BiasModel.fuzzy_low)
    new.add_argument("--fuzzy-high", type=float, default=BiasModel.fuzzy_high)
    new.add_argument("--seed", type=_seed, required=True, help="device seed")
    new.add_argument("--out", help="output path (default stdout)")

    ed = sub.add_parser("enroll-device", help="characterize a device into a ternary map")
    ed.add_argument("--device-spec", required=True)
    ed.add_argument("--reads", type=int, default=DEFAULT_READ_COUNT)
    ed.add_argument("--base-seed", type=_seed, default=0)
    ed.add_argument("--map", required=True, help="output map path")

    noise = sub.add_parser("noise", help="print the fuzzy-cell fraction of a map")
    noise.add_argument("--map", required=True)

    eu = sub.add_parser("enroll-user", help="add a user to a vault")
    eu.add_argument("--vault", required=True)
    eu.add_argument("--map", required=True)
    _credentials(eu)
    _apg_flags(eu)

    auth = sub.add_parser("auth", help="authenticate against a fresh power-up read")
    auth.add_argument("--vault", required=True)
    auth.add_argument("--map", required=True)
    auth.add_argument("--device-spec", required=True)
    auth.add_argument("--seed", type=_seed, default=0, help="power-up cycle seed")
    _credentials(auth)
    _apg_flags(auth)

    inter = sub.add_parser("interactive", help="board-style terminal session on stdin")
    inter.add_argument("--map")
    inter.add_argument("--device-spec")
    inter.add_argument("--seed", type=_seed, default=0, help="power-up cycle seed")
    inter.add_argument("--verbose", action="store_true")
    inter.add_argument("--msg-size", type=int, default=MSG_SIZE)
    _apg_flags(inter)

    srv = sub.add_parser("serve", help="run the TCP authentication service")
    srv.add_argument("--listen", default="127.0.0.1:7878")
    srv.add_argument("--vault", required=True)
    srv.add_argument("--map", required=True)
    srv.add_argument("--device-spec", required=True)
    srv.add_argument("--seed", type=_seed, default=0, help="first power-up cycle seed")
    _apg_flags(srv)

    met = sub.add_parser("metrics", help="write per-trial Hamming distances as CSV")
    met.add_argument("--study", choices=("intra", "inter"), default="intra")
    met.add_argument("--device-spec", help="device (intra study)")
    met.add_argument("--map", help="ternary map (intra study)")
    met.add_argument("--trials", type=int, default=100)
    met.add_argument("--seed", type=_seed, default=0)
    met.add_argument("--reads", type=int, default=DEFAULT_READ_COUNT)
    met.add_argument("--stable-fraction", type=float, default=BiasModel.stable_fraction)
    met.add_argument("--cell-count", type=int, default=DEFAULT_CELL_COUNT)
    met.add_argument("--no-mask", action="store_true", help="diagnostic: skip fuzzy masking")
    met.add_argument("--user", default="user")
    met.add_argument("--password", default="password")
    met.add_argument("--out", help="CSV path (default stdout)")
    _apg_flags(met)
    return parser


def _load_vault(path, map_path):
    if Path(path).exists():
        return load_vault(path)
    return Vault(ternary_map_ref=str(map_path))


def run(args) -> int:
    cmd = args.command
    if cmd == "device":
        text = format_device_spec(args.cell_count,
                                  BiasModel(args.stable_fraction, args.fuzzy_low, args.fuzzy_high),
                                  args.seed)
        parse_device_spec(text)  # validate before writing
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    if cmd == "enroll-device":
        tmap = enroll(load_device_spec(args.device_spec), args.reads, args.base_seed)
        save_map(tmap, args.map)
        print(f"{tmap.cell_count} cells, noise {puf_noise(tmap):.6f}")
        return 0
    if cmd == "noise":
        print(f"{puf_noise(load_map(args.map)):.6f}")
        return 0
    if cmd == "enroll-user":
        vault = _load_vault(args.vault, args.map)
        enroll_user(vault, args.user.encode(), args.password.encode(),
                    load_map(args.map), _config(args))
        save_vault(vault, args.vault)
        print("enrolled")
        return 0
    if cmd == "auth":
        ok = authenticate(load_vault(args.vault), args.user.encode(), args.password.encode(),
                          load_device_spec(args.device_spec), load_map(args.map),
                          args.seed, _config(args))
        print("accept" if ok else "reject")
        return 0 if ok else 1
    if cmd == "interactive":
        ctx = SessionContext(load_map(args.map) if args.map else None,
                             load_device_spec(args.device_spec) if args.device_spec else None,
                             args.seed, _config(args))
        result = interactive_session(sys.stdin.buffer, sys.stdout.buffer, ctx,
                                     args.verbose, args.msg_size)
        return 0 if result is not None else 1
    if cmd == "serve":
        serve(parse_listen(args.listen), _load_vault(args.vault, args.map),
              load_device_spec(args.device_spec), load_map(args.map), _config(args),
              args.vault, args.seed)
        return 0
    if cmd == "metrics":
        creds = [(args.user.encode(), args.password.encode())]
        if args.study == "intra":
            if not (args.device_spec and args.map):
                raise PufError("the intra study needs --device-spec and --map")
            report = metrics.intra_device_study(
                load_device_spec(args.device_spec), load_map(args.map), creds,
                args.trials, args.seed, mask=not args.no_mask, config=_config(args))
        else:
            report = metrics.inter_device_study(
                BiasModel(args.stable_fraction), creds, args.trials, args.seed,
                args.cell_count, args.reads, _config(args))
        if args.out:
            with open(args.out, "w", newline="") as fh:
                metrics.write_csv(report.rows, fh)
        else:
            metrics.write_csv(report.rows, sys.stdout)
        return 0
    raise AssertionError(cmd)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr)
    try:
        return run(args)
    except (PufError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
