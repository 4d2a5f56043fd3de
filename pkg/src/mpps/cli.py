"""Command-line front end.

    mpps keygen  --out key.json [--seed N]
    mpps encrypt --key key.json --in plain.ppm --out cipher.ppm
    mpps decrypt --key key.json --in cipher.ppm --out plain.ppm
    mpps attack  --oracle-key hidden.json --height 2 --width 2 --out eq.json [--record DIR] [--verify N]
    mpps attack  --transcript DIR --height 2 --width 2 --out eq.json
    mpps verify  --trials 100 --size 8x8
    mpps tables  [--out tables.json]
    mpps graph   --map cls --mu 121/2^5 --precision 9 --mode round --dot g.dot --summary g.json

Exit status: 0 success, 1 usage error, 2 data or protocol error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import attack, degradation, dna, io
from .cipher import RgbImage, SecretKey, decrypt, encrypt
from .errors import ParameterError, ProtocolError, ShapeError

log = logging.getLogger("mpps")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _size(text):
    try:
        h, w = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MxN, got {text!r}") from None
    if h <= 0 or w <= 0:
        raise argparse.ArgumentTypeError("dimensions must be positive")
    return h, w


def _read_image(path, raw):
    return io.read_raw(path, *raw) if raw else io.read_ppm(path)


def _write_image(path, img, raw):
    (io.write_raw if raw else io.write_ppm)(path, img)


def cmd_keygen(args):
    seed = args.seed if args.seed is not None else int(np.random.SeedSequence().entropy % 2**63)
    key = SecretKey.random(seed, transient=args.transient, s3_quantizer=args.s3_quantizer)
    io.save_key(args.out, key, seed=seed)
    print(f"wrote secret key to {args.out} (seed {seed})")


def cmd_encrypt(args):
    key = io.load_key(args.key)
    _write_image(args.out, encrypt(_read_image(args.input, args.raw), key), args.raw)


def cmd_decrypt(args):
    key = io.load_key(args.key)
    _write_image(args.out, decrypt(_read_image(args.input, args.raw), key), args.raw)


def cmd_attack(args):
    h, w = args.height, args.width
    hidden = None
    if args.oracle_key:
        hidden = io.load_key(args.oracle_key)
        oracle = attack.CipherOracle(hidden)
        if args.record:
            oracle = attack.RecordingOracle(oracle, args.record)
    else:
        oracle = attack.TranscriptOracle(args.transcript)
    res = attack.run_attack(oracle, h, w)
    if not res.verified:
        raise ProtocolError("recovered key does not reproduce the oracle's responses")
    io.save_key(args.out, res.key)
    red, green, blue = res.raw
    print(f"oracle queries: {res.queries} (budget {attack.query_budget(h, w)})")
    print(f"candidates R/G/B: {len(red)}/{len(green)}/{len(blue)}; after filtering: "
          f"{len(res.filtered.red)}/{len(res.filtered.green)}/{len(res.filtered.blue)}")
    print(f"rules E={res.key.e} D={res.key.d}")
    print(f"wrote equivalent key to {args.out}")
    if args.verify:
        if hidden is None:
            raise ParameterError("--verify needs --oracle-key (a transcript cannot encrypt fresh images)")
        rng = np.random.default_rng(args.seed)
        bad = 0
        for _ in range(args.verify):
            img = RgbImage.random(h, w, rng)
            bad += decrypt(encrypt(img, hidden), res.key) != img
        print(f"verify: {args.verify - bad}/{args.verify} fresh images decrypted")
        if bad:
            return EXIT_DATA
    return EXIT_OK


def cmd_verify(args):
    h, w = args.size
    rng = np.random.default_rng(args.seed)
    rt_fail = atk_fail = 0
    for _ in range(args.trials):
        key = SecretKey.random(rng)
        img = RgbImage.random(h, w, rng)
        rt_fail += decrypt(encrypt(img, key), key) != img
    budget = attack.query_budget(h, w)
    for _ in range(args.attack_trials):
        key = SecretKey.random(rng)
        oracle = attack.CipherOracle(key)
        rec = attack.full_attack(oracle, h, w)
        img = RgbImage.random(h, w, rng)
        atk_fail += oracle.query_count != budget or decrypt(encrypt(img, key), rec) != img
    print(f"round-trip: {args.trials - rt_fail}/{args.trials} passed")
    print(f"attack: {args.attack_trials - atk_fail}/{args.attack_trials} passed")
    return EXIT_OK if rt_fail == atk_fail == 0 else EXIT_DATA


def cmd_tables(args):
    text = json.dumps(dna.tables_document(), indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def cmd_graph(args):
    g = degradation.build_graph(args.map, degradation.parse_mu(args.mu), args.precision, args.mode)
    summary = degradation.summarize(g)
    if args.dot:
        Path(args.dot).write_text(degradation.export_dot(g))
    doc = summary.as_dict()
    doc.update(map=args.map, mu=str(g.mu), precision=args.precision, mode=args.mode)
    text = json.dumps(doc, indent=1)
    if args.summary:
        Path(args.summary).write_text(text + "\n")
    else:
        print(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mpps", description="MPPS cipher and chosen-plaintext attack workbench")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("keygen", help="generate a random secret key")
    k.add_argument("--out", required=True)
    k.add_argument("--seed", type=int)
    k.add_argument("--transient", type=int, default=500)
    k.add_argument("--s3-quantizer", choices=("parity", "threshold"), default="parity")
    k.set_defaults(func=cmd_keygen)

    for name, func in (("encrypt", cmd_encrypt), ("decrypt", cmd_decrypt)):
        c = sub.add_parser(name, help=f"{name} a PPM image")
        c.add_argument("--key", required=True, help="secret or equivalent key JSON")
        c.add_argument("--in", dest="input", required=True)
        c.add_argument("--out", required=True)
        c.add_argument("--raw", type=_size, metavar="MxN", help="headerless RGB input/output of this size")
        c.set_defaults(func=func)

    a = sub.add_parser("attack", help="recover an equivalent key with chosen plaintexts")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("--oracle-key", help="hidden secret key JSON for an in-process oracle")
    src.add_argument("--transcript", help="directory of query_NNN_plain.ppm / query_NNN_cipher.ppm")
    a.add_argument("--height", type=int, required=True)
    a.add_argument("--width", type=int, required=True)
    a.add_argument("--out", required=True, help="recovered equivalent key JSON")
    a.add_argument("--record", help="write the query transcript to this directory")
    a.add_argument("--verify", type=int, default=0, metavar="N", help="decrypt N fresh random images")
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_attack)

    v = sub.add_parser("verify", help="round-trip and attack self-test")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--attack-trials", type=int, default=10)
    v.add_argument("--size", type=_size, default=(8, 8), metavar="MxN")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tables", help="dump DNA tables and composite map classes as JSON")
    t.add_argument("--out")
    t.set_defaults(func=cmd_tables)

    g = sub.add_parser("graph", help="functional graph of a digitized map")
    g.add_argument("--map", choices=("cls", "clt"), required=True)
    g.add_argument("--mu", required=True, help="e.g. 121/2^5 or 3.78125")
    g.add_argument("--precision", type=int, required=True)
    g.add_argument("--mode", choices=("floor", "round", "ceil"), default="round")
    g.add_argument("--dot", help="write DOT here")
    g.add_argument("--summary", help="write summary JSON here (default stdout)")
    g.set_defaults(func=cmd_graph)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.command == "attack" and min(args.height, args.width) <= 0:
        print("mpps: error: dimensions must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args) or EXIT_OK
    except FileNotFoundError as exc:
        print(f"mpps: error: no such file: {exc.filename}", file=sys.stderr)
    except io.FormatError as exc:
        print(f"mpps: error: malformed input: {exc}", file=sys.stderr)
    except ShapeError as exc:
        print(f"mpps: error: dimension mismatch: {exc}", file=sys.stderr)
    except ProtocolError as exc:
        print(f"mpps: error: attack failed: {exc}", file=sys.stderr)
    except ParameterError as exc:
        print(f"mpps: error: {exc}", file=sys.stderr)
    return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
