"""Command-line front-end.

Exit codes: 0 ok, 1 corrupted input, 2 bad input or usage, 3 insufficient
capacity, 4 incomplete payload, 5 no stego image found.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings
from pathlib import Path

from . import __version__
from .chunking import DEFAULT_CHUNK_SIZE
from .errors import ConfigurationError, InputFormatError, SkippedImageWarning, StegoError
from .files import load_image, png_bytes
from .lsb import DEFAULT_BITS_PER_SLOT, capacity_bits
from .pipeline import TransformSpec, decode, encode_with_plan
from .steganalysis import comb_score, compare, histogram


def canonical_json(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _bits(text):
    value = _positive_int(text)
    if value not in (1, 2, 3):
        raise argparse.ArgumentTypeError("bits per slot must be 1, 2 or 3")
    return value


def _hex_key(text):
    try:
        key = bytes.fromhex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--xor-key must be hex, got {text!r}")
    if not key:
        raise argparse.ArgumentTypeError("--xor-key must not be empty")
    return key


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--chunk-size", type=_positive_int, default=DEFAULT_CHUNK_SIZE,
                        help="payload bytes per chunk (default: %(default)s)")
    common.add_argument("--bits", type=_bits, default=DEFAULT_BITS_PER_SLOT,
                        help="low bits used per channel byte, 1-3 (default: %(default)s)")
    common.add_argument("--xor-key", type=_hex_key, default=None, metavar="HEX",
                        help="XOR payload bytes with a keystream derived from this key")
    common.add_argument("--out", type=Path, default=Path("."), metavar="DIR",
                        help="output directory (default: current directory)")
    common.add_argument("--overwrite", action="store_true", help="replace existing output files")
    common.add_argument("--json-out", type=Path, default=None, metavar="PATH",
                        help="also write a machine-readable summary here")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="stegograph",
        description="Hide several images across several cover images and get them back.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", parents=[common], help="hide payload images in cover images")
    enc.add_argument("-p", "--payload", action="append", required=True, type=Path, metavar="PAYLOAD",
                     help="payload image (repeat for several)")
    enc.add_argument("files", nargs="+", type=Path, metavar="COVER",
                     help="cover images, filled in the order given")

    dec = sub.add_parser("decode", parents=[common], help="recover payload images")
    dec.add_argument("files", nargs="+", type=Path, metavar="STEGO")

    cap = sub.add_parser("capacity", parents=[common], help="report cover capacity")
    cap.add_argument("files", nargs="+", type=Path, metavar="COVER")

    ana = sub.add_parser("analyze", parents=[common], help="histogram and comb statistics")
    ana.add_argument("--compare", nargs=2, type=Path, metavar=("ORIGINAL", "STEGO"),
                     help="compare an original image with its stego version")
    ana.add_argument("files", nargs="*", type=Path, metavar="IMAGE")
    return parser


def _transform(args):
    return TransformSpec.xor(args.xor_key) if args.xor_key else None


def _write_outputs(outputs: dict[Path, bytes], overwrite: bool) -> None:
    """Write every file or none: temporaries first, then renames."""
    pending = {}
    for path, data in outputs.items():
        if path.exists() and not overwrite:
            if path.read_bytes() == data:
                continue
            raise InputFormatError(f"{path} exists; pass --overwrite to replace it")
        pending[path] = data
    tmps = {}
    try:
        for path, data in pending.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
            tmp.write_bytes(data)
            tmps[path] = tmp
        for path, tmp in tmps.items():
            os.replace(tmp, path)
    finally:
        for tmp in tmps.values():
            if tmp.exists():
                tmp.unlink()


def _write_json(path, obj) -> None:
    if path is not None:
        _write_outputs({path: (canonical_json(obj) + "\n").encode("utf-8")}, overwrite=True)


def cmd_encode(args) -> int:
    covers = [load_image(p) for p in args.files]
    payloads = [load_image(p) for p in args.payload]
    names = [args.out / f"{p.stem}.stego.png" for p in args.files]
    if len(set(names)) != len(names):
        raise ConfigurationError("two covers share a file stem; their outputs would collide")

    stegos, layout = encode_with_plan(payloads, covers, args.chunk_size, args.bits, _transform(args))
    _write_outputs({name: png_bytes(img) for name, img in zip(names, stegos)}, args.overwrite)

    s = layout.summary()
    print(f"capacity: {s['capacity_slots']} slots, {s['capacity_bytes']} bytes at {args.bits} bit(s) per slot")
    print(f"payload: {s['payload_bytes']} bytes in {len(payloads)} image(s), "
          f"{layout.payload_slots} slots")
    print(f"segments: {s['segment_bytes']} bytes, {layout.used_slots} slots "
          f"(overhead {100 * layout.overhead_fraction:.2f}%)")
    print(f"utilization: {100 * layout.utilization:.2f}%")
    for name, n in zip(names, s["chunks_per_cover"]):
        print(f"  {name}: {n} chunk(s)")
    _write_json(args.json_out, {"command": "encode", **s, "outputs": [str(n) for n in names]})
    return 0


def cmd_decode(args) -> int:
    stegos = [load_image(p) for p in args.files]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SkippedImageWarning)
        try:
            payloads = decode(stegos, args.bits, _transform(args))
        finally:
            for w in caught:
                if issubclass(w.category, SkippedImageWarning):
                    print(f"warning: skipped {args.files[w.message.index]}: no stego segment", file=sys.stderr)
    names = [args.out / f"payload_{pid}.png" for pid in range(len(payloads))]
    _write_outputs({name: png_bytes(img) for name, img in zip(names, payloads)}, args.overwrite)
    for name, img in zip(names, payloads):
        print(f"{name}: {img.width}x{img.height}")
    _write_json(args.json_out, {
        "command": "decode",
        "payloads": [{"path": str(n), "width": p.width, "height": p.height} for n, p in zip(names, payloads)],
        "skipped": len(caught),
    })
    return 0


def cmd_capacity(args) -> int:
    rows = []
    for path in args.files:
        img = load_image(path)
        bits = capacity_bits(img, args.bits)
        rows.append({"path": str(path), "width": img.width, "height": img.height,
                     "slots": img.n_slots, "bits": bits, "bytes": bits // 8})
        print(f"{path}: {img.width}x{img.height}, {img.n_slots} slots, {bits} bits, {bits // 8} bytes")
    total_slots = sum(r["slots"] for r in rows)
    total_bits = sum(r["bits"] for r in rows)
    print(f"total: {total_slots} slots, {total_bits // 8} bytes at {args.bits} bit(s) per slot")
    _write_json(args.json_out, {"command": "capacity", "bits_per_slot": args.bits, "covers": rows,
                                "total_slots": total_slots, "total_bits": total_bits,
                                "total_bytes": total_bits // 8})
    return 0


def cmd_analyze(args) -> int:
    if not args.files and not args.compare:
        raise ConfigurationError("analyze needs image files or --compare ORIGINAL STEGO")
    summaries, outputs = [], {}
    for path in args.files:
        img = load_image(path)
        hist = histogram(img)
        report = comb_score(hist, args.bits)
        summary = report.summary(str(path), img.width, img.height)
        summaries.append(summary)
        outputs[args.out / f"{path.stem}.hist.csv"] = hist.to_csv().encode("ascii")
        flag = " (degenerate: no comb evidence)" if report.degenerate else ""
        print(f"{path}: comb chi2 {report.statistic:.1f} on {report.degrees_of_freedom} dof, "
              f"verdict {report.verdict:.3f}, max bin {report.combined_max_bin}{flag}")

    result = {"command": "analyze", "bits_per_slot": args.bits, "images": summaries}
    if args.compare:
        original, stego = (load_image(p) for p in args.compare)
        cmp = compare(original, stego)
        result["compare"] = {"original": str(args.compare[0]), "stego": str(args.compare[1]), **cmp.summary()}
        bound = (1 << args.bits) - 1
        print(f"compare {args.compare[0]} vs {args.compare[1]}: max delta {cmp.overall_max_delta} "
              f"(bound {bound} at {args.bits} bit(s)), "
              f"mean |delta| {sum(cmp.mean_abs_delta) / 3:.3f}, max-bin ratio {cmp.max_bin_ratio:.3f}")
    _write_outputs(outputs, args.overwrite)
    _write_json(args.json_out, result)
    return 0


COMMANDS = {"encode": cmd_encode, "decode": cmd_decode, "capacity": cmd_capacity, "analyze": cmd_analyze}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except StegoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
