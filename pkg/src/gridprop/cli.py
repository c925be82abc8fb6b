"""Command-line interface: file-based propagation, affinity maps, loss, bench.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 shape/validation error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__
from ._validation import ValidationError
from .bench import DEFAULT_SIZES, run_benchmark
from .fileio import (
    read_field,
    read_guide,
    read_mask,
    write_field,
    write_pgm16,
)
from .global_prop import global_affinity_map
from .grid_graph import guide_tree
from .labeler import (
    PropagationConfig,
    RegionMask,
    SoftLabelPair,
    affinity_loss,
    generate_pseudo_labels,
)
from .local_prop import local_affinity_window

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4

_MODES = {"parallel": "parallel", "gp-lp": "gp_then_lp", "lp-gp": "lp_then_gp"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridprop",
        description="Edge-aware global/local propagation of dense fields over pixel grids",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagate", help="propagate a unary field under a guide image")
    p.add_argument("--image", required=True, help="guide image (PNG or NPY)")
    p.add_argument("--feature", default=None, help="optional high-level feature guide (NPY)")
    p.add_argument("--unary", required=True, help="unary field, NPY (K, H, W)")
    p.add_argument("--mode", choices=sorted(_MODES), default="parallel")
    p.add_argument("--zeta-g", type=float, default=0.07)
    p.add_argument("--zeta-s", type=float, default=0.15)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--format", choices=["npy", "pgm"], default="npy")

    p = sub.add_parser("affinity-map", help="render global affinities of one pixel")
    p.add_argument("--image", required=True)
    p.add_argument("--pixel", required=True, help="query pixel as x,y (column,row)")
    p.add_argument("--zeta-g", type=float, default=0.07)
    p.add_argument("--zeta-s", type=float, default=0.15)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--out-prefix", required=True)
    p.add_argument(
        "--local-window",
        action="store_true",
        help="also write the local kernel window weights for the pixel",
    )

    p = sub.add_parser("bench", help="time fast vs brute-force global propagation")
    p.add_argument("--sizes", default=",".join(str(s) for s in DEFAULT_SIZES))
    p.add_argument("--warmup", type=int, default=5)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--naive-max-n", type=int, default=16384)
    p.add_argument("--naive-reps", type=int, default=1)
    p.add_argument("--zeta-g", type=float, default=0.07)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("loss", help="L1 affinity loss of a prediction vs soft labels")
    p.add_argument("--pred", required=True)
    p.add_argument("--label-global", required=True)
    p.add_argument("--label-local", default=None)
    p.add_argument("--mask", default=None, help="NPY (H, W); nonzero marks unlabeled")
    return parser


def _parse_pixel(text: str) -> tuple[int, int]:
    try:
        x, y = (int(part) for part in text.split(","))
    except Exception as exc:
        raise ValidationError(f"--pixel must be 'x,y', got {text!r}") from exc
    return x, y


def _cmd_propagate(args) -> int:
    t0 = time.perf_counter()
    guide = read_guide(args.image)
    feature = read_guide(args.feature) if args.feature else None
    phi = read_field(args.unary, guide.height, guide.width)
    config = PropagationConfig(
        zeta_g=args.zeta_g,
        zeta_s=args.zeta_s,
        lp_radius=args.radius,
        lp_iterations=args.iters,
        combine_mode=_MODES[args.mode],
    )
    pair = generate_pseudo_labels(guide, phi, config, feature=feature)
    written = _write_pair(args.out_prefix, pair, args.format)
    wall = time.perf_counter() - t0
    print(
        f"{guide.height}x{guide.width} K={phi.shape[0]} mode={args.mode} "
        f"zeta_g={args.zeta_g} zeta_s={args.zeta_s} wall={wall:.3f}s "
        f"wrote {' '.join(written)}"
    )
    return EXIT_OK


def _write_pair(prefix: str, pair: SoftLabelPair, fmt: str) -> list[str]:
    written = []
    for tag, field in (("g", pair.y_global), ("s", pair.y_local)):
        if fmt == "npy":
            path = f"{prefix}_{tag}.npy"
            write_field(path, field)
            written.append(path)
        else:
            for c in range(field.shape[0]):
                path = f"{prefix}_{tag}_c{c}.pgm"
                write_pgm16(path, np.clip(field[c], 0.0, 1.0))
                written.append(path)
    return written


def _cmd_affinity_map(args) -> int:
    guide = read_guide(args.image)
    x, y = _parse_pixel(args.pixel)
    if not (0 <= x < guide.width and 0 <= y < guide.height):
        raise ValidationError(
            f"pixel ({x},{y}) outside {guide.width}x{guide.height} image"
        )
    tree = guide_tree(guide)
    amap = global_affinity_map(tree, y * guide.width + x, args.zeta_g)
    np.save(f"{args.out_prefix}.npy", amap)
    write_pgm16(f"{args.out_prefix}.pgm", amap)
    written = [f"{args.out_prefix}.npy", f"{args.out_prefix}.pgm"]
    if args.local_window:
        wmap = local_affinity_window(
            guide, (y, x), zeta_s=args.zeta_s, radius=args.radius
        )
        np.save(f"{args.out_prefix}_local.npy", wmap)
        write_pgm16(f"{args.out_prefix}_local.pgm", wmap)
        written += [f"{args.out_prefix}_local.npy", f"{args.out_prefix}_local.pgm"]
    print(f"query=({x},{y}) zeta_g={args.zeta_g} wrote {' '.join(written)}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError as exc:
        raise ValidationError(f"--sizes must be comma-separated integers: {exc}")
    if not sizes or any(s < 2 for s in sizes):
        raise ValidationError("--sizes must contain integers >= 2")
    import json

    report = run_benchmark(
        sizes=sizes,
        warmup=args.warmup,
        reps=args.reps,
        naive_max_n=args.naive_max_n,
        naive_reps=args.naive_reps,
        zeta_g=args.zeta_g,
        seed=args.seed,
        progress=lambda row: print(json.dumps(row), flush=True),
    )
    print(json.dumps({"slope": report.slope}))
    return EXIT_OK


def _cmd_loss(args) -> int:
    y_global = read_field(args.label_global)
    if args.label_local:
        y_local = read_field(args.label_local)
        if y_local.shape != y_global.shape:
            raise ValidationError(
                f"label shapes differ: {args.label_global} is {y_global.shape}, "
                f"{args.label_local} is {y_local.shape}"
            )
        pair = SoftLabelPair(y_global, y_local, "parallel")
    else:
        pair = SoftLabelPair(y_global, y_global, "gp_then_lp", cascaded=True)
    pred = read_field(args.pred)
    if pred.shape != y_global.shape:
        raise ValidationError(
            f"{args.pred} has shape {pred.shape} but {args.label_global} "
            f"has shape {y_global.shape}"
        )
    mask = RegionMask(read_mask(args.mask)) if args.mask else None
    print(f"{affinity_loss(pred, pair, mask):.17g}")
    return EXIT_OK


_COMMANDS = {
    "propagate": _cmd_propagate,
    "affinity-map": _cmd_affinity_map,
    "bench": _cmd_bench,
    "loss": _cmd_loss,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # numpy raises plain ValueError for unreadable/corrupt NPY payloads
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())
