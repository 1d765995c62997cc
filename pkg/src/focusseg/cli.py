"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 data or validation error.
Diagnostics go to stderr; results go to files or stdout.
"""
from __future__ import annotations

import argparse
import contextlib
import os
import sys

import numpy as np

from . import __version__
from .config import Settings, describe, load_config
from .dct import blur_map
from .edas import edas, read_matrix_csv, write_result_csv
from .errors import FocusSegError
from .evaluation import (
    build_index,
    evaluate_dataset,
    read_index,
    write_curve_csv,
    write_index,
    write_report_csv,
)
from .formats import format_matrix, write_matrix
from .image import load_gray, save_pgm
from .segmentation import segment_detailed, synth_fixture

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _settings(args) -> Settings:
    return load_config(args.config) if args.config else Settings()


def _cmd_blurmap(args, out):
    cfg = _settings(args).pipeline.dct
    bmap = blur_map(load_gray(args.input), cfg)
    if args.out:
        save_pgm(args.out, bmap)
    if args.txt:
        write_matrix(args.txt, bmap)
    if not args.out and not args.txt:
        out.write(format_matrix(bmap))


def _cmd_segment(args, out):
    cfg = _settings(args).pipeline
    trace = (lambda line: out.write(line + "\n")) if args.trace else None
    result = segment_detailed(load_gray(args.input), cfg, trace=trace)
    save_pgm(args.out, result.mask.astype(np.float64))
    if args.map_out:
        save_pgm(args.map_out, result.blur_map)
    if args.fire_out:
        write_matrix(args.fire_out, result.fire, integer=True)


def _cmd_eval(args, out):
    settings = _settings(args)
    if args.index:
        pairs = read_index(args.index)
    elif args.images and args.gt:
        pairs = build_index(args.images, args.gt)
    else:
        raise UsageError("eval: give --index, or both --images and --gt")
    if args.write_index:
        write_index(args.write_index, pairs)
    if args.method == "segment":
        def method(img):
            return segment_detailed(img, settings.pipeline).mask.astype(np.float64)
    else:
        def method(img):
            return blur_map(img, settings.pipeline.dct)
    alpha_sq = args.alpha_sq if args.alpha_sq is not None else settings.alpha_sq
    report = evaluate_dataset(pairs, method, alpha_sq=alpha_sq, workers=args.workers,
                              empty=settings.empty)
    for path, problem in report.skipped:
        print(f"warning: skipped {path}: {problem}", file=sys.stderr)
    write_report_csv(args.out, report)
    if args.curve_out and report.mean_curve is not None:
        write_curve_csv(args.curve_out, report.mean_curve)
    if report.images:
        out.write(f"images {len(report.images)} highest_f {report.highest_f:.6f} "
                  f"mean_max_f {report.mean_of_maxima:.6f}\n")
    else:
        out.write("images 0\n")


def _cmd_rank(args, out):
    mode = args.mode or _settings(args).edas_mode
    result = edas(read_matrix_csv(args.matrix), mode=mode)
    write_result_csv(args.out or out, result)


def _parse_rect(text):
    try:
        x0, y0, x1, y1 = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"synth: --rect expects x0,y0,x1,y1, got {text!r}") from None
    return x0, y0, x1, y1


def _parse_size(text):
    try:
        parts = [int(v) for v in text.lower().split("x")]
    except ValueError:
        raise UsageError(f"synth: --size expects N or HxW, got {text!r}") from None
    if len(parts) == 1:
        return parts[0], parts[0]
    if len(parts) == 2:
        return parts[0], parts[1]
    raise UsageError(f"synth: --size expects N or HxW, got {text!r}")


def _cmd_synth(args, out):
    size = _parse_size(args.size)
    h, w = size
    rect = _parse_rect(args.rect) if args.rect else (w // 4, h // 4, 3 * w // 4, 3 * h // 4)
    image, chi = synth_fixture(size, rect, args.sigma, args.seed, args.texture)
    os.makedirs(args.out_dir, exist_ok=True)
    img_name, gt_name = f"{args.name}.pgm", f"{args.name}_matte.pgm"
    save_pgm(os.path.join(args.out_dir, img_name), image)
    save_pgm(os.path.join(args.out_dir, gt_name), chi)
    manifest = os.path.join(args.out_dir, "manifest.tsv")
    line = f"{img_name}\t{gt_name}\n"
    existing = []
    if os.path.exists(manifest):
        with open(manifest, encoding="utf-8") as fh:
            existing = fh.readlines()
    if line not in existing:
        with open(manifest, "a", encoding="utf-8", newline="\n") as fh:
            fh.write(line)
    out.write(f"{img_name}\t{gt_name}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="focusseg",
        description="Defocus-blur region detection with DCT sharpness maps and a PCNN.",
        epilog=describe(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"focusseg {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def with_config(p):
        p.add_argument("--config", help="INI configuration file (see focusseg --help)")
        return p

    p = with_config(sub.add_parser("blurmap", help="compute a per-pixel sharpness map"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", help="8-bit PGM output")
    p.add_argument("--txt", help="plain-text matrix output")
    p.set_defaults(func=_cmd_blurmap)

    p = with_config(sub.add_parser("segment", help="segment in-focus regions into a binary mask"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="mask PGM (0/255)")
    p.add_argument("--map-out", help="also write the blur map as PGM")
    p.add_argument("--fire-out", help="also write the PCNN fire map as a text matrix")
    p.add_argument("--trace", action="store_true", help="print per-iteration firing counts")
    p.set_defaults(func=_cmd_segment)

    p = with_config(sub.add_parser("eval", help="precision/recall and F-alpha over a dataset"))
    p.add_argument("--index", help="file of image<TAB>gt lines")
    p.add_argument("--images", help="image folder (paired with --gt by file stem)")
    p.add_argument("--gt", help="ground-truth folder")
    p.add_argument("--write-index", help="save the pairing used")
    p.add_argument("--out", required=True, help="per-image CSV report")
    p.add_argument("--curve-out", help="mean PR curve CSV")
    p.add_argument("--method", choices=("blurmap", "segment"), default="blurmap")
    p.add_argument("--alpha-sq", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_eval)

    p = with_config(sub.add_parser("rank", help="EDAS ranking of a decision matrix CSV"))
    p.add_argument("--matrix", required=True)
    p.add_argument("--out", help="result CSV (stdout if omitted)")
    p.add_argument("--mode", choices=("shortfall", "canonical"))
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("synth", help="generate a synthetic composite with a known matte")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--name", default="fixture")
    p.add_argument("--size", default="64", help="N or HxW")
    p.add_argument("--texture", choices=("noise", "checker"), default="noise")
    p.add_argument("--rect", help="foreground x0,y0,x1,y1 (exclusive end)")
    p.add_argument("--sigma", type=float, default=4.0, help="background blur sigma")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_synth)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(out):
            args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("focusseg: a subcommand is required (see --help)")
        args.func(args, out)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except OSError as exc:
        name = getattr(exc, "filename", None)
        print(f"error: {exc.strerror or exc}{f': {name}' if name else ''}", file=err)
        return EXIT_IO
    except (FocusSegError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_DATA
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
