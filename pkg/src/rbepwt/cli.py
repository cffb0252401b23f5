"""Command-line front end.

Exit codes: 0 ok, 1 runtime failure, 2 usage error, 3 format error,
4 precondition violation.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import analysis, codec, container, roi
from .errors import FormatError, PreconditionError
from .imagecore import load_image, save_image
from .paths import CHEBYSHEV, EUCLIDEAN, path_to_csv
from .segmentation import SegParams, fh_segment, load_labelmap, perimeter, save_labelmap
from .synthetic import cartoon

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_PRECONDITION = 4


class UsageError(Exception):
    pass


def _input(path: str) -> str:
    if not os.path.isfile(path):
        raise UsageError(f"input file not found: {path}")
    return path


def _seg_params(args) -> SegParams:
    try:
        return SegParams(k=args.k, sigma=args.sigma, min_size=args.min_size)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_segment(args) -> int:
    img = load_image(_input(args.input))
    lm = fh_segment(img, _seg_params(args))
    save_labelmap(lm, args.output)
    print(f"regions={lm.region_count} perimeter={perimeter(lm)}")
    return EXIT_OK


def cmd_encode(args) -> int:
    img = load_image(_input(args.input))
    if args.seg is not None:
        lm = load_labelmap(_input(args.seg))
    elif args.path == codec.EPWT:
        lm = None
    else:
        lm = fh_segment(img, _seg_params(args))
    enc = codec.encode(img, lm, mode=args.path, bank=args.wavelet, levels=args.levels, distance=args.distance)
    container.write_encoded(enc, args.output)
    print(f"levels={enc.levels} coefficients={enc.coefficient_count} regions={enc.labelmap.region_count}")
    return EXIT_OK


def cmd_decode(args) -> int:
    enc = container.read_encoded(_input(args.input))
    save_image(codec.decode(enc), args.output)
    return EXIT_OK


def cmd_threshold(args) -> int:
    enc = container.read_encoded(_input(args.input))
    out = analysis.keep_n_largest(enc, args.keep)
    container.write_encoded(out, args.output or args.input)
    return EXIT_OK


def cmd_roi(args) -> int:
    enc = container.read_encoded(_input(args.input))
    try:
        labels = roi.parse_labels(args.roi_labels)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.ancestors_only:
        out = roi.keep_ancestors_only(enc, labels)
    else:
        out = roi.roi_threshold(enc, labels, args.roi_frac, args.rest_frac)
    container.write_encoded(out, args.output or args.input)
    print(f"nonzero={np.count_nonzero(out.coefficients())}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    f = load_image(_input(args.original))
    g = load_image(_input(args.reconstructed))
    if f.shape != g.shape:
        raise PreconditionError(f"image sizes differ: {f.shape} vs {g.shape}")
    name = args.image or os.path.basename(args.original)
    if args.header:
        print(analysis.METRICS_HEADER)
    print(analysis.metrics_row(name, args.mode, args.bank, args.n_coeffs, f, g))
    return EXIT_OK


def cmd_basis(args) -> int:
    enc = container.read_encoded(_input(args.input))
    try:
        element = analysis.basis_element(enc, (args.level, args.index))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lo, hi = element.min(), element.max()
    scaled = (element - lo) * (255.0 / (hi - lo)) if hi > lo else np.zeros_like(element)
    save_image(scaled, args.output)
    return EXIT_OK


def cmd_pathdump(args) -> int:
    enc = container.read_encoded(_input(args.input))
    paths = codec.level_paths(enc)
    level = enc.levels if args.level is None else args.level
    if level not in paths:
        raise UsageError(f"level must be in 1..{enc.levels}")
    text = path_to_csv(paths[level])
    if args.output:
        with open(args.output, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_cartoon(args) -> int:
    save_image(cartoon(args.size), args.output)
    return EXIT_OK


def _add_seg_flags(p):
    p.add_argument("--k", type=float, default=200.0, help="segmentation scale parameter (default 200)")
    p.add_argument("--sigma", type=float, default=2.0, help="Gaussian presmoothing std-dev (default 2)")
    p.add_argument("--min-size", type=int, default=10, help="minimum region size (default 10)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbepwt", description="Region based easy path wavelet codec")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="segment a PGM into regions")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    _add_seg_flags(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("encode", help="encode a PGM into an RBE1 stream")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--path", choices=codec.MODES, default=codec.EASY)
    p.add_argument("--wavelet", choices=("haar", "cdf97"), default="cdf97")
    p.add_argument("--levels", type=int, default=None, help="default: maximal")
    p.add_argument("--distance", choices=(EUCLIDEAN, CHEBYSHEV), default=EUCLIDEAN)
    p.add_argument("--seg", help="label map from 'rbepwt segment' (segments on the fly if omitted)")
    _add_seg_flags(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode an RBE1 stream to PGM")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("threshold", help="keep the N largest coefficients")
    p.add_argument("input")
    p.add_argument("--keep", type=int, required=True)
    p.add_argument("-o", "--output", help="default: overwrite the input")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("roi", help="region-of-interest thresholding (Haar only)")
    p.add_argument("input")
    p.add_argument("--roi-labels", required=True, help="comma-separated region labels")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--ancestors-only", action="store_true")
    mode.add_argument("--roi-frac", type=float)
    p.add_argument("--rest-frac", type=float, default=0.0)
    p.add_argument("-o", "--output", help="default: overwrite the input")
    p.set_defaults(func=cmd_roi)

    p = sub.add_parser("metrics", help="print a CSV row of PSNR values")
    p.add_argument("original")
    p.add_argument("reconstructed")
    p.add_argument("--image", default=None)
    p.add_argument("--mode", default="")
    p.add_argument("--bank", default="")
    p.add_argument("--n-coeffs", default="")
    p.add_argument("--header", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("basis", help="render one basis element as PGM")
    p.add_argument("input")
    p.add_argument("--level", type=int, required=True, help="0 = lowest approximation, l >= 1 = details")
    p.add_argument("--index", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("path-dump", aliases=["pathdump"], help="dump one level's path as CSV")
    p.add_argument("input")
    p.add_argument("--level", type=int, default=None, help="default: finest level")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_pathdump)

    p = sub.add_parser("cartoon", help="write the synthetic 4-region test image")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--size", type=int, default=64)
    p.set_defaults(func=cmd_cartoon)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "roi_frac", None) is None and hasattr(args, "ancestors_only"):
        args.roi_frac = 0.0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"rbepwt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"rbepwt: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except PreconditionError as exc:
        print(f"rbepwt: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (OSError, ValueError) as exc:
        print(f"rbepwt: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
