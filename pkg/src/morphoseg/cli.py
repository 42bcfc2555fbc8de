"""Command-line front end.

Exit codes: 0 on success, 1 when an evaluation involves no shapes on one
side (warning), 2 on I/O or argument errors.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import io
from .evaluation import quality_map
from .filters import FilterParams, filter_epm
from .groundtruth import (
    SplitSpec,
    load_polylines,
    make_edge_gt,
    make_label_gt,
    rasterize_polylines,
    split_rows,
    tile_name,
)
from .pipeline import (
    calibrate,
    evaluate,
    format_summary,
    run_baseline,
    run_watershed_pipeline,
    write_calibration_csv,
)


def _rows(text):
    try:
        start, end = text.split(":")
        return int(start), int(end)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected START:END, got {text!r}"
        ) from None


def _band(text):
    try:
        start, end = text.split(":")
        return int(start), int(end)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:END, got {text!r}") from None


def _grid_range(text):
    """START:STOP[:STEP], half-open like Python's range."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(f"expected START:STOP[:STEP], got {text!r}")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers in {text!r}") from None
    return range(*nums)


def _background(name):
    return (0, 0, 0) if name == "black" else (255, 255, 255)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphoseg",
        description="Closed-shape segmentation of edge probability maps and "
        "instance-level evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, conn=True, out=True):
        if conn:
            p.add_argument("--conn", type=int, choices=(4, 8), default=4)
        if out:
            p.add_argument("--out", required=True, metavar="PREFIX")

    p = sub.add_parser("filter", help="area + dynamic filtering of an EPM")
    p.add_argument("epm")
    p.add_argument("--h", type=int, default=0)
    p.add_argument("--lambda", dest="lambda_area", type=int, default=0)
    p.add_argument("--order", choices=("area-first", "h-first"), default="area-first")
    add_common(p)

    p = sub.add_parser("watershed", help="filter + watershed segmentation")
    p.add_argument("epm")
    p.add_argument("--h", type=int, default=0)
    p.add_argument("--lambda", dest="lambda_area", type=int, default=0)
    p.add_argument("--order", choices=("area-first", "h-first"), default="area-first")
    add_common(p)

    p = sub.add_parser("baseline", help="threshold + connected components")
    p.add_argument("epm")
    p.add_argument("--threshold", type=int, default=9)
    add_common(p)

    p = sub.add_parser("rasterize-gt", help="build edge/label ground truth from polylines")
    p.add_argument("polylines")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    add_common(p)

    p = sub.add_parser("calibrate", help="grid-search parameters on a validation band")
    p.add_argument("--epm", required=True)
    p.add_argument("--gt", required=True, help="reference label map (SLAB)")
    p.add_argument("--arm", choices=("watershed", "baseline"), required=True)
    p.add_argument("--rows", type=_rows, required=True, metavar="START:END")
    p.add_argument("--h-grid", type=_grid_range, default=None, metavar="START:STOP[:STEP]")
    p.add_argument("--lambda-grid", type=_grid_range, default=None, metavar="START:STOP[:STEP]")
    p.add_argument("--t-grid", type=_grid_range, default=None, metavar="START:STOP[:STEP]")
    p.add_argument("--order", choices=("area-first", "h-first"), default="area-first")
    p.add_argument("--objective", default="auc", help="'auc' or 'f1@T' (e.g. f1@0.8)")
    p.add_argument("--conn", type=int, choices=(4, 8), default=4)
    p.add_argument("--out", default=None, metavar="PREFIX", help="write the grid as CSV")

    p = sub.add_parser("evaluate", help="match shapes on a test band and report")
    p.add_argument("--ref", required=True, help="reference label map (SLAB)")
    p.add_argument("--pred", required=True, help="predicted label map (SLAB)")
    p.add_argument("--rows", type=_rows, required=True, metavar="START:END")
    p.add_argument("--background", choices=("white", "black"), default="white")
    add_common(p, conn=False)

    p = sub.add_parser("render-maps", help="precision/recall quality maps only")
    p.add_argument("--ref", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--background", choices=("white", "black"), default="white")
    add_common(p, conn=False)

    p = sub.add_parser("tiles", help="list split bands and tile origins; optionally export tiles")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--train", type=_band, default=(0, 4000), metavar="START:END")
    p.add_argument("--val", type=_band, default=(4000, 5000), metavar="START:END")
    p.add_argument("--test", type=_band, default=(5000, 6500), metavar="START:END")
    p.add_argument("--tile-size", type=int, default=500)
    p.add_argument("--image", default=None, help="PGM to cut into tiles")
    p.add_argument("--out", default=None, metavar="DIR", help="tile output directory")

    return parser


def _cmd_filter(args) -> int:
    epm = io.read_graymap(args.epm)
    params = FilterParams(args.h, args.lambda_area)
    io.write_graymap(filter_epm(epm, params, args.conn, args.order),
                     f"{args.out}filtered.pgm")
    return 0


def _cmd_watershed(args) -> int:
    params = FilterParams(args.h, args.lambda_area)
    result = run_watershed_pipeline(args.epm, params, args.out, args.conn, args.order)
    print(f"regions: {result.region_count}")
    return 0


def _cmd_baseline(args) -> int:
    labels = run_baseline(args.epm, args.threshold, args.out, args.conn)
    print(f"shapes: {int(labels.max())}")
    return 0


def _cmd_rasterize_gt(args) -> int:
    ps = load_polylines(args.polylines, args.width, args.height)
    strokes = rasterize_polylines(ps)
    edges = make_edge_gt(ps)
    labels = make_label_gt(edges, args.conn)
    io.write_binary_mask(strokes, f"{args.out}strokes.pgm")
    io.write_binary_mask(edges, f"{args.out}edges.pgm")
    io.write_labelmap(labels, f"{args.out}labels.slab")
    print(f"shapes: {int(labels.max())}")
    return 0


def _cmd_calibrate(args) -> int:
    epm = io.read_graymap(args.epm)
    gt = io.read_labelmap(args.gt)
    grid = None
    if args.arm == "watershed" and (args.h_grid is not None or args.lambda_grid is not None):
        hs = args.h_grid if args.h_grid is not None else range(1, 11)
        lams = args.lambda_grid if args.lambda_grid is not None else range(50, 501, 50)
        grid = tuple(FilterParams(h, lam) for h in hs for lam in lams)
    elif args.arm == "baseline" and args.t_grid is not None:
        grid = tuple(args.t_grid)
    result = calibrate(epm, gt, args.arm, args.rows, grid, args.conn,
                       args.order, args.objective)
    if args.arm == "watershed":
        print(f"best: h={result.best.h} lambda={result.best.lambda_area} "
              f"score={result.score:.6f}")
    else:
        print(f"best: threshold={result.best} score={result.score:.6f}")
    if args.out:
        write_calibration_csv(result, f"{args.out}grid.csv")
    return 0


def _cmd_evaluate(args) -> int:
    ref = io.read_labelmap(args.ref)
    pred = io.read_labelmap(args.pred)
    report = evaluate(ref, pred, args.rows, args.out, _background(args.background))
    print(format_summary(report["summary"]))
    print(f"AUC-F1: {report['auc_f1']:.6f}")
    if report["ref_shapes"] == 0 or report["pred_shapes"] == 0:
        print("warning: evaluation produced no shapes on one side", file=sys.stderr)
        return 1
    return 0


def _cmd_render_maps(args) -> int:
    ref = io.read_labelmap(args.ref)
    pred = io.read_labelmap(args.pred)
    bg = _background(args.background)
    io.write_colormap(quality_map(pred, ref, "precision", bg),
                      f"{args.out}precision.ppm")
    io.write_colormap(quality_map(ref, pred, "recall", bg),
                      f"{args.out}recall.ppm")
    return 0


def _cmd_tiles(args) -> int:
    spec = SplitSpec(train=args.train, val=args.val, test=args.test,
                     tile_size=args.tile_size)
    result = split_rows(args.width, args.height, spec)
    for name, (start, end) in result.bands.items():
        print(f"{name}: rows [{start}, {end}), {result.tile_count(name)} tiles")
    print(f"total tiles: {result.tile_count()}")
    if args.image:
        if not args.out:
            raise ValueError("--out DIR is required when exporting tiles")
        img = io.read_graymap(args.image)
        os.makedirs(args.out, exist_ok=True)
        t = spec.tile_size
        for origins in result.tiles.values():
            for row, col in origins:
                tile = img[row:row + t, col:col + t]
                io.write_graymap(tile, os.path.join(args.out, tile_name(row, col)))
    return 0


_COMMANDS = {
    "filter": _cmd_filter,
    "watershed": _cmd_watershed,
    "baseline": _cmd_baseline,
    "rasterize-gt": _cmd_rasterize_gt,
    "calibrate": _cmd_calibrate,
    "evaluate": _cmd_evaluate,
    "render-maps": _cmd_render_maps,
    "tiles": _cmd_tiles,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError, io.RasterFormatError) as exc:
        print(f"morphoseg {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
