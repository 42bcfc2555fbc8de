"""End-to-end orchestration: segmentation runs, parameter calibration on a
validation row band, and evaluation on a test row band.

Segmentation and component labeling always run on the full image; row
masking happens only when computing indicators, so no topological
information is lost at band boundaries.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import io
from .baseline import label_components, threshold_epm
from .evaluation import (
    area_under_f1,
    counts_at,
    mask_rows,
    match_shapes,
    pr_f1_curve,
    quality_map,
    sample_curve,
    write_curve_csv,
)
from .filters import FilterParams, filter_epm
from .watershed import SegmentationResult, segment

SUMMARY_THRESHOLDS = (0.50, 0.80, 0.90, 0.95)


@dataclass(frozen=True)
class CalibrationResult:
    """Best grid point by validation score; ties go to the smallest point."""

    arm: str
    best: object  # FilterParams (watershed) or int threshold (baseline)
    score: float
    grid: tuple  # ((point, score), ...) in evaluation order


def run_watershed_pipeline(epm_path, params: FilterParams, out_prefix,
                           conn=4, order="area-first") -> SegmentationResult:
    """Filter + watershed an EPM file; write labels, line mask and stats."""
    epm = io.read_graymap(epm_path)
    result = segment(epm, params, conn, order)
    io.write_labelmap(result.labels, f"{out_prefix}labels.slab")
    io.write_binary_mask(result.line_mask, f"{out_prefix}lines.pgm")
    with open(f"{out_prefix}stats.txt", "w", encoding="utf-8") as f:
        f.write(f"regions: {result.region_count}\n")
    return result


def run_baseline(epm_path, threshold, out_prefix, conn=4) -> np.ndarray:
    """Threshold an EPM file and label components; write the label map."""
    epm = io.read_graymap(epm_path)
    labels = label_components(threshold_epm(epm, threshold), conn)
    io.write_labelmap(labels, f"{out_prefix}labels.slab")
    return labels


def _score(ms, objective):
    if objective == "auc":
        return area_under_f1(pr_f1_curve(ms))
    if objective.startswith("f1@"):
        t = float(objective[3:])
        if t <= 0.5:
            tp = len(ms.matches)
            fp, fn = ms.pred_count - tp, ms.ref_count - tp
        else:
            tp, fp, fn = counts_at(ms, t)
        return 2 * tp / (2 * tp + fp + fn) if tp else 0.0
    raise ValueError(f"objective must be 'auc' or 'f1@T', got {objective!r}")


def _band_score(gt_band, pred, band, objective):
    pred_band = mask_rows(pred, *band)
    return _score(match_shapes(gt_band, pred_band), objective)


def default_watershed_grid():
    return tuple(
        FilterParams(h, lam)
        for h in range(1, 11)
        for lam in range(50, 501, 50)
    )


def default_baseline_grid():
    return tuple(range(1, 31))


def calibrate(epm, gt_labels, arm, band, grid=None, conn=4,
              order="area-first", objective="auc") -> CalibrationResult:
    """Grid-search segmentation parameters, scoring on a validation row band.

    Each grid point runs on the full image; both label maps are masked to
    the band before matching. Ties resolve to the lexicographically
    smallest parameters.
    """
    epm = io.ensure_gray(epm)
    gt_labels = io.ensure_labels(gt_labels)
    if epm.shape != gt_labels.shape:
        raise ValueError("EPM and ground-truth dimensions differ")
    if arm not in ("watershed", "baseline"):
        raise ValueError(f"arm must be 'watershed' or 'baseline', got {arm!r}")
    if grid is None:
        grid = default_watershed_grid() if arm == "watershed" else default_baseline_grid()
    if not grid:
        raise ValueError("empty calibration grid")
    band = (int(band[0]), int(band[1]))
    gt_band = mask_rows(gt_labels, *band)

    if arm == "watershed":
        points = sorted(grid, key=lambda p: (p.h, p.lambda_area))
    else:
        points = sorted(grid)
    scored = []
    best = None
    best_score = -1.0
    for point in points:
        if arm == "watershed":
            pred = segment(epm, point, conn, order).labels
        else:
            pred = label_components(threshold_epm(epm, point), conn)
        score = _band_score(gt_band, pred, band, objective)
        scored.append((point, score))
        if score > best_score:
            best, best_score = point, score
    return CalibrationResult(arm=arm, best=best, score=best_score, grid=tuple(scored))


def write_calibration_csv(result: CalibrationResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        if result.arm == "watershed":
            f.write("h,lambda,score\n")
            for point, score in result.grid:
                f.write(f"{point.h},{point.lambda_area},{score:.6f}\n")
        else:
            f.write("threshold,score\n")
            for point, score in result.grid:
                f.write(f"{point},{score:.6f}\n")


def summary_rows(ms):
    """(T, precision, recall, f1) rows at the reporting thresholds.

    T = 0.50 stands for the open limit where every match (IoU > 0.5) counts.
    """
    rows = []
    for t in SUMMARY_THRESHOLDS:
        if t <= 0.5:
            tp = len(ms.matches)
            fp, fn = ms.pred_count - tp, ms.ref_count - tp
        else:
            tp, fp, fn = counts_at(ms, t)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
        rows.append((t, precision, recall, f1))
    return rows


def format_summary(rows) -> str:
    lines = [f"{'IoU':>5}  {'Precision':>9}  {'Recall':>9}  {'F-score':>9}"]
    for t, p, r, f1 in rows:
        lines.append(f"{t:>5.2f}  {p:>9.2f}  {r:>9.2f}  {f1:>9.2f}")
    return "\n".join(lines)


def evaluate(ref_labels, pred_labels, band, out_prefix, background=(255, 255, 255)):
    """Mask both maps to the test band, match, and write every report artifact.

    Writes the exact step curve, a 0.01-sampled curve, the summary table
    (CSV), and precision/recall quality maps (PPM). Returns a report dict.
    """
    ref_labels = io.ensure_labels(ref_labels)
    pred_labels = io.ensure_labels(pred_labels)
    if ref_labels.shape != pred_labels.shape:
        raise ValueError("label map dimensions differ")
    band = (int(band[0]), int(band[1]))
    ref_band = mask_rows(ref_labels, *band)
    pred_band = mask_rows(pred_labels, *band)
    ms = match_shapes(ref_band, pred_band)
    curve = pr_f1_curve(ms)
    auc = area_under_f1(curve)

    os.makedirs(os.path.dirname(out_prefix) or ".", exist_ok=True)
    write_curve_csv(curve, f"{out_prefix}curve.csv")
    write_curve_csv(sample_curve(ms), f"{out_prefix}curve_sampled.csv")
    rows = summary_rows(ms)
    with open(f"{out_prefix}summary.csv", "w", encoding="utf-8", newline="\n") as f:
        f.write("iou,precision,recall,f1\n")
        for t, p, r, f1 in rows:
            f.write(f"{t:.2f},{p:.6f},{r:.6f},{f1:.6f}\n")
    io.write_colormap(
        quality_map(pred_band, ref_band, "precision", background),
        f"{out_prefix}precision.ppm",
    )
    io.write_colormap(
        quality_map(ref_band, pred_band, "recall", background),
        f"{out_prefix}recall.ppm",
    )
    return {
        "match_set": ms,
        "auc_f1": auc,
        "summary": rows,
        "ref_shapes": ms.ref_count,
        "pred_shapes": ms.pred_count,
    }
