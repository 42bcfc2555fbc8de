"""Instance-level shape-detection scoring.

Matches shapes between two disjoint partitions by strict IoU > 0.5 (which
makes the matching unique), derives precision/recall/F1 step curves over
the IoU threshold, the area under the F1 curve on (0.5, 1], and red-to-green
quality maps. Also hosts the class-balance weight helper for weighted
binary cross-entropy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .io import ensure_labels, ensure_rgb


@dataclass(frozen=True)
class Match:
    ref_label: int
    pred_label: int
    iou: float

    def __post_init__(self):
        if not 0.5 < self.iou <= 1.0:
            raise ValueError("match IoU must lie in (0.5, 1]")


@dataclass(frozen=True)
class MatchSet:
    matches: tuple
    ref_count: int
    pred_count: int

    def __post_init__(self):
        if len(self.matches) > min(self.ref_count, self.pred_count):
            raise ValueError("more matches than shapes on one side")


@dataclass(frozen=True)
class CurvePoint:
    """One step of the P/R/F1 curves; threshold 0.5 stands for the 0.5+ limit."""

    threshold: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


def _ratio(num, den) -> float:
    return num / den if den else 0.0


def _distinct_nonzero(lm) -> int:
    u = np.unique(lm)
    return int((u > 0).sum())


def _pair_intersections(a, b):
    """Pixel-count histogram of co-occurring (label_a, label_b) nonzero pairs."""
    both = (a > 0) & (b > 0)
    if not both.any():
        return np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.int64)
    av = a[both].astype(np.int64)
    bv = b[both].astype(np.int64)
    stride = int(bv.max()) + 1
    keys, counts = np.unique(av * stride + bv, return_counts=True)
    return keys // stride, keys % stride, counts


def match_shapes(ref, pred) -> MatchSet:
    """Match shapes between two label maps by strict IoU > 0.5.

    Disjointness of shapes within each map guarantees each ref and each
    pred label appears in at most one match. Label 0 is excluded.
    """
    ref = ensure_labels(ref)
    pred = ensure_labels(pred)
    if ref.shape != pred.shape:
        raise ValueError("label map dimensions differ")
    ref_areas = np.bincount(ref.ravel())
    pred_areas = np.bincount(pred.ravel())
    ra, pa, inter = _pair_intersections(ref, pred)
    matches = []
    for r, p, i in zip(ra, pa, inter):
        union = ref_areas[r] + pred_areas[p] - i
        iou = i / union
        if iou > 0.5:
            matches.append(Match(int(r), int(p), float(iou)))
    matches.sort(key=lambda m: m.ref_label)
    return MatchSet(
        matches=tuple(matches),
        ref_count=_distinct_nonzero(ref),
        pred_count=_distinct_nonzero(pred),
    )


def _counts(ms: MatchSet, tp: int):
    return tp, ms.pred_count - tp, ms.ref_count - tp


def counts_at(ms: MatchSet, threshold):
    """(TP, FP, FN) at an IoU threshold T in (0.5, 1]; TP counts IoU >= T."""
    if not 0.5 < threshold <= 1.0:
        raise ValueError(f"threshold must lie in (0.5, 1], got {threshold}")
    tp = sum(1 for m in ms.matches if m.iou >= threshold)
    tp, fp, fn = _counts(ms, tp)
    return tp, fp, fn


def _point(threshold, tp, fp, fn) -> CurvePoint:
    return CurvePoint(
        threshold=float(threshold),
        precision=_ratio(tp, tp + fp),
        recall=_ratio(tp, tp + fn),
        f1=_ratio(2 * tp, 2 * tp + fp + fn),
        tp=tp,
        fp=fp,
        fn=fn,
    )


def pr_f1_curve(ms: MatchSet):
    """Exact step curve: one point per distinct match IoU plus both endpoints.

    The first point (threshold 0.5) is the open limit T -> 0.5+ where every
    match counts; the last point is T = 1.
    """
    ious = sorted({m.iou for m in ms.matches})
    points = [_point(0.5, *_counts(ms, len(ms.matches)))]
    for v in ious:
        points.append(_point(v, *counts_at(ms, v)))
    if not ious or ious[-1] < 1.0:
        points.append(_point(1.0, *counts_at(ms, 1.0)))
    return points


def area_under_f1(curve) -> float:
    """Exact integral of the F1 step function over T in (0.5, 1]; in [0, 0.5]."""
    if not curve:
        return 0.0
    area = 0.0
    for prev, point in zip(curve, curve[1:]):
        area += (point.threshold - prev.threshold) * point.f1
    return area


def sample_curve(ms: MatchSet, step=0.01):
    """Evenly sampled curve for plotting; T = 0.5 carries the 0.5+ limit."""
    points = [_point(0.5, *_counts(ms, len(ms.matches)))]
    t = 0.5 + step
    while t < 1.0 + 1e-12:
        points.append(_point(min(t, 1.0), *counts_at(ms, min(t, 1.0))))
        t += step
    return points


def write_curve_csv(curve, path) -> None:
    """CSV export: threshold,precision,recall,f1,tp,fp,fn with 6 decimals."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("threshold,precision,recall,f1,tp,fp,fn\n")
        for p in curve:
            f.write(
                f"{p.threshold:.6f},{p.precision:.6f},{p.recall:.6f},"
                f"{p.f1:.6f},{p.tp},{p.fp},{p.fn}\n"
            )


# ---------------------------------------------------------------------------
# quality maps

WHITE = (255, 255, 255)
BLACK = (0, 0, 0)


def iou_color(b):
    """Red-yellow-green ramp: red at 0, yellow at 0.5, green at 1."""
    if not 0.0 <= b <= 1.0:
        raise ValueError("IoU must lie in [0, 1]")
    if b <= 0.5:
        return (255, int(510.0 * b + 0.5), 0)
    return (int(510.0 * (1.0 - b) + 0.5), 255, 0)


def quality_map(subject, other, mode, background=WHITE) -> np.ndarray:
    """Paint each subject shape with its best IoU against the other map.

    mode "precision": subject is the prediction map; mode "recall": subject
    is the reference map. Label-0 pixels take the background color.
    """
    if mode not in ("precision", "recall"):
        raise ValueError(f"mode must be 'precision' or 'recall', got {mode!r}")
    subject = ensure_labels(subject)
    other = ensure_labels(other)
    if subject.shape != other.shape:
        raise ValueError("label map dimensions differ")
    subj_areas = np.bincount(subject.ravel())
    other_areas = np.bincount(other.ravel())
    sa, oa, inter = _pair_intersections(subject, other)
    best = np.zeros(len(subj_areas), dtype=np.float64)
    for s, o, i in zip(sa, oa, inter):
        iou = i / (subj_areas[s] + other_areas[o] - i)
        if iou > best[s]:
            best[s] = iou
    lut = np.empty((len(subj_areas), 3), dtype=np.uint8)
    lut[0] = background
    for lab in range(1, len(subj_areas)):
        lut[lab] = iou_color(float(best[lab])) if subj_areas[lab] else 0
    return ensure_rgb(lut[subject])


def mask_rows(lm, row_start, row_end) -> np.ndarray:
    """Keep rows [row_start, row_end); zero the rest and re-densify labels."""
    lm = ensure_labels(lm)
    height = lm.shape[0]
    if not 0 <= row_start < row_end <= height:
        raise ValueError(f"invalid row range [{row_start}, {row_end}) for height {height}")
    out = lm.copy()
    out[:row_start] = 0
    out[row_end:] = 0
    present = np.unique(out)
    present = present[present > 0]
    lut = np.zeros(int(present[-1]) + 1 if len(present) else 1, dtype=np.int32)
    lut[present] = np.arange(1, len(present) + 1, dtype=np.int32)
    return lut[out]


def class_balance_weights(edge_count, non_edge_count, lambda_bce=1.1):
    """Weights (alpha, beta) rebalancing edge vs non-edge pixels in a BCE loss."""
    total = edge_count + non_edge_count
    if total <= 0:
        raise ValueError("edge_count + non_edge_count must be > 0")
    alpha = lambda_bce * non_edge_count / total
    beta = edge_count / total
    return alpha, beta
