"""morphoseg: closed-shape segmentation of edge probability maps via
morphological filtering + watershed, with instance-level evaluation."""

from .baseline import label_components, threshold_epm
from .evaluation import (
    CurvePoint,
    Match,
    MatchSet,
    area_under_f1,
    class_balance_weights,
    counts_at,
    mask_rows,
    match_shapes,
    pr_f1_curve,
    quality_map,
    sample_curve,
)
from .filters import (
    FilterParams,
    area_closing,
    dilate_square,
    filter_epm,
    h_minima,
    reconstruct_by_erosion,
)
from .groundtruth import (
    PolylineSet,
    SplitSpec,
    make_edge_gt,
    make_label_gt,
    rasterize_polylines,
    split_rows,
)
from .io import (
    RasterFormatError,
    read_graymap,
    read_labelmap,
    write_colormap,
    write_graymap,
    write_labelmap,
)
from .pipeline import CalibrationResult, calibrate, evaluate
from .watershed import SegmentationResult, regional_minima, segment, watershed_meyer

__version__ = "0.1.0"

__all__ = [
    "CalibrationResult",
    "CurvePoint",
    "FilterParams",
    "Match",
    "MatchSet",
    "PolylineSet",
    "RasterFormatError",
    "SegmentationResult",
    "SplitSpec",
    "area_closing",
    "area_under_f1",
    "calibrate",
    "class_balance_weights",
    "counts_at",
    "dilate_square",
    "evaluate",
    "filter_epm",
    "h_minima",
    "label_components",
    "make_edge_gt",
    "make_label_gt",
    "mask_rows",
    "match_shapes",
    "pr_f1_curve",
    "quality_map",
    "rasterize_polylines",
    "read_graymap",
    "read_labelmap",
    "reconstruct_by_erosion",
    "regional_minima",
    "sample_curve",
    "segment",
    "split_rows",
    "threshold_epm",
    "watershed_meyer",
    "write_colormap",
    "write_graymap",
    "write_labelmap",
]
