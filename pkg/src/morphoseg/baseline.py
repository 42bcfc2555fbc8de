"""No-watershed baseline: threshold the EPM and label connected components."""
from __future__ import annotations

import numpy as np

from .filters import neighbor_offsets
from .io import ensure_binary, ensure_gray


def threshold_epm(epm, t) -> np.ndarray:
    """Mark shape pixels: 1 where epm < t (low edge response = interior)."""
    epm = ensure_gray(epm)
    if not 0 <= t <= 255:
        raise ValueError(f"threshold must be in [0, 255], got {t}")
    return (epm < t).astype(np.uint8)


def label_components(mask, conn=4) -> np.ndarray:
    """Label maximal connected components of 1-pixels.

    Labels are dense 1..K, assigned in raster-scan first-encounter order;
    0-pixels keep label 0.
    """
    mask = ensure_binary(mask)
    offsets = neighbor_offsets(conn)
    h, w = mask.shape
    n = h * w
    m = mask.ravel().tolist()
    labels = [0] * n
    next_label = 0
    stack = []
    for start in range(n):
        if m[start] == 0 or labels[start] != 0:
            continue
        next_label += 1
        labels[start] = next_label
        stack.append(start)
        while stack:
            i = stack.pop()
            y, x = divmod(i, w)
            for dy, dx in offsets:
                ny = y + dy
                nx = x + dx
                if 0 <= ny < h and 0 <= nx < w:
                    j = ny * w + nx
                    if m[j] and labels[j] == 0:
                        labels[j] = next_label
                        stack.append(j)
    return np.array(labels, dtype=np.int32).reshape(h, w)
