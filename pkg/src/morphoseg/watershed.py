"""Seeded watershed with watershed lines (Meyer-style priority flooding).

Regions are grown from regional minima in non-decreasing intensity order.
Ties within an intensity level are FIFO; the initial queue is filled in
raster-scan order, so results are fully deterministic. Pixels reached by
two differently-labeled fronts become line pixels (label 0); the resulting
lines form closed boundaries around regions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filters import FilterParams, filter_epm, neighbor_offsets
from .io import ensure_gray, ensure_labels


@dataclass(frozen=True)
class SegmentationResult:
    """Label map (0 = watershed line), number of regions, and line mask."""

    labels: np.ndarray
    region_count: int
    line_mask: np.ndarray


def regional_minima(img, conn=4) -> np.ndarray:
    """Label the regional minima of an image.

    A regional minimum is a connected flat zone with no strictly lower
    neighbor. Minima get labels 1..K in raster-scan first-encounter order;
    all other pixels get 0.
    """
    img = ensure_gray(img)
    offsets = neighbor_offsets(conn)
    h, w = img.shape
    n = h * w
    g = img.ravel().tolist()
    labels = [-1] * n
    next_label = 1
    stack = []
    for start in range(n):
        if labels[start] >= 0:
            continue
        v = g[start]
        zone = [start]
        labels[start] = 0
        stack.append(start)
        is_min = True
        while stack:
            i = stack.pop()
            y, x = divmod(i, w)
            for dy, dx in offsets:
                ny = y + dy
                nx = x + dx
                if not (0 <= ny < h and 0 <= nx < w):
                    continue
                j = ny * w + nx
                gj = g[j]
                if gj < v:
                    is_min = False
                elif gj == v and labels[j] < 0:
                    labels[j] = 0
                    zone.append(j)
                    stack.append(j)
        if is_min:
            for i in zone:
                labels[i] = next_label
            next_label += 1
    return np.array(labels, dtype=np.int32).reshape(h, w)


def _densify(labels: np.ndarray):
    """Renumber nonzero labels to 1..K preserving numeric order."""
    present = np.unique(labels)
    present = present[present > 0]
    k = len(present)
    if k and present[-1] == k:
        return labels, k
    lut = np.zeros(int(present[-1]) + 1 if k else 1, dtype=np.int32)
    lut[present] = np.arange(1, k + 1, dtype=np.int32)
    return lut[labels], k


def watershed_meyer(img, seeds, conn=4) -> SegmentationResult:
    """Flood `img` from the labeled `seeds`, producing regions and lines.

    Flooding uses a 256-bucket FIFO queue keyed by intensity. A pixel is
    queued at most once; on dequeue it takes the unique label among its
    already-decided region neighbors, or becomes a line pixel when several
    distinct labels compete. Pixels never reached by any region front
    (enclosed by lines on all sides) are also marked as line pixels.
    """
    img = ensure_gray(img)
    seeds = ensure_labels(seeds)
    if img.shape != seeds.shape:
        raise ValueError("image and seeds dimensions differ")
    if not np.any(seeds > 0):
        raise ValueError("no seeds")
    offsets = neighbor_offsets(conn)
    h, w = img.shape
    n = h * w
    g = img.ravel().tolist()
    labels = seeds.ravel().tolist()
    FAR, QUEUED, DECIDED = 0, 1, 2
    state = [DECIDED if l > 0 else FAR for l in labels]

    flat_offsets = []
    for dy, dx in offsets:
        flat_offsets.append((dy, dx, dy * w + dx))

    buckets = [[] for _ in range(256)]  # list-of-lists with read cursors
    heads = [0] * 256

    # initial front: unlabeled pixels 4/8-adjacent to a seed, raster order
    for i in range(n):
        if state[i] != FAR:
            continue
        y, x = divmod(i, w)
        for dy, dx, d in flat_offsets:
            ny = y + dy
            nx = x + dx
            if 0 <= ny < h and 0 <= nx < w and labels[i + d] > 0:
                buckets[g[i]].append(i)
                state[i] = QUEUED
                break

    cur = 0
    while True:
        while cur < 256 and heads[cur] >= len(buckets[cur]):
            cur += 1
        if cur == 256:
            break
        b = buckets[cur]
        i = b[heads[cur]]
        heads[cur] += 1
        y, x = divmod(i, w)
        lab = 0
        multi = False
        for dy, dx, d in flat_offsets:
            ny = y + dy
            nx = x + dx
            if 0 <= ny < h and 0 <= nx < w:
                j = i + d
                lj = labels[j]
                if lj > 0 and state[j] == DECIDED:
                    if lab == 0:
                        lab = lj
                    elif lj != lab:
                        multi = True
                        break
        state[i] = DECIDED
        if multi or lab == 0:
            labels[i] = 0  # line pixel (lab == 0 cannot occur; kept defensive)
        else:
            labels[i] = lab
            for dy, dx, d in flat_offsets:
                ny = y + dy
                nx = x + dx
                if 0 <= ny < h and 0 <= nx < w:
                    j = i + d
                    if state[j] == FAR:
                        p = g[j]
                        buckets[p].append(j)
                        state[j] = QUEUED
                        if p < cur:
                            cur = p

    # pixels enclosed by lines on every side are lines themselves
    for i in range(n):
        if state[i] != DECIDED:
            labels[i] = 0

    lab_arr = np.array(labels, dtype=np.int32).reshape(h, w)
    lab_arr, count = _densify(lab_arr)
    line_mask = (lab_arr == 0).astype(np.uint8)
    return SegmentationResult(labels=lab_arr, region_count=count, line_mask=line_mask)


def segment(epm, params: FilterParams, conn=4, order="area-first") -> SegmentationResult:
    """Filter an EPM by area and dynamic, then watershed from its minima."""
    filtered = filter_epm(epm, params, conn, order)
    seeds = regional_minima(filtered, conn)
    return watershed_meyer(filtered, seeds, conn)
