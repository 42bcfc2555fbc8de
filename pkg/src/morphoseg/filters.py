"""Minima-filtering primitives: geodesic reconstruction, h-minima,
area closing and square dilation.

All intensity arithmetic saturates at [0, 255]. Connectivity is 4 or 8;
the pipeline default is 4 everywhere.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .io import ensure_binary, ensure_gray


@dataclass(frozen=True)
class FilterParams:
    """Joint filtering parameters: dynamic threshold h and area threshold."""

    h: int
    lambda_area: int

    def __post_init__(self):
        if self.h < 0 or self.lambda_area < 0:
            raise ValueError("filter parameters must be non-negative")


def neighbor_offsets(conn):
    """(dy, dx) neighbor offsets in raster-scan order for 4- or 8-connectivity."""
    if conn == 4:
        return ((-1, 0), (0, -1), (0, 1), (1, 0))
    if conn == 8:
        return ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))
    raise ValueError(f"connectivity must be 4 or 8, got {conn!r}")


def reconstruct_by_erosion(marker, mask, conn=4):
    """Morphological reconstruction by erosion of `marker` above `mask`.

    Returns the largest image <= marker that is >= mask and stable under
    geodesic erosion. Uses the sequential two-scan algorithm followed by a
    FIFO propagation phase.
    """
    marker = ensure_gray(marker)
    mask = ensure_gray(mask)
    if marker.shape != mask.shape:
        raise ValueError("marker and mask dimensions differ")
    if np.any(marker < mask):
        raise ValueError("marker must be >= mask at every pixel")
    offsets = neighbor_offsets(conn)
    n_minus = tuple(o for o in offsets if o < (0, 0))
    n_plus = tuple(o for o in offsets if o > (0, 0))

    h, w = marker.shape
    out = marker.ravel().tolist()
    msk = mask.ravel().tolist()

    # forward raster scan
    for y in range(h):
        base = y * w
        for x in range(w):
            i = base + x
            v = out[i]
            for dy, dx in n_minus:
                ny = y + dy
                nx = x + dx
                if 0 <= ny < h and 0 <= nx < w:
                    t = out[ny * w + nx]
                    if t < v:
                        v = t
            m = msk[i]
            out[i] = v if v > m else m

    # backward scan, seeding the propagation queue
    fifo = deque()
    for y in range(h - 1, -1, -1):
        base = y * w
        for x in range(w - 1, -1, -1):
            i = base + x
            v = out[i]
            for dy, dx in n_plus:
                ny = y + dy
                nx = x + dx
                if 0 <= ny < h and 0 <= nx < w:
                    t = out[ny * w + nx]
                    if t < v:
                        v = t
            m = msk[i]
            out[i] = v if v > m else m
            vi = out[i]
            for dy, dx in n_plus:
                ny = y + dy
                nx = x + dx
                if 0 <= ny < h and 0 <= nx < w:
                    j = ny * w + nx
                    if out[j] > vi and out[j] > msk[j]:
                        fifo.append(i)
                        break

    while fifo:
        i = fifo.popleft()
        y, x = divmod(i, w)
        vi = out[i]
        for dy, dx in offsets:
            ny = y + dy
            nx = x + dx
            if 0 <= ny < h and 0 <= nx < w:
                j = ny * w + nx
                if out[j] > vi and msk[j] != out[j]:
                    mj = msk[j]
                    out[j] = vi if vi > mj else mj
                    fifo.append(j)

    return np.array(out, dtype=np.uint8).reshape(h, w)


def h_minima(img, h, conn=4):
    """Suppress all regional minima of dynamic < h.

    Equals reconstruction by erosion of (img + h, saturated at 255) above img.
    """
    img = ensure_gray(img)
    if h < 0:
        raise ValueError("h must be >= 0")
    if h == 0:
        return img.copy()
    marker = np.minimum(img.astype(np.int32) + int(h), 255).astype(np.uint8)
    return reconstruct_by_erosion(marker, img, conn)


def area_closing(img, lambda_area, conn=4):
    """Fill every regional minimum whose threshold component has area < lambda_area.

    Union-find over pixels processed in increasing gray order (stable, so
    raster order within equal intensities). Extensive and idempotent.
    """
    img = ensure_gray(img)
    if lambda_area < 0:
        raise ValueError("lambda_area must be >= 0")
    if lambda_area <= 1:
        return img.copy()
    offsets = neighbor_offsets(conn)
    h, w = img.shape
    n = h * w
    g = img.ravel().tolist()
    order = np.argsort(img.ravel(), kind="stable").tolist()
    parent = [-1] * n  # -1 = not processed yet
    area = [0] * n
    big = n + int(lambda_area)  # sentinel: component criterion satisfied

    for i in order:
        parent[i] = i
        area[i] = 1
        gi = g[i]
        y, x = divmod(i, w)
        for dy, dx in offsets:
            ny = y + dy
            nx = x + dx
            if not (0 <= ny < h and 0 <= nx < w):
                continue
            j = ny * w + nx
            if parent[j] < 0:
                continue
            # find root of j with path compression
            r = j
            while parent[r] != r:
                r = parent[r]
            while parent[j] != r:
                parent[j], j = r, parent[j]
            if r == i:
                continue
            if g[r] == gi or area[r] < lambda_area:
                parent[r] = i
                area[i] += area[r]
            else:
                area[i] = big

    out = [0] * n
    for i in reversed(order):
        p = parent[i]
        out[i] = g[i] if p == i else out[p]
    return np.array(out, dtype=np.uint8).reshape(h, w)


def dilate_square(img, radius):
    """Binary dilation by a (2*radius+1) square (Chebyshev ball), separable."""
    img = ensure_binary(img)
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0:
        return img.copy()
    out = img.copy()
    for axis in (0, 1):
        acc = out.copy()
        for s in range(1, radius + 1):
            shifted = np.zeros_like(out)
            if axis == 0:
                shifted[s:, :] = out[:-s, :]
                np.maximum(acc, shifted, out=acc)
                shifted[:] = 0
                shifted[:-s, :] = out[s:, :]
            else:
                shifted[:, s:] = out[:, :-s]
                np.maximum(acc, shifted, out=acc)
                shifted[:] = 0
                shifted[:, :-s] = out[:, s:]
            np.maximum(acc, shifted, out=acc)
        out = acc
    return out


def filter_epm(epm, params: FilterParams, conn=4, order="area-first"):
    """Joint minima filtering of an edge probability map.

    Default order applies the area closing first so that dynamics are
    measured on cleaned basins; "h-first" swaps the two stages.
    """
    epm = ensure_gray(epm)
    if order == "area-first":
        return h_minima(area_closing(epm, params.lambda_area, conn), params.h, conn)
    if order == "h-first":
        return area_closing(h_minima(epm, params.h, conn), params.lambda_area, conn)
    raise ValueError(f"order must be 'area-first' or 'h-first', got {order!r}")
