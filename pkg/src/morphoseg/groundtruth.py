"""Reference data construction: polyline rasterization, edge/label ground
truth, dataset row splits and tiling.

Polyline annotations live in a plain-text format: one polyline per line,
vertices as `x,y` pairs separated by spaces, `#` starts a comment line.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .baseline import label_components
from .filters import dilate_square
from .io import ensure_binary


@dataclass(frozen=True)
class PolylineSet:
    """Ordered integer vertex lists plus the raster extent they live in."""

    polylines: tuple
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("raster extent must be at least 1x1")
        for line in self.polylines:
            if len(line) < 2:
                raise ValueError("every polyline needs at least 2 vertices")
            for x, y in line:
                if not (0 <= x < self.width and 0 <= y < self.height):
                    raise ValueError(f"vertex ({x}, {y}) outside raster extent")


def bresenham_segment(a, b):
    """8-connected integer segment between two vertices.

    Endpoints are ordered lexicographically first, so the pixel set does
    not depend on drawing direction.
    """
    if tuple(b) < tuple(a):
        a, b = b, a
    x0, y0 = a
    x1, y1 = b
    dx = abs(x1 - x0)
    dy = abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx - dy
    pts = []
    while True:
        pts.append((x0, y0))
        if x0 == x1 and y0 == y1:
            return pts
        e2 = 2 * err
        if e2 > -dy:
            err -= dy
            x0 += sx
        if e2 < dx:
            err += dx
            y0 += sy


def rasterize_polylines(ps: PolylineSet) -> np.ndarray:
    """Draw every polyline segment; returns a {0,1} stroke mask."""
    out = np.zeros((ps.height, ps.width), dtype=np.uint8)
    for line in ps.polylines:
        for a, b in zip(line, line[1:]):
            for x, y in bresenham_segment(a, b):
                out[y, x] = 1
    return out


def make_edge_gt(ps: PolylineSet) -> np.ndarray:
    """Rasterize strokes and dilate by 1 so straight edges are 3 pixels thick."""
    return dilate_square(rasterize_polylines(ps), radius=1)


def make_label_gt(edges, conn=4) -> np.ndarray:
    """Label the shapes enclosed by an edge map: components of the complement."""
    edges = ensure_binary(edges)
    return label_components(1 - edges, conn)


@dataclass(frozen=True)
class SplitSpec:
    """Row bands of the dataset split, plus the tiling grid size."""

    train: tuple = (0, 4000)
    val: tuple = (4000, 5000)
    test: tuple = (5000, 6500)
    tile_size: int = 500

    def __post_init__(self):
        bands = (self.train, self.val, self.test)
        for start, end in bands:
            if not 0 <= start < end:
                raise ValueError("row bands must satisfy 0 <= start < end")
        for (_, e0), (s1, _) in zip(bands, bands[1:]):
            if s1 < e0:
                raise ValueError("row bands must be disjoint and ordered")
        if self.tile_size < 1:
            raise ValueError("tile size must be >= 1")

    def bands(self):
        return {"train": self.train, "val": self.val, "test": self.test}


@dataclass(frozen=True)
class SplitResult:
    bands: dict
    tiles: dict = field(default_factory=dict)

    def tile_count(self, band=None) -> int:
        if band is not None:
            return len(self.tiles[band])
        return sum(len(v) for v in self.tiles.values())


def split_rows(width, height, spec: SplitSpec = SplitSpec()) -> SplitResult:
    """Row bands plus the tile origins covering each band.

    Tiles are tile_size x tile_size, anchored at the band's top row; partial
    tiles at the right/bottom edge are kept.
    """
    if width < 1 or height < 1:
        raise ValueError("image extent must be at least 1x1")
    for name, (start, end) in spec.bands().items():
        if end > height:
            raise ValueError(f"{name} band [{start}, {end}) exceeds image height {height}")
    tiles = {}
    t = spec.tile_size
    for name, (start, end) in spec.bands().items():
        origins = []
        for row in range(start, end, t):
            for col in range(0, width, t):
                origins.append((row, col))
        tiles[name] = origins
    return SplitResult(bands=spec.bands(), tiles=tiles)


def tile_name(row, col) -> str:
    """Export naming convention, zero-padded 5-digit pixel origins."""
    return f"tile_r{row:05d}_c{col:05d}.pgm"


def load_polylines(path, width, height) -> PolylineSet:
    """Parse the plain-text polyline annotation format."""
    polylines = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            verts = []
            for token in line.split():
                try:
                    xs, ys = token.split(",")
                    verts.append((int(xs), int(ys)))
                except ValueError:
                    raise ValueError(
                        f"{path}:{lineno}: bad vertex {token!r} (expected x,y)"
                    ) from None
            polylines.append(tuple(verts))
    return PolylineSet(polylines=tuple(polylines), width=width, height=height)


def save_polylines(ps: PolylineSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in ps.polylines:
            f.write(" ".join(f"{x},{y}" for x, y in line) + "\n")
