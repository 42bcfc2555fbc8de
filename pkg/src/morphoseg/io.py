"""Readers and writers for the rasters exchanged between pipeline stages.

Formats:
  * binary PGM (P5), maxval 255, for gray images and masks;
  * binary PPM (P6), maxval 255, for color renderings;
  * SLAB, a raw little-endian label raster: 4 ASCII bytes ``SLAB``,
    u32 width, u32 height, then width*height u32 labels.

Comments in PGM/PPM headers are accepted on read and never emitted on write.
"""
from __future__ import annotations

import struct

import numpy as np

SLAB_MAGIC = b"SLAB"


class RasterFormatError(Exception):
    """An input file does not match its declared raster format."""


# ---------------------------------------------------------------------------
# value validation

def ensure_gray(img) -> np.ndarray:
    """Validate and return a 2-D uint8 gray image."""
    img = np.asarray(img)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError("gray image must be 2-D with width >= 1 and height >= 1")
    if img.dtype != np.uint8:
        if not np.issubdtype(img.dtype, np.integer):
            raise ValueError("gray intensities must be integers")
        if img.size and (img.min() < 0 or img.max() > 255):
            raise ValueError("gray intensities must lie in [0, 255]")
        img = img.astype(np.uint8)
    return img


def ensure_binary(img) -> np.ndarray:
    """Validate and return a 2-D uint8 image with values in {0, 1}."""
    img = np.asarray(img)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError("binary image must be 2-D with width >= 1 and height >= 1")
    if not np.issubdtype(img.dtype, np.integer) and img.dtype != np.bool_:
        raise ValueError("binary values must be integers")
    if img.size and not np.isin(np.unique(img), (0, 1)).all():
        raise ValueError("binary values must be 0 or 1")
    return img.astype(np.uint8)


def ensure_labels(lm) -> np.ndarray:
    """Validate and return a 2-D int32 label map (label 0 = unassigned)."""
    lm = np.asarray(lm)
    if lm.ndim != 2 or lm.shape[0] < 1 or lm.shape[1] < 1:
        raise ValueError("label map must be 2-D with width >= 1 and height >= 1")
    if not np.issubdtype(lm.dtype, np.integer):
        raise ValueError("labels must be integers")
    if lm.size and lm.min() < 0:
        raise ValueError("labels must be non-negative")
    return lm.astype(np.int32)


def ensure_rgb(img) -> np.ndarray:
    """Validate and return an (H, W, 3) uint8 color image."""
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError("color image must have shape (H, W, 3) with H, W >= 1")
    if img.dtype != np.uint8:
        if not np.issubdtype(img.dtype, np.integer):
            raise ValueError("color values must be integers")
        if img.size and (img.min() < 0 or img.max() > 255):
            raise ValueError("color values must lie in [0, 255]")
        img = img.astype(np.uint8)
    return img


# ---------------------------------------------------------------------------
# netpbm header parsing

def _read_token(f, path) -> bytes:
    tok = b""
    while True:
        c = f.read(1)
        if c == b"":
            if tok:
                return tok
            raise RasterFormatError(f"{path}: malformed header (unexpected end of file)")
        if c == b"#" and not tok:
            while c not in (b"\n", b""):
                c = f.read(1)
            continue
        if c.isspace():
            if tok:
                return tok
            continue
        tok += c


def _read_int(f, path, what) -> int:
    tok = _read_token(f, path)
    try:
        return int(tok)
    except ValueError:
        raise RasterFormatError(
            f"{path}: malformed header ({what} is not an integer: {tok!r})"
        ) from None


def _read_netpbm(path, magic, channels):
    with open(path, "rb") as f:
        got = _read_token(f, path)
        if got != magic:
            raise RasterFormatError(
                f"{path}: malformed header (expected magic {magic.decode()}, got {got!r})"
            )
        w = _read_int(f, path, "width")
        h = _read_int(f, path, "height")
        maxval = _read_int(f, path, "maxval")
        if w < 1 or h < 1:
            raise RasterFormatError(f"{path}: malformed header (size {w}x{h})")
        if maxval != 255:
            raise RasterFormatError(f"{path}: unsupported maxval {maxval}")
        n = w * h * channels
        payload = f.read(n)
        if len(payload) < n:
            raise RasterFormatError(
                f"{path}: truncated payload ({len(payload)} of {n} bytes)"
            )
        data = np.frombuffer(payload, dtype=np.uint8)
        shape = (h, w) if channels == 1 else (h, w, channels)
        return data.reshape(shape).copy()


def read_graymap(path) -> np.ndarray:
    """Read a binary PGM (P5, maxval 255) into a uint8 array."""
    return _read_netpbm(path, b"P5", 1)


def write_graymap(img, path) -> None:
    """Write a gray image as binary PGM (P5, maxval 255)."""
    img = ensure_gray(img)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())


def read_colormap(path) -> np.ndarray:
    """Read a binary PPM (P6, maxval 255) into an (H, W, 3) uint8 array."""
    return _read_netpbm(path, b"P6", 3)


def write_colormap(img, path) -> None:
    """Write a color image as binary PPM (P6, maxval 255)."""
    img = ensure_rgb(img)
    h, w, _ = img.shape
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())


def read_binary_mask(path) -> np.ndarray:
    """Read a mask stored as PGM; any nonzero intensity counts as 1."""
    return (read_graymap(path) > 0).astype(np.uint8)


def write_binary_mask(mask, path) -> None:
    """Write a {0,1} mask as PGM using intensities 0 and 255."""
    mask = ensure_binary(mask)
    write_graymap(mask * np.uint8(255), path)


# ---------------------------------------------------------------------------
# SLAB label rasters

def read_labelmap(path) -> np.ndarray:
    """Read a SLAB label raster into an int32 array."""
    with open(path, "rb") as f:
        header = f.read(12)
        if len(header) < 12 or header[:4] != SLAB_MAGIC:
            raise RasterFormatError(f"{path}: bad magic (expected SLAB)")
        w, h = struct.unpack("<II", header[4:12])
        if w < 1 or h < 1:
            raise RasterFormatError(f"{path}: invalid size {w}x{h}")
        n = w * h * 4
        payload = f.read(n + 1)
        if len(payload) != n:
            raise RasterFormatError(
                f"{path}: size mismatch (expected {n} payload bytes, got {len(payload)})"
            )
        labels = np.frombuffer(payload, dtype="<u4").reshape(h, w)
        return labels.astype(np.int32)


def write_labelmap(lm, path) -> None:
    """Write a label map as a SLAB raster (u32 little-endian payload)."""
    lm = ensure_labels(lm)
    h, w = lm.shape
    with open(path, "wb") as f:
        f.write(SLAB_MAGIC)
        f.write(struct.pack("<II", w, h))
        f.write(lm.astype("<u4").tobytes())
