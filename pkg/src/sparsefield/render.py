"""Grayscale heatmaps as binary PGM (P5, maxval 255)."""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import ArgumentError


def heatmap_pixels(values, height: int, width: int, mask=None, sensors=None) -> np.ndarray:
    """Map a field to 0..255 by min-max over valid cells, rounding half up.

    A constant field renders as 128. Masked cells are 0; sensor cells, if
    given, are forced to 255.
    """
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if values.size != height * width:
        raise ArgumentError(f"{values.size} values do not fill a {height}x{width} grid")
    valid = np.ones(values.size, dtype=bool) if mask is None else np.asarray(mask, dtype=bool).reshape(-1)
    pix = np.zeros(values.size, dtype=np.uint8)
    if valid.any():
        lo, hi = values[valid].min(), values[valid].max()
        if hi == lo:
            pix[valid] = 128
        else:
            scaled = np.floor(255.0 * (values[valid] - lo) / (hi - lo) + 0.5)
            pix[valid] = np.clip(scaled, 0, 255).astype(np.uint8)
    if sensors is not None:
        pix[np.asarray(sensors, dtype=np.intp)] = 255
    return pix.reshape(height, width)


def pgm_bytes(pixels: np.ndarray) -> bytes:
    h, w = pixels.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(pixels, dtype=np.uint8).tobytes()


def write_pgm(path, pixels: np.ndarray) -> None:
    Path(path).write_bytes(pgm_bytes(pixels))


_PGM_HEADER = re.compile(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s")


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    # exactly one whitespace byte follows maxval; pixel bytes may look like whitespace
    head = _PGM_HEADER.match(data)
    if head is None or int(head.group(3)) != 255:
        raise ArgumentError(f"{path}: not a binary 8-bit PGM")
    w, h = int(head.group(1)), int(head.group(2))
    if len(data) - head.end() < w * h:
        raise ArgumentError(f"{path}: truncated PGM, expected {w * h} pixel bytes")
    return np.frombuffer(data, dtype=np.uint8, count=w * h, offset=head.end()).reshape(h, w)
