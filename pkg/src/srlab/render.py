"""Minimal deterministic PNG rendering for sweep results.

Pure-python rasterization: fixed colormaps, nearest-neighbor upscaling and
Bresenham polylines, compressed with zlib at a pinned level so identical
data always yields identical image bytes. These are diagnostic renders of
the CSV data, not publication graphics; there is no text layer.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

_PNG_SIG = b"\x89PNG\r\n\x1a\n"
_ZLIB_LEVEL = 9

# dark-to-bright perceptual ramp, anchors interpolated to a 256-entry table
_SEQ_ANCHORS = np.array([
    (68, 1, 84), (71, 44, 122), (59, 81, 139), (44, 113, 142),
    (33, 144, 141), (39, 173, 129), (92, 200, 99), (170, 220, 50),
    (253, 231, 37),
], dtype=float)

# blue-white-red ramp for signed fields
_DIV_ANCHORS = np.array([
    (33, 62, 156), (80, 120, 200), (170, 195, 230), (245, 245, 245),
    (235, 170, 140), (200, 90, 70), (150, 20, 40),
], dtype=float)

_NAN_RGB = np.array([225, 225, 225], dtype=np.uint8)


def _lut(anchors: np.ndarray) -> np.ndarray:
    pos = np.linspace(0.0, 1.0, len(anchors))
    t = np.linspace(0.0, 1.0, 256)
    chans = [np.interp(t, pos, anchors[:, c]) for c in range(3)]
    return np.stack(chans, axis=1).round().astype(np.uint8)


SEQUENTIAL = _lut(_SEQ_ANCHORS)
DIVERGING = _lut(_DIV_ANCHORS)


def write_png(path: str, rgb: np.ndarray) -> None:
    """Write an (h, w, 3) uint8 array as a truecolor PNG."""
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise ValueError("expected an (h, w, 3) uint8 array")
    h, w = rgb.shape[:2]
    raw = b"".join(b"\x00" + rgb[i].tobytes() for i in range(h))

    def chunk(tag: bytes, payload: bytes) -> bytes:
        crc = zlib.crc32(tag + payload) & 0xFFFFFFFF
        return struct.pack(">I", len(payload)) + tag + payload \
            + struct.pack(">I", crc)

    ihdr = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    data = zlib.compress(raw, _ZLIB_LEVEL)
    with open(path, "wb") as fh:
        fh.write(_PNG_SIG)
        fh.write(chunk(b"IHDR", ihdr))
        fh.write(chunk(b"IDAT", data))
        fh.write(chunk(b"IEND", b""))


def _colorize(grid: np.ndarray, lut: np.ndarray, vmin: float,
              vmax: float) -> np.ndarray:
    span = vmax - vmin
    if span <= 0:
        span = 1.0
    norm = (grid - vmin) / span
    idx = np.clip(np.nan_to_num(norm, nan=0.0) * 255.0, 0.0, 255.0)
    rgb = lut[idx.astype(np.uint8)]
    rgb[np.isnan(grid)] = _NAN_RGB
    return rgb


def heatmap(path: str, grid: np.ndarray, lut: np.ndarray = SEQUENTIAL,
            vmin: float | None = None, vmax: float | None = None,
            min_pixels: int = 320) -> None:
    """Render a 2d array, row 0 at the bottom edge, NaN cells light gray."""
    grid = np.asarray(grid, dtype=float)
    finite = grid[np.isfinite(grid)]
    if vmin is None:
        vmin = float(finite.min()) if finite.size else 0.0
    if vmax is None:
        vmax = float(finite.max()) if finite.size else 1.0
    rgb = _colorize(grid[::-1, :], lut, vmin, vmax)
    cell = max(1, -(-min_pixels // max(grid.shape)))
    rgb = np.repeat(np.repeat(rgb, cell, axis=0), cell, axis=1)
    write_png(path, np.ascontiguousarray(rgb))


def diverging_heatmap(path: str, grid: np.ndarray,
                      min_pixels: int = 320) -> None:
    """Symmetric diverging render centered on zero."""
    grid = np.asarray(grid, dtype=float)
    finite = grid[np.isfinite(grid)]
    bound = float(np.abs(finite).max()) if finite.size else 1.0
    if bound == 0.0:
        bound = 1.0
    heatmap(path, grid, lut=DIVERGING, vmin=-bound, vmax=bound,
            min_pixels=min_pixels)


_CURVE_COLORS = (
    (31, 119, 180), (214, 39, 40), (44, 160, 44), (148, 103, 189),
    (255, 127, 14), (23, 190, 207),
)


def _draw_line(img: np.ndarray, x0: int, y0: int, x1: int, y1: int,
               color) -> None:
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    h, w = img.shape[:2]
    while True:
        if 0 <= y0 < h and 0 <= x0 < w:
            img[y0, x0] = color
        if x0 == x1 and y0 == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def curves(path: str, xs: np.ndarray, series: list,
           size=(640, 480), margin: int = 40) -> None:
    """Polyline plot of one or more series against a shared x axis.

    NaN samples break the line. Series are drawn in a fixed color cycle;
    the frame marks the data bounding box.
    """
    w, h = size
    img = np.full((h, w, 3), 255, dtype=np.uint8)
    xs = np.asarray(xs, dtype=float)
    ys_all = np.concatenate([np.asarray(s, dtype=float) for s in series])
    fin = ys_all[np.isfinite(ys_all)]
    ymin = float(fin.min()) if fin.size else 0.0
    ymax = float(fin.max()) if fin.size else 1.0
    if ymax == ymin:
        ymax = ymin + 1.0
    xmin, xmax = float(xs.min()), float(xs.max())
    if xmax == xmin:
        xmax = xmin + 1.0

    def to_px(xv, yv):
        px = margin + (xv - xmin) / (xmax - xmin) * (w - 2 * margin)
        py = h - margin - (yv - ymin) / (ymax - ymin) * (h - 2 * margin)
        return int(round(px)), int(round(py))

    frame = (120, 120, 120)
    x0, y0 = to_px(xmin, ymin)
    x1, y1 = to_px(xmax, ymax)
    _draw_line(img, x0, y0, x1, y0, frame)
    _draw_line(img, x0, y0, x0, y1, frame)
    _draw_line(img, x0, y1, x1, y1, frame)
    _draw_line(img, x1, y0, x1, y1, frame)
    for k, s in enumerate(series):
        s = np.asarray(s, dtype=float)
        color = _CURVE_COLORS[k % len(_CURVE_COLORS)]
        prev = None
        for xv, yv in zip(xs, s):
            if not np.isfinite(yv):
                prev = None
                continue
            pt = to_px(xv, yv)
            if prev is not None:
                _draw_line(img, prev[0], prev[1], pt[0], pt[1], color)
            prev = pt
    write_png(path, img)
