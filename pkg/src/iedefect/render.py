"""Deterministic raster and data exports of grids and masks.

Grayscale rasters are written as binary PGM (P5) and colour rasters as
binary PPM (P6), both with maxval 255.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .adaptive import FrequencyHistogram
from .detect import BinaryMask
from .errors import DataError
from .mapping import FrequencyGrid

PathLike = Union[str, Path]


@dataclass(frozen=True)
class ColorMap:
    name: str
    anchors: tuple[tuple[float, tuple[int, int, int]], ...]

    def __post_init__(self):
        pos = [p for p, _ in self.anchors]
        if len(pos) < 2 or pos[0] != 0.0 or pos[-1] != 1.0 or any(b <= a for a, b in zip(pos, pos[1:])):
            raise DataError("colormap anchor positions must increase strictly from 0 to 1")
        if any(not 0 <= ch <= 255 for _, rgb in self.anchors for ch in rgb):
            raise DataError("colormap channels must lie in [0, 255]")

    @property
    def lookup(self) -> np.ndarray:
        """256 x 3 uint8 table, linear between anchors, rounded half-up."""
        pos = np.array([p for p, _ in self.anchors])
        rgb = np.array([c for _, c in self.anchors], dtype=np.float64)
        t = np.arange(256) / 255.0
        table = np.stack([np.interp(t, pos, rgb[:, ch]) for ch in range(3)], axis=1)
        return np.floor(table + 0.5).astype(np.uint8)


# warm (low frequency, defect-prone) to cool (high frequency, intact)
WARM_TO_COOL = ColorMap(
    "warm_to_cool",
    (
        (0.0, (215, 25, 28)),
        (0.25, (253, 141, 60)),
        (0.5, (255, 237, 111)),
        (0.75, (102, 189, 99)),
        (1.0, (43, 100, 186)),
    ),
)
COLORMAPS = {WARM_TO_COOL.name: WARM_TO_COOL}


def _check_upscale(upscale: int) -> None:
    if int(upscale) != upscale or upscale < 1:
        raise DataError(f"upscale must be a positive integer, got {upscale}")


def block(values: np.ndarray, upscale: int) -> np.ndarray:
    """Replicate every cell into an upscale x upscale block."""
    _check_upscale(upscale)
    return np.repeat(np.repeat(np.asarray(values), upscale, axis=0), upscale, axis=1)


def _bilinear(values: np.ndarray, upscale: int) -> np.ndarray:
    # sample the cell-centre lattice at output pixel centres, clamped at the border
    rows, cols = values.shape

    def coords(n):
        return np.clip((np.arange(n * upscale) + 0.5) / upscale - 0.5, 0, n - 1)

    ry, rx = coords(rows), coords(cols)
    tmp = np.stack([np.interp(rx, np.arange(cols), row) for row in values])
    return np.stack([np.interp(ry, np.arange(rows), tmp[:, j]) for j in range(tmp.shape[1])], axis=1)


def heatmap(grid: FrequencyGrid, cmap: ColorMap = WARM_TO_COOL, upscale: int = 1,
            smooth: bool = False) -> np.ndarray:
    """RGB raster (H, W, 3) with grid min mapped to anchor 0 and max to anchor 1.

    A constant grid renders uniformly in the colour at position 0.5.
    """
    _check_upscale(upscale)
    v = grid.values
    lo, hi = float(v.min()), float(v.max())
    field_ = _bilinear(v, upscale) if smooth else block(v, upscale)
    if hi == lo:
        t = np.full(field_.shape, 0.5)
    else:
        t = (field_ - lo) / (hi - lo)
    idx = np.floor(np.clip(t, 0.0, 1.0) * 255 + 0.5).astype(np.intp)
    return cmap.lookup[idx]


def mask_raster(mask: BinaryMask, upscale: int = 1) -> np.ndarray:
    """Grayscale raster: defect black (0), non-defect white (255)."""
    return (block(mask.values, upscale) * 255).astype(np.uint8)


def overlay(gtm_raster: np.ndarray, dm_raster: np.ndarray, alpha: float = 0.5) -> np.ndarray:
    """alpha * dm + (1 - alpha) * gtm per channel, rounded half-up, as RGB."""
    if not 0.0 <= alpha <= 1.0:
        raise DataError(f"alpha must lie in [0, 1], got {alpha}")
    g = np.asarray(gtm_raster, dtype=np.float64)
    d = np.asarray(dm_raster, dtype=np.float64)
    if g.shape[:2] != d.shape[:2]:
        raise DataError(f"overlay dimension mismatch: {g.shape[:2]} vs {d.shape[:2]}")
    if g.ndim == 2:
        g = np.repeat(g[:, :, None], 3, axis=2)
    if d.ndim == 2:
        d = np.repeat(d[:, :, None], 3, axis=2)
    return np.floor(alpha * d + (1.0 - alpha) * g + 0.5).astype(np.uint8)


def encode_pnm(raster: np.ndarray) -> bytes:
    r = np.asarray(raster)
    if r.dtype != np.uint8:
        raise DataError("rasters must be uint8")
    if r.ndim == 2:
        magic = b"P5"
    elif r.ndim == 3 and r.shape[2] == 3:
        magic = b"P6"
    else:
        raise DataError(f"unsupported raster shape {r.shape}")
    h, w = r.shape[:2]
    return magic + f"\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(r).tobytes()


def decode_pnm(data: bytes) -> np.ndarray:
    """Parse a binary PGM/PPM with maxval 255 (header comments not supported)."""
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DataError("truncated PGM/PPM header")
        tokens.append(data[start:pos])
    magic, w, h, maxval = tokens
    if magic not in (b"P5", b"P6") or maxval != b"255":
        raise DataError("not a maxval-255 binary PGM/PPM")
    w, h = int(w), int(h)
    shape = (h, w) if magic == b"P5" else (h, w, 3)
    body = data[pos + 1:]
    if len(body) != int(np.prod(shape)):
        raise DataError("PGM/PPM pixel data length does not match header")
    return np.frombuffer(body, dtype=np.uint8).reshape(shape).copy()


def write_pnm(raster: np.ndarray, path: PathLike) -> None:
    Path(path).write_bytes(encode_pnm(raster))


def read_pnm(path: PathLike) -> np.ndarray:
    return decode_pnm(Path(path).read_bytes())


def _exact_text(v: float) -> str:
    s = repr(v)
    return s[:-2] if s.endswith(".0") else s


def surface_csv(grid: FrequencyGrid) -> str:
    """x,y,f triples (x = column, y = row), row-major, round-trip float text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in range(grid.shape.rows):
        for c in range(grid.shape.cols):
            w.writerow([c, r, _exact_text(float(grid.values[r, c]))])
    return buf.getvalue()


def parse_surface_csv(text: str) -> FrequencyGrid:
    triples = [(int(x), int(y), float(f)) for x, y, f in csv.reader(io.StringIO(text))]
    cols = max(t[0] for t in triples) + 1
    rows = max(t[1] for t in triples) + 1
    v = np.full((rows, cols), np.nan)
    for x, y, f in triples:
        v[y, x] = f
    return FrequencyGrid.from_array(v)


def histogram_csv(h: FrequencyHistogram, fmt=lambda v: f"{v:.6g}") -> str:
    """bin_left,bin_right,count,density rows, gnuplot-friendly."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_left", "bin_right", "count", "density"])
    edges, dens = h.edges, h.densities
    for b in range(h.k):
        w.writerow([fmt(float(edges[b])), fmt(float(edges[b + 1])), int(h.counts[b]), fmt(float(dens[b]))])
    return buf.getvalue()

