"""Ground-truth masks from rectangular defect specifications.

Defect spec JSON::

    {"slab_id": "S1", "slab_size_m": [w, h], "raster_px": [W, H],
     "defects": [{"x_m": 0.5, "y_m": 0.25, "w_m": 1.0, "h_m": 0.5, "label": "void"}]}

Coordinates are in metres from the top-left corner with y pointing down.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .detect import DEFECT, INTACT, BinaryMask
from .errors import DataError
from .slabdata import GridShape

PathLike = Union[str, Path]


@dataclass(frozen=True)
class DefectRect:
    x: float
    y: float
    w: float
    h: float
    label: str = ""


@dataclass(frozen=True)
class DefectSpec:
    slab_id: str
    slab_size: tuple[float, float]
    raster: tuple[int, int]
    defects: tuple[DefectRect, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "defects", tuple(self.defects))
        problems = spec_violations(self)
        if problems:
            raise DataError("; ".join(problems))


def spec_violations(spec: DefectSpec) -> list[str]:
    out = []
    W, H = spec.slab_size
    if not (math.isfinite(W) and math.isfinite(H) and W > 0 and H > 0):
        out.append(f"slab size must be positive, got {spec.slab_size}")
    px_w, px_h = spec.raster
    if px_w < 1 or px_h < 1:
        out.append(f"raster must be at least 1x1 pixels, got {spec.raster}")
    for i, d in enumerate(spec.defects):
        if not all(math.isfinite(v) for v in (d.x, d.y, d.w, d.h)):
            out.append(f"defect {i} has non-finite geometry")
        elif d.w <= 0 or d.h <= 0:
            out.append(f"defect {i} ({d.label!r}) must have positive size")
        elif d.x < 0 or d.y < 0 or d.x + d.w > W or d.y + d.h > H:
            out.append(f"defect out of bounds: defect {i} ({d.label!r}) exceeds the {W} x {H} m slab")
    return out


@dataclass(frozen=True, eq=False)
class GroundTruthMask(BinaryMask):
    source: str = ""


def spec_from_dict(doc: dict) -> DefectSpec:
    try:
        w, h = (float(v) for v in doc["slab_size_m"])
        pw, ph = doc["raster_px"]
        if not (isinstance(pw, int) and isinstance(ph, int)):
            raise TypeError("raster_px must be integers")
        defects = tuple(
            DefectRect(float(d["x_m"]), float(d["y_m"]), float(d["w_m"]), float(d["h_m"]),
                       str(d.get("label", "")))
            for d in doc.get("defects", [])
        )
        return DefectSpec(str(doc["slab_id"]), (w, h), (pw, ph), defects)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"malformed defect spec: {exc!r}") from None


def spec_to_dict(spec: DefectSpec) -> dict:
    return {
        "slab_id": spec.slab_id,
        "slab_size_m": list(spec.slab_size),
        "raster_px": list(spec.raster),
        "defects": [
            {"x_m": d.x, "y_m": d.y, "w_m": d.w, "h_m": d.h, "label": d.label}
            for d in spec.defects
        ],
    }


def parse_defect_spec(path: PathLike) -> DefectSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed defect spec {path}: {exc}") from None
    except OSError as exc:
        raise DataError(f"cannot read defect spec {path}: {exc.strerror}") from None
    if not isinstance(doc, dict):
        raise DataError(f"malformed defect spec {path}: expected a JSON object")
    return spec_from_dict(doc)


def write_defect_spec(spec: DefectSpec, path: PathLike) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec), indent=2) + "\n", encoding="utf-8")


def rasterize_gtm(spec: DefectSpec) -> GroundTruthMask:
    """Pixel is a defect iff its centre falls in some rectangle [x, x+w) x [y, y+h)."""
    px_w, px_h = spec.raster
    W, H = spec.slab_size
    cx = (np.arange(px_w) + 0.5) * (W / px_w)
    cy = (np.arange(px_h) + 0.5) * (H / px_h)
    hit = np.zeros((px_h, px_w), dtype=bool)
    for d in spec.defects:
        in_x = (cx >= d.x) & (cx < d.x + d.w)
        in_y = (cy >= d.y) & (cy < d.y + d.h)
        hit |= in_y[:, None] & in_x[None, :]
    return GroundTruthMask(GridShape(px_h, px_w), np.where(hit, DEFECT, INTACT), spec.slab_id)


def _nearest_index(n_out: int, n_in: int) -> np.ndarray:
    return (np.arange(n_out) * n_in) // n_out


def upsample(values: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Nearest-neighbour resize of a 2-D array to rows x cols."""
    v = np.asarray(values)
    return v[_nearest_index(rows, v.shape[0])][:, _nearest_index(cols, v.shape[1])]


def align_masks(dm: BinaryMask, gtm: BinaryMask) -> tuple[BinaryMask, BinaryMask]:
    """Resize the detection mask onto the ground-truth raster."""
    rows, cols = gtm.shape.as_tuple()
    return BinaryMask(gtm.shape, upsample(dm.values, rows, cols)), gtm


def downsample_majority(gtm: BinaryMask, shape: GridShape) -> BinaryMask:
    """Collapse a raster onto a coarser grid by majority vote; ties count as defect.

    Each raster pixel votes for the grid cell that nearest-neighbour upsampling
    would copy it from, so this inverts :func:`upsample` on exact multiples.
    Cells that receive no pixel take the pixel under their centre.
    """
    H, W = gtm.shape.as_tuple()
    R, C = shape.as_tuple()
    ri = _nearest_index(H, R)
    ci = _nearest_index(W, C)
    cell = ri[:, None] * C + ci[None, :]
    defect_votes = np.bincount(cell.ravel(), weights=(gtm.values == DEFECT).ravel(), minlength=R * C)
    total = np.bincount(cell.ravel(), minlength=R * C)
    out = np.where(2 * defect_votes >= total, DEFECT, INTACT)
    empty = total == 0
    if empty.any():
        r, c = np.divmod(np.flatnonzero(empty), C)
        py = np.minimum(((2 * r + 1) * H) // (2 * R), H - 1)
        px = np.minimum(((2 * c + 1) * W) // (2 * C), W - 1)
        out[empty] = gtm.values[py, px]
    return BinaryMask(shape, out.reshape(R, C))
