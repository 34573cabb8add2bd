"""Synthetic slabs with planted rectangular defects.

Every cell records a damped sinusoid ``exp(-t / tau) * sin(2 pi f t)`` plus
white gaussian noise. Defect cells ring in ``defect_band``, intact cells in
``intact_band``. By default all defect cells of a slab share one tone
(a single delamination depth) while intact tones vary per cell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError
from .groundtruth import DefectRect, DefectSpec
from .slabdata import GridShape, SlabRecording


@dataclass(frozen=True)
class CellRect:
    """Rectangle of grid cells: top-left (row, col) and extent in cells."""

    row: int
    col: int
    rows: int
    cols: int

    def cells(self):
        for r in range(self.row, self.row + self.rows):
            for c in range(self.col, self.col + self.cols):
                yield r, c


def default_defects(shape: GridShape) -> tuple[CellRect, ...]:
    """Two rectangles covering roughly 39% of a 9 x 28 grid, scaled to ``shape``."""
    R, C = shape.rows, shape.cols

    def rect(r0, h, c0, w):
        row = min(round(r0 * R), R - 1)
        col = min(round(c0 * C), C - 1)
        return CellRect(row, col, max(1, min(round(h * R), R - row)), max(1, min(round(w * C), C - col)))

    return (rect(2 / 9, 5 / 9, 4 / 28, 10 / 28), rect(1 / 9, 6 / 9, 16 / 28, 8 / 28))


@dataclass(frozen=True)
class SynthConfig:
    shape: GridShape = GridShape(9, 28)
    sample_rate: float = 500_000.0
    n_samples: int = 2000
    defect_band: tuple[float, float] = (6_000.0, 12_000.0)
    intact_band: tuple[float, float] = (58_000.0, 70_000.0)
    decay_tau: float = 0.5e-3
    noise_sigma: float = 0.0
    seed: int = 0
    defects: Optional[Sequence[CellRect]] = None
    snap: bool = True
    shared_defect_tone: bool = True
    cell_size: tuple[float, float] = (0.25, 0.25)
    slab_id: str = field(default="")

    def __post_init__(self):
        if self.defects is None:
            object.__setattr__(self, "defects", default_defects(self.shape))
        else:
            object.__setattr__(self, "defects", tuple(self.defects))
        if not self.slab_id:
            object.__setattr__(self, "slab_id", f"synth-{self.seed}")
        problems = self.violations()
        if problems:
            raise ConfigError("; ".join(problems))

    @property
    def nyquist(self) -> float:
        return self.sample_rate / 2

    def violations(self) -> list[str]:
        out = []
        if not (math.isfinite(self.sample_rate) and self.sample_rate > 0):
            out.append("sample_rate must be positive")
        if self.n_samples < 2:
            out.append("n_samples must be >= 2")
        for name in ("defect_band", "intact_band"):
            lo, hi = getattr(self, name)
            if not (0 < lo <= hi < self.nyquist):
                out.append(f"{name} {lo}-{hi} Hz must satisfy 0 < lo <= hi < Nyquist ({self.nyquist} Hz)")
        if not self.defect_band[1] < self.intact_band[0]:
            out.append("defect_band must lie strictly below intact_band")
        if not self.decay_tau > 0:
            out.append("decay_tau must be positive")
        if not (math.isfinite(self.noise_sigma) and self.noise_sigma >= 0):
            out.append("noise_sigma must be >= 0")
        if not all(v > 0 for v in self.cell_size):
            out.append("cell_size must be positive")
        for i, d in enumerate(self.defects):
            if d.rows < 1 or d.cols < 1 or d.row < 0 or d.col < 0 \
                    or d.row + d.rows > self.shape.rows or d.col + d.cols > self.shape.cols:
                out.append(f"defect rectangle {i} {d} lies outside the {self.shape.rows}x{self.shape.cols} grid")
        return out


def snap_to_bin(f: float, sample_rate: float, n_samples: int) -> float:
    """Nearest bin centre k * fs / N to ``f``; halfway cases go to the lower k.

    The result is kept strictly between DC and Nyquist.
    """
    if not 0 < f < sample_rate / 2:
        raise ConfigError(f"frequency {f} Hz outside (0, Nyquist = {sample_rate / 2} Hz)")
    x = Fraction(f) * n_samples / Fraction(sample_rate)
    k = math.ceil(x - Fraction(1, 2))
    k = min(max(k, 1), (n_samples - 1) // 2)
    return k * sample_rate / n_samples


def defect_cells(cfg: SynthConfig) -> np.ndarray:
    """Boolean (rows, cols) array of planted defect cells."""
    mask = np.zeros(cfg.shape.as_tuple(), dtype=bool)
    for d in cfg.defects:
        mask[d.row:d.row + d.rows, d.col:d.col + d.cols] = True
    return mask


def tone_grid(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    planted = defect_cells(cfg)

    def draw(band, size=None):
        f = rng.uniform(band[0], band[1], size)
        if not cfg.snap:
            return f
        snap = np.vectorize(lambda v: snap_to_bin(float(v), cfg.sample_rate, cfg.n_samples))
        return snap(f)

    shared = draw(cfg.defect_band)
    intact = draw(cfg.intact_band, planted.shape)
    if cfg.shared_defect_tone:
        defect = np.full(planted.shape, float(shared))
    else:
        defect = draw(cfg.defect_band, planted.shape)
    return np.where(planted, defect, intact)


def to_defect_spec(cfg: SynthConfig) -> DefectSpec:
    """Defect spec in metres whose raster (one pixel per cell) equals the planted cells."""
    dx, dy = cfg.cell_size
    rects = tuple(
        DefectRect(d.col * dx, d.row * dy, d.cols * dx, d.rows * dy, f"planted-{i}")
        for i, d in enumerate(cfg.defects)
    )
    return DefectSpec(
        cfg.slab_id,
        (cfg.shape.cols * dx, cfg.shape.rows * dy),
        (cfg.shape.cols, cfg.shape.rows),
        rects,
    )


def generate_slab(cfg: SynthConfig) -> tuple[SlabRecording, DefectSpec]:
    rng = np.random.default_rng(cfg.seed)
    tones = tone_grid(cfg, rng).ravel()
    t = np.arange(cfg.n_samples) / cfg.sample_rate
    samples = np.exp(-t / cfg.decay_tau)[None, :] * np.sin(2 * np.pi * tones[:, None] * t[None, :])
    if cfg.noise_sigma > 0:
        samples = samples + cfg.noise_sigma * rng.standard_normal(samples.shape)
    rec = SlabRecording(cfg.slab_id, cfg.shape, cfg.sample_rate, samples, cfg.cell_size)
    return rec, to_defect_spec(cfg)
