"""Per-cell dominant frequencies laid out on the slab grid.

Two passes are used. The global pass takes each cell's strongest non-DC bin
and feeds adaptive thresholding. The low-band pass repeats the argmax inside
the identified low range; that grid is what masking and clustering consume.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from . import dsp
from .adaptive import FrequencyRange, RangePair
from .errors import DataError, MethodError
from .slabdata import GridShape, SlabRecording


@dataclass(frozen=True)
class FrequencyGrid:
    shape: GridShape
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).reshape(self.shape.rows, self.shape.cols)
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise DataError("frequency grid values must be finite and non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __eq__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.values, other.values)

    __hash__ = None

    @classmethod
    def from_array(cls, values) -> "FrequencyGrid":
        v = np.atleast_2d(np.asarray(values, dtype=np.float64))
        return cls(GridShape(*v.shape), v)

    def ravel(self) -> np.ndarray:
        return self.values.ravel()


def _spectra(rec: SlabRecording) -> tuple[np.ndarray, np.ndarray]:
    mags = dsp.magnitude_rows(dsp.normalize_rows(rec.samples), detrend=True)
    return dsp.bin_frequencies(rec.n_samples, rec.sample_rate), mags


def _grid(rec: SlabRecording, band) -> FrequencyGrid:
    freqs, mags = _spectra(rec)
    keep = dsp.band_mask(freqs, band, exclude_dc=True)
    if not keep.any():
        raise MethodError(f"slab {rec.slab_id}: no spectrum bins inside range {band} Hz")
    return FrequencyGrid(rec.shape, freqs[dsp.dominant_index_rows(mags, keep)])


def global_frequency_grid(rec: SlabRecording) -> FrequencyGrid:
    return _grid(rec, None)


def low_band_frequency_grid(rec: SlabRecording, pair: Union[RangePair, FrequencyRange]) -> FrequencyGrid:
    """Dominant frequency of every cell restricted to the low (defect) range."""
    low = pair.low if isinstance(pair, RangePair) else pair
    return _grid(rec, (low.f_start, low.f_end))


def grid_to_csv(grid: FrequencyGrid) -> str:
    """rows x cols of Hz values in round-trip float text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in grid.values:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def grid_from_csv(text: str) -> FrequencyGrid:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows or len({len(r) for r in rows}) != 1:
        raise DataError("grid CSV must be a non-empty rectangle of numbers")
    try:
        return FrequencyGrid.from_array([[float(v) for v in r] for r in rows])
    except ValueError as exc:
        raise DataError(f"grid CSV: {exc}") from None


def write_grid(grid: FrequencyGrid, path: Union[str, Path]) -> None:
    Path(path).write_text(grid_to_csv(grid), encoding="utf-8")


def read_grid(path: Union[str, Path]) -> FrequencyGrid:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read grid {path}: {exc.strerror}") from None
    return grid_from_csv(text)
