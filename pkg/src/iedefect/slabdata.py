"""Slab recording data model and the JSON slab file format.

A slab file looks like::

    {"slab_id": "S1", "rows": 9, "cols": 28, "sample_rate_hz": 500000.0,
     "cell_size_m": [0.25, 0.25], "readings": [[a0, a1, ...], ...]}

Readings are stored row-major: index ``row * cols + col``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DataError

PathLike = Union[str, Path]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GridShape:
    rows: int
    cols: int

    def __post_init__(self):
        if int(self.rows) < 1 or int(self.cols) < 1:
            raise DataError(f"grid shape must be at least 1x1, got {self.rows}x{self.cols}")

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def index(self, row: int, col: int) -> int:
        """Row-major flat index of cell (row, col)."""
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise IndexError(f"cell ({row}, {col}) outside {self.rows}x{self.cols} grid")
        return row * self.cols + col

    def cell(self, index: int) -> Tuple[int, int]:
        """Inverse of :meth:`index`."""
        if not 0 <= index < self.size:
            raise IndexError(f"index {index} outside grid of {self.size} cells")
        return divmod(index, self.cols)

    def as_tuple(self) -> Tuple[int, int]:
        return (self.rows, self.cols)


@dataclass(frozen=True)
class TimeSeries:
    """One impact-echo waveform: a sample rate and its amplitude samples."""

    sample_rate: float
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.float64)
        if amps.ndim != 1:
            raise DataError("amplitudes must be one-dimensional")
        object.__setattr__(self, "amplitudes", _frozen(amps))
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    def __len__(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) / self.sample_rate

    def violations(self) -> list[str]:
        out = []
        if not (math.isfinite(self.sample_rate) and self.sample_rate > 0):
            out.append(f"sample_rate must be finite and positive, got {self.sample_rate}")
        if len(self) < 2:
            out.append(f"waveform needs at least 2 samples, got {len(self)}")
        if not np.all(np.isfinite(self.amplitudes)):
            out.append("non-finite amplitude sample")
        return out


@dataclass(frozen=True)
class SlabRecording:
    """All readings of one slab on a rows x cols grid.

    ``samples`` has shape ``(rows * cols, n_samples)``. A single shared sample
    rate is stored per recording; :func:`validate` reports per-reading
    disagreements when the recording was assembled from individual series.
    """

    slab_id: str
    shape: GridShape
    sample_rate: float
    samples: np.ndarray
    cell_size: Optional[Tuple[float, float]] = None
    reading_rates: Optional[Tuple[float, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", _frozen(s))
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        if self.cell_size is not None:
            object.__setattr__(self, "cell_size", tuple(float(v) for v in self.cell_size))

    @classmethod
    def from_readings(
        cls,
        slab_id: str,
        shape: GridShape,
        readings: Sequence[TimeSeries],
        cell_size: Optional[Tuple[float, float]] = None,
    ) -> "SlabRecording":
        """Assemble a recording from row-major TimeSeries.

        Readings of unequal length are rejected here since they cannot be
        stacked; rate mismatches are kept for :func:`validate` to report.
        """
        if not readings:
            raise DataError("recording has no readings")
        lengths = {len(r) for r in readings}
        if len(lengths) != 1:
            first_bad = next(i for i, r in enumerate(readings) if len(r) != len(readings[0]))
            raise DataError(
                f"inconsistent reading lengths: cell {divmod(first_bad, shape.cols)} has "
                f"{len(readings[first_bad])} samples, expected {len(readings[0])}"
            )
        rates = tuple(r.sample_rate for r in readings)
        return cls(
            slab_id=slab_id,
            shape=shape,
            sample_rate=rates[0],
            samples=np.stack([r.amplitudes for r in readings]),
            cell_size=cell_size,
            reading_rates=rates,
        )

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1] if self.samples.ndim == 2 else 0

    def __len__(self) -> int:
        return self.samples.shape[0]

    def reading(self, row: int, col: int) -> TimeSeries:
        return TimeSeries(self.sample_rate, self.samples[self.shape.index(row, col)])

    def __iter__(self) -> Iterator[TimeSeries]:
        for amps in self.samples:
            yield TimeSeries(self.sample_rate, amps)


def validate(rec: SlabRecording) -> list[str]:
    """Return every violated recording invariant; an empty list means valid.

    Messages that concern a specific reading name the grid cell of the first
    offending reading.
    """
    problems: list[str] = []
    shape = rec.shape
    if rec.samples.ndim != 2:
        return ["samples must be a 2-D array of shape (cells, n_samples)"]
    n_cells, n_t = rec.samples.shape
    if n_cells != shape.size:
        problems.append(
            f"reading count mismatch: {n_cells} readings for a {shape.rows}x{shape.cols} grid"
        )
    if not (math.isfinite(rec.sample_rate) and rec.sample_rate > 0):
        problems.append(f"sample_rate must be finite and positive, got {rec.sample_rate}")
    if rec.reading_rates is not None:
        bad = [i for i, r in enumerate(rec.reading_rates) if r != rec.sample_rate]
        if bad:
            problems.append(
                f"sample_rate mismatch: cell {divmod(bad[0], shape.cols)} has "
                f"{rec.reading_rates[bad[0]]} Hz, expected {rec.sample_rate} Hz"
            )
    if n_t < 2:
        problems.append(f"readings need at least 2 samples, got {n_t}")
    finite = np.isfinite(rec.samples).all(axis=1)
    if not finite.all():
        first = int(np.argmin(finite))
        problems.append(f"non-finite sample in cell {divmod(first, shape.cols)}")
    if rec.cell_size is not None:
        if len(rec.cell_size) != 2 or not all(math.isfinite(v) and v > 0 for v in rec.cell_size):
            problems.append(f"cell_size must be two positive lengths, got {rec.cell_size}")
    return problems


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DataError(msg)


def slab_from_dict(doc: dict) -> SlabRecording:
    _require(isinstance(doc, dict), "slab file must contain a JSON object")
    for key in ("slab_id", "rows", "cols", "sample_rate_hz", "readings"):
        _require(key in doc, f"malformed slab file: missing key {key!r}")
    rows, cols = doc["rows"], doc["cols"]
    _require(
        isinstance(rows, int) and isinstance(cols, int) and not isinstance(rows, bool),
        "malformed slab file: rows and cols must be integers",
    )
    shape = GridShape(rows, cols)
    rate = doc["sample_rate_hz"]
    _require(isinstance(rate, (int, float)) and not isinstance(rate, bool),
             "malformed slab file: sample_rate_hz must be a number")
    readings = doc["readings"]
    _require(isinstance(readings, list) and all(isinstance(r, list) for r in readings),
             "malformed slab file: readings must be a list of lists")
    _require(len(readings) == shape.size,
             f"reading count mismatch: {len(readings)} readings for a {rows}x{cols} grid")
    lengths = {len(r) for r in readings}
    if len(lengths) != 1:
        first_bad = next(i for i, r in enumerate(readings) if len(r) != len(readings[0]))
        raise DataError(
            f"inconsistent reading lengths: cell {divmod(first_bad, cols)} has "
            f"{len(readings[first_bad])} samples, expected {len(readings[0])}"
        )
    try:
        samples = np.array(readings, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DataError(f"malformed slab file: non-numeric sample ({exc})") from None
    cell_size = doc.get("cell_size_m")
    if cell_size is not None:
        _require(isinstance(cell_size, list) and len(cell_size) == 2,
                 "malformed slab file: cell_size_m must be [dx, dy]")
        cell_size = tuple(cell_size)
    rec = SlabRecording(str(doc["slab_id"]), shape, rate, samples, cell_size)
    problems = validate(rec)
    if problems:
        raise DataError("; ".join(problems))
    return rec


def slab_to_dict(rec: SlabRecording) -> dict:
    doc = {
        "slab_id": rec.slab_id,
        "rows": rec.shape.rows,
        "cols": rec.shape.cols,
        "sample_rate_hz": rec.sample_rate,
    }
    if rec.cell_size is not None:
        doc["cell_size_m"] = list(rec.cell_size)
    doc["readings"] = rec.samples.tolist()
    return doc


def load_slab(path: PathLike) -> SlabRecording:
    """Read and validate a slab JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed slab file {path}: {exc}") from None
    except OSError as exc:
        raise DataError(f"cannot read slab file {path}: {exc.strerror}") from None
    return slab_from_dict(doc)


def write_slab(rec: SlabRecording, path: PathLike) -> None:
    """Write ``rec`` as JSON; floats are written in round-trip (repr) form."""
    problems = validate(rec)
    if problems:
        raise DataError("; ".join(problems))
    Path(path).write_text(json.dumps(slab_to_dict(rec), separators=(",", ":")) + "\n",
                          encoding="utf-8")
