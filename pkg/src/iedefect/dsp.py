"""Per-waveform signal processing: normalization, spectra, dominant frequency.

The batch helpers (``normalize_rows``, ``magnitude_rows``) apply the same
operations to a stack of equal-length waveforms and are what the grid mapping
uses; the single-waveform functions are thin wrappers over them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .errors import DataError, MethodError
from .slabdata import TimeSeries

Band = Optional[Tuple[float, float]]


@dataclass(frozen=True)
class Spectrum:
    """Positive-frequency magnitude spectrum; bin k sits at k * fs / N."""

    freqs: np.ndarray
    mags: np.ndarray

    def __post_init__(self):
        for name in ("freqs", "mags"):
            a = np.array(getattr(self, name), dtype=np.float64)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.freqs.shape != self.mags.shape:
            raise DataError("freqs and mags must have equal length")

    def __len__(self) -> int:
        return self.freqs.shape[0]


def normalize_rows(samples: np.ndarray) -> np.ndarray:
    """Min-max scale every row to [0, 1]; constant rows become all zeros."""
    x = np.asarray(samples, dtype=np.float64)
    lo = x.min(axis=-1, keepdims=True)
    span = x.max(axis=-1, keepdims=True) - lo
    flat = span == 0
    out = (x - lo) / np.where(flat, 1.0, span)
    out[np.broadcast_to(flat, out.shape)] = 0.0
    return out


def normalize(ts: TimeSeries) -> TimeSeries:
    return TimeSeries(ts.sample_rate, normalize_rows(ts.amplitudes))


def bin_frequencies(n_samples: int, sample_rate: float) -> np.ndarray:
    """Bin centers k * fs / N for k = 0 .. N // 2."""
    return np.arange(n_samples // 2 + 1) * sample_rate / n_samples


def magnitude_rows(samples: np.ndarray, detrend: bool = True) -> np.ndarray:
    """|rfft| of each row at its native length, optionally mean-removed first."""
    x = np.asarray(samples, dtype=np.float64)
    if x.shape[-1] < 2:
        raise DataError(f"spectrum needs at least 2 samples, got {x.shape[-1]}")
    if detrend:
        x = x - x.mean(axis=-1, keepdims=True)
    return np.abs(np.fft.rfft(x, axis=-1))


def spectrum(ts: TimeSeries, detrend: bool = True) -> Spectrum:
    n = len(ts)
    if n < 2:
        raise DataError(f"spectrum needs at least 2 samples, got {n}")
    return Spectrum(bin_frequencies(n, ts.sample_rate), magnitude_rows(ts.amplitudes, detrend))


def band_mask(freqs: np.ndarray, band: Band = None, exclude_dc: bool = True) -> np.ndarray:
    """Boolean selector of bins with band[0] <= f <= band[1] (closed on both ends)."""
    keep = np.ones(freqs.shape, dtype=bool)
    if band is not None:
        lo, hi = band
        keep &= (freqs >= lo) & (freqs <= hi)
    if exclude_dc:
        keep &= freqs != 0
    return keep


def dominant_index_rows(mags: np.ndarray, keep: np.ndarray) -> np.ndarray:
    """Per-row argmax restricted to ``keep``; first (lowest) index wins ties."""
    idx = np.flatnonzero(keep)
    if idx.size == 0:
        raise MethodError("no spectrum bins inside the requested frequency range")
    return idx[np.argmax(mags[..., idx], axis=-1)]


def dominant_frequency(sp: Spectrum, band: Band = None, exclude_dc: bool = True) -> float:
    """Frequency of the strongest bin within ``band`` (the full spectrum if None).

    ``band`` may be a ``(f_start, f_end)`` tuple or any object with
    ``f_start``/``f_end`` attributes such as a FrequencyRange.
    """
    band = as_band(band)
    keep = band_mask(sp.freqs, band, exclude_dc)
    if not keep.any():
        raise MethodError(f"no spectrum bins inside range {band}")
    return float(sp.freqs[dominant_index_rows(sp.mags, keep)])


def as_band(band: Union[None, Tuple[float, float], object]) -> Band:
    if band is None:
        return None
    if hasattr(band, "f_start"):
        return (float(band.f_start), float(band.f_end))
    lo, hi = band
    return (float(lo), float(hi))
