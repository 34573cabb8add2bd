"""Adaptive frequency thresholding over a slab's dominant frequencies.

The bin count is the mean of the exponential rule ``ceil(n ** (1/exponent))``
and the adjusted square-root rule ``ceil(multiplier * sqrt(n))``, rounded up.
Ranges are maximal runs of non-empty bins; the lowest run marks defect-prone
cells and the highest run intact ones.
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, MethodError


@dataclass(frozen=True)
class ThresholdConfig:
    exponent: float = 1.5
    multiplier: float = 1.5

    def __post_init__(self):
        if not (math.isfinite(self.exponent) and self.exponent > 1):
            raise ConfigError(f"exponent must be > 1, got {self.exponent}")
        if not (math.isfinite(self.multiplier) and self.multiplier > 0):
            raise ConfigError(f"multiplier must be > 0, got {self.multiplier}")


@dataclass(frozen=True)
class FrequencyHistogram:
    f_min: float
    f_max: float
    k: int
    counts: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def delta_f(self) -> float:
        return (self.f_max - self.f_min) / self.k

    @property
    def edges(self) -> np.ndarray:
        """k + 1 bin edges, f_min + b * delta_f."""
        return self.f_min + np.arange(self.k + 1) * self.delta_f

    @property
    def densities(self) -> np.ndarray:
        return self.counts / (self.n * self.delta_f)


@dataclass(frozen=True)
class FrequencyRange:
    f_start: float
    f_end: float
    b_start: int
    b_end: int

    def contains(self, f: float) -> bool:
        return self.f_start <= f <= self.f_end

    def as_tuple(self) -> tuple[float, float]:
        return (self.f_start, self.f_end)


@dataclass(frozen=True)
class RangePair:
    low: FrequencyRange
    high: FrequencyRange


def exponential_rule(n: int, exponent: float = 1.5) -> int:
    """ceil(n ** (1/exponent)), exact for exponents that are small fractions."""
    guess = math.ceil(n ** (1.0 / exponent))
    e = Fraction(exponent)
    if e.numerator > 64 or e.denominator > 64:
        return guess
    # smallest m with m ** (p/q) >= n, i.e. m ** p >= n ** q
    target = n ** e.denominator
    m = max(guess - 1, 1)
    while m > 1 and (m - 1) ** e.numerator >= target:
        m -= 1
    while m ** e.numerator < target:
        m += 1
    return m


def adjusted_sqrt_rule(n: int, multiplier: float = 1.5) -> int:
    """ceil(multiplier * sqrt(n)), computed exactly from the float multiplier."""
    x = Fraction(multiplier) ** 2 * n
    m = math.isqrt(x.numerator // x.denominator)
    while m * m * x.denominator < x.numerator:
        m += 1
    return m


def bin_count(n: int, cfg: ThresholdConfig = ThresholdConfig()) -> int:
    if n < 1:
        raise MethodError(f"bin count needs at least one observation, got n={n}")
    total = exponential_rule(n, cfg.exponent) + adjusted_sqrt_rule(n, cfg.multiplier)
    return max(1, -(-total // 2))


def build_histogram(freqs: Sequence[float], k: int) -> FrequencyHistogram:
    """Histogram of ``freqs`` over k equal bins spanning [min, max].

    Bins are half-open except the last, which also takes f_max.
    """
    f = np.asarray(freqs, dtype=np.float64).ravel()
    if f.size == 0:
        raise MethodError("cannot build a histogram of no frequencies")
    if k < 1:
        raise MethodError(f"bin count must be >= 1, got {k}")
    f_min, f_max = float(f.min()), float(f.max())
    if f_max == f_min:
        raise MethodError(f"degenerate distribution: every dominant frequency equals {f_min} Hz")
    hist = FrequencyHistogram(f_min, f_max, int(k), np.zeros(k, dtype=np.int64))
    # Assign by the same edges the ranges are reported with, so membership and
    # f_start/f_end can never disagree through rounding.
    bins = np.searchsorted(hist.edges, f, side="right") - 1
    bins = np.clip(bins, 0, k - 1)
    counts = np.bincount(bins, minlength=k).astype(np.int64)
    counts.setflags(write=False)
    return FrequencyHistogram(f_min, f_max, int(k), counts)


def bin_of(h: FrequencyHistogram, f: float) -> int:
    b = int(np.searchsorted(h.edges, f, side="right") - 1)
    return min(max(b, 0), h.k - 1)


def identify_ranges(h: FrequencyHistogram) -> list[FrequencyRange]:
    ranges = []
    occupied = np.asarray(h.counts) > 0
    edges = h.edges
    b = 0
    while b < h.k:
        if not occupied[b]:
            b += 1
            continue
        start = b
        while b + 1 < h.k and occupied[b + 1]:
            b += 1
        ranges.append(FrequencyRange(float(edges[start]), float(edges[b + 1]), start, b))
        b += 1
    return ranges


def classify_ranges(ranges: Sequence[FrequencyRange]) -> RangePair:
    if not ranges:
        raise MethodError("no frequency ranges to classify")
    if len(ranges) == 1:
        r = ranges[0]
        raise MethodError(
            f"no frequency separation: a single range [{r.f_start:g}, {r.f_end:g}] Hz "
            "cannot distinguish defect from intact"
        )
    ordered = sorted(ranges, key=lambda r: r.f_start)
    return RangePair(low=ordered[0], high=ordered[-1])


@dataclass(frozen=True)
class ThresholdResult:
    """Everything adaptive thresholding derived for one slab."""

    config: ThresholdConfig
    histogram: FrequencyHistogram
    ranges: tuple[FrequencyRange, ...]
    pair: RangePair


def adaptive_threshold(freqs: Sequence[float], cfg: ThresholdConfig = ThresholdConfig()) -> ThresholdResult:
    f = np.asarray(freqs, dtype=np.float64).ravel()
    h = build_histogram(f, bin_count(f.size, cfg))
    ranges = identify_ranges(h)
    return ThresholdResult(cfg, h, tuple(ranges), classify_ranges(ranges))


def _range_dict(r: FrequencyRange) -> dict:
    return {"f_start": r.f_start, "f_end": r.f_end, "b_start": r.b_start, "b_end": r.b_end}


def histogram_report(h: FrequencyHistogram, ranges: Sequence[FrequencyRange],
                     pair: RangePair | None = None, cfg: ThresholdConfig | None = None) -> dict:
    """JSON-ready diagnostics: bin edges, counts, densities and ranges."""
    doc = {
        "n": h.n,
        "k": h.k,
        "f_min": h.f_min,
        "f_max": h.f_max,
        "delta_f": h.delta_f,
        "edges": h.edges.tolist(),
        "counts": [int(c) for c in h.counts],
        "densities": h.densities.tolist(),
        "ranges": [_range_dict(r) for r in ranges],
    }
    if cfg is not None:
        doc["config"] = {"exponent": cfg.exponent, "multiplier": cfg.multiplier}
    if pair is not None:
        doc["low"] = _range_dict(pair.low)
        doc["high"] = _range_dict(pair.high)
        doc["middle"] = [_range_dict(r) for r in ranges if r != pair.low and r != pair.high]
    return doc
