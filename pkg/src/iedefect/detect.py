"""Defect classification on the low-band frequency grid.

Masks use 0 for defect and 1 for non-defect throughout.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import DataError, MethodError
from .mapping import FrequencyGrid
from .slabdata import GridShape

DEFECT, INTACT = 0, 1
MAX_ITER = 100


@dataclass(frozen=True)
class BinaryMask:
    shape: GridShape
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values).reshape(self.shape.rows, self.shape.cols)
        if not np.isin(v, (0, 1)).all():
            raise DataError("mask values must be 0 (defect) or 1 (non-defect)")
        v = v.astype(np.uint8)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __eq__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.values, other.values)

    __hash__ = None

    @classmethod
    def from_array(cls, values) -> "BinaryMask":
        v = np.atleast_2d(np.asarray(values))
        return cls(GridShape(*v.shape), v)

    @property
    def defect_fraction(self) -> float:
        return float(np.mean(self.values == DEFECT))


@dataclass(frozen=True)
class ClusterModel:
    centroids: np.ndarray
    labels: np.ndarray
    defect_label: int
    cost: float
    iterations: int
    restarted: bool = field(default=False)

    @property
    def K(self) -> int:
        return len(self.centroids)

    @property
    def sizes(self) -> list[int]:
        return [int(np.sum(self.labels == j)) for j in range(self.K)]

    def summary(self) -> dict:
        return {
            "K": self.K,
            "centroids_hz": [float(c) for c in self.centroids],
            "sizes": self.sizes,
            "cost": self.cost,
            "defect_label": self.defect_label,
            "iterations": self.iterations,
            "restarted_from_exact": self.restarted,
        }


def binary_mask(grid: FrequencyGrid) -> tuple[BinaryMask, float]:
    """Median threshold: cells strictly below the median are defects."""
    threshold = float(np.median(grid.values))
    mask = np.where(grid.values < threshold, DEFECT, INTACT)
    return BinaryMask(grid.shape, mask), threshold


def _assign(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # centroids are sorted ascending and argmin returns the first minimum, so
    # equidistant values go to the lower-centroid cluster
    return np.argmin(np.abs(x[:, None] - centroids[None, :]), axis=1)


def _cost(x: np.ndarray, labels: np.ndarray, k: int) -> float:
    total = 0.0
    for j in range(k):
        members = x[labels == j]
        if members.size:
            total += float(np.sum((members - members.mean()) ** 2))
    return total


def _lloyd(x: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Alternate assignment and mean update until assignments stop changing.

    In one dimension nearest-centroid groups are intervals of the sorted
    values, so the updated centroids stay in ascending order.
    """
    labels = _assign(x, centroids)
    for it in range(1, MAX_ITER + 1):
        centroids = np.array([x[labels == j].mean() if np.any(labels == j) else centroids[j]
                              for j in range(len(centroids))])
        new = _assign(x, centroids)
        if np.array_equal(new, labels):
            return centroids, labels, it
        labels = new
    return centroids, labels, MAX_ITER


def optimal_partition_1d(values: Sequence[float], k: int) -> np.ndarray:
    """Centroids of the globally optimal k-means partition of 1-D data.

    Dynamic programming over split points of the sorted values, O(k n^2).
    """
    xs = np.sort(np.asarray(values, dtype=np.float64))
    n = xs.size
    x = xs - xs.mean()
    s1 = np.concatenate([[0.0], np.cumsum(x)])
    s2 = np.concatenate([[0.0], np.cumsum(x * x)])
    cost = np.full((k + 1, n + 1), np.inf)
    back = np.zeros((k + 1, n + 1), dtype=np.int64)
    cost[0, 0] = 0.0
    for c in range(1, k + 1):
        for j in range(c, n + 1):
            i = np.arange(c - 1, j)
            d = s1[j] - s1[i]
            cand = cost[c - 1, i] + (s2[j] - s2[i] - d * d / (j - i))
            best = int(np.argmin(cand))
            cost[c, j] = cand[best]
            back[c, j] = i[best]
    bounds = [n]
    for c in range(k, 0, -1):
        bounds.append(int(back[c, bounds[-1]]))
    bounds.reverse()
    return np.array([xs[bounds[c]:bounds[c + 1]].mean() for c in range(k)])


def kmeans_1d(values: Sequence[float], K: int = 2, seed: int = 0) -> ClusterModel:
    """Lloyd k-means on scalar values, certified against the exact 1-D optimum.

    Lloyd starts from centroids spread evenly between min and max (for K = 2,
    exactly min and max). If the fixpoint it reaches costs more than the
    dynamic-programming optimum, Lloyd is rerun from the optimal centroids,
    which is itself a fixpoint. ``seed`` is accepted for API stability; the
    procedure is fully deterministic.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise MethodError("k-means needs at least one value")
    if K < 1:
        raise MethodError(f"K must be >= 1, got {K}")
    if np.unique(x).size < K:
        raise MethodError(
            f"insufficient distinct values: {np.unique(x).size} distinct for K={K}"
        )
    init = np.linspace(x.min(), x.max(), K)
    centroids, labels, iters = _lloyd(x, init)
    cost = _cost(x, labels, K)
    restarted = False
    exact = optimal_partition_1d(x, K)
    exact_labels = _assign(x, exact)
    exact_cost = _cost(x, exact_labels, K)
    if exact_cost < cost:
        centroids, labels, more = _lloyd(x, exact)
        iters += more
        cost = _cost(x, labels, K)
        restarted = True
    defect = int(np.argmin(centroids))
    return ClusterModel(centroids, labels, defect, cost, iters, restarted)


def cluster_map(grid: FrequencyGrid, seed: int = 0) -> tuple[BinaryMask, ClusterModel]:
    model = kmeans_1d(grid.ravel(), K=2, seed=seed)
    mask = np.where(model.labels == model.defect_label, DEFECT, INTACT)
    return BinaryMask(grid.shape, mask.reshape(grid.shape.as_tuple())), model


def mask_to_csv(mask: BinaryMask) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in mask.values:
        w.writerow([int(v) for v in row])
    return buf.getvalue()


def write_mask(mask: BinaryMask, path: Union[str, Path]) -> None:
    Path(path).write_text(mask_to_csv(mask), encoding="utf-8")


def read_mask(path: Union[str, Path]) -> BinaryMask:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read mask {path}: {exc.strerror}") from None
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows or len({len(r) for r in rows}) != 1:
        raise DataError(f"mask CSV {path} must be a non-empty rectangle")
    try:
        return BinaryMask.from_array([[int(v) for v in r] for r in rows])
    except ValueError as exc:
        raise DataError(f"mask CSV {path}: {exc}") from None
