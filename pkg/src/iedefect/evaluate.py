"""Pixel-wise evaluation of detection masks against ground truth.

Defect pixels (value 0) are the positive class. Ratios whose denominator is
zero are reported as ``None`` ("undefined"), never as 0 or 1.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .detect import DEFECT, BinaryMask
from .errors import DataError
from .groundtruth import align_masks, downsample_majority
from .mapping import FrequencyGrid

METRIC_NAMES = ("iou", "precision", "recall", "f1", "fnr", "fpr", "tnr", "auc_roc")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsReport:
    iou: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    fnr: Optional[float]
    fpr: Optional[float]
    tnr: Optional[float]
    auc_roc: Optional[float] = None
    confusion: Optional[ConfusionCounts] = None

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def confusion(dm: BinaryMask, gtm: BinaryMask) -> ConfusionCounts:
    if dm.shape != gtm.shape:
        raise DataError(
            f"mask dimensions differ: {dm.shape.as_tuple()} vs {gtm.shape.as_tuple()}"
        )
    d = dm.values == DEFECT
    g = gtm.values == DEFECT
    return ConfusionCounts(
        tp=int(np.sum(d & g)), fp=int(np.sum(d & ~g)),
        fn=int(np.sum(~d & g)), tn=int(np.sum(~d & ~g)),
    )


def _ratio(num, den) -> Optional[Fraction]:
    return None if den == 0 else Fraction(num) / Fraction(den)


def exact_metrics(c: ConfusionCounts) -> dict[str, Optional[Fraction]]:
    """The seven confusion metrics as exact fractions (None when 0/0)."""
    precision = _ratio(c.tp, c.tp + c.fp)
    recall = _ratio(c.tp, c.tp + c.fn)
    if precision is None or recall is None:
        f1 = None
    else:
        f1 = _ratio(2 * precision * recall, precision + recall)
    return {
        "iou": _ratio(c.tp, c.tp + c.fp + c.fn),
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "fnr": _ratio(c.fn, c.fn + c.tp),
        "fpr": _ratio(c.fp, c.fp + c.tn),
        "tnr": _ratio(c.tn, c.tn + c.fp),
    }


def metrics(c: ConfusionCounts) -> MetricsReport:
    vals = {k: (None if v is None else float(v)) for k, v in exact_metrics(c).items()}
    return MetricsReport(**vals, confusion=c)


def _check_scores(scores: np.ndarray, labels: np.ndarray) -> None:
    if scores.shape != labels.shape:
        raise DataError(f"score/label shapes differ: {scores.shape} vs {labels.shape}")


def roc_from_frequencies(freqs, is_defect) -> tuple[RocCurve, Optional[float]]:
    """ROC of 'lower frequency means defect' over every distinct cutoff.

    A cell is called a defect at cutoff t when f <= t. Cutoffs run from -inf
    (nothing called) through each distinct frequency to +inf (everything
    called). AUC is the trapezoid area, accumulated in integer counts so it
    is exact up to one final division.
    """
    f = np.asarray(freqs, dtype=np.float64).ravel()
    y = np.asarray(is_defect, dtype=bool).ravel()
    _check_scores(f, y)
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    uniq, inv = np.unique(f, return_inverse=True)
    pos_at = np.bincount(inv, weights=y, minlength=uniq.size).astype(np.int64)
    neg_at = np.bincount(inv, weights=~y, minlength=uniq.size).astype(np.int64)
    tp = np.concatenate([[0], np.cumsum(pos_at), [n_pos]])
    fp = np.concatenate([[0], np.cumsum(neg_at), [n_neg]])
    thresholds = np.concatenate([[-math.inf], uniq, [math.inf]])
    if n_pos == 0 or n_neg == 0:
        fpr = fp / n_neg if n_neg else np.zeros(fp.shape)
        tpr = tp / n_pos if n_pos else np.zeros(tp.shape)
        return RocCurve(fpr, tpr, thresholds), None
    area2 = int(np.sum(np.diff(fp) * (tp[1:] + tp[:-1])))
    auc = area2 / (2 * n_pos * n_neg)
    return RocCurve(fp / n_neg, tp / n_pos, thresholds), auc


def roc_auc(score_grid: FrequencyGrid, gtm: BinaryMask) -> tuple[RocCurve, Optional[float]]:
    """ROC/AUC at grid resolution; the GTM is majority-voted down to the grid."""
    labels = gtm if gtm.shape == score_grid.shape else downsample_majority(gtm, score_grid.shape)
    return roc_from_frequencies(score_grid.values, labels.values == DEFECT)


def evaluate_slab(dm: BinaryMask, score_grid: FrequencyGrid, gtm: BinaryMask) -> MetricsReport:
    dm_px, gt_px = align_masks(dm, gtm)
    c = confusion(dm_px, gt_px)
    _, auc = roc_auc(score_grid, gtm)
    base = metrics(c)
    return MetricsReport(**{**base.__dict__, "auc_roc": auc})


def roc_to_csv(curve: RocCurve, fmt=lambda v: f"{v:.6g}") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["threshold_hz", "fpr", "tpr"])
    for t, x, y in zip(curve.thresholds, curve.fpr, curve.tpr):
        w.writerow([fmt(float(t)), fmt(float(x)), fmt(float(y))])
    return buf.getvalue()
