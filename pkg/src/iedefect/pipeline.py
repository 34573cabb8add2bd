"""End-to-end analysis and evaluation of a slab, with on-disk artifacts.

``analyze`` runs the detection workflow on a recording; ``evaluate`` scores
its masks against a defect specification. The ``write_*`` functions lay the
results out in an output directory together with a manifest.
"""
from __future__ import annotations

import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import __version__
from ._io import dump_json, sha256_file
from .adaptive import ThresholdConfig, ThresholdResult, adaptive_threshold, histogram_report
from .detect import BinaryMask, ClusterModel, binary_mask, cluster_map, read_mask, write_mask
from .evaluate import MetricsReport, evaluate_slab, roc_auc, roc_to_csv
from .groundtruth import DefectSpec, GroundTruthMask, rasterize_gtm, upsample
from .mapping import FrequencyGrid, global_frequency_grid, low_band_frequency_grid, read_grid, write_grid
from .render import (COLORMAPS, WARM_TO_COOL, heatmap, histogram_csv, mask_raster, overlay,
                     surface_csv, write_pnm)
from .slabdata import SlabRecording

PathLike = Union[str, Path]


@dataclass(frozen=True)
class RenderOptions:
    upscale: int = 10
    colormap: str = WARM_TO_COOL.name
    alpha: float = 0.5


@dataclass
class Analysis:
    slab_id: str
    threshold: ThresholdResult
    global_grid: FrequencyGrid
    low_grid: FrequencyGrid
    binary: BinaryMask
    binary_threshold: float
    cluster: BinaryMask
    model: ClusterModel


def analyze(rec: SlabRecording, cfg: ThresholdConfig = ThresholdConfig(), seed: int = 0) -> Analysis:
    """Global argmax -> adaptive ranges -> low-band argmax -> median mask and k-means map."""
    g = global_frequency_grid(rec)
    thr = adaptive_threshold(g.ravel(), cfg)
    low = low_band_frequency_grid(rec, thr.pair)
    bm, f_thr = binary_mask(low)
    cm, model = cluster_map(low, seed=seed)
    return Analysis(rec.slab_id, thr, g, low, bm, f_thr, cm, model)


@dataclass
class Evaluation:
    slab_id: str
    gtm: GroundTruthMask
    binary: MetricsReport
    cluster: MetricsReport
    roc_csv: str = field(repr=False)


def evaluate(binary: BinaryMask, cluster: BinaryMask, low_grid: FrequencyGrid,
             spec: DefectSpec) -> Evaluation:
    gtm = rasterize_gtm(spec)
    curve, _ = roc_auc(low_grid, gtm)
    return Evaluation(
        spec.slab_id, gtm,
        evaluate_slab(binary, low_grid, gtm),
        evaluate_slab(cluster, low_grid, gtm),
        roc_to_csv(curve),
    )


def _versions() -> dict:
    return {"iedefect": __version__, "numpy": np.__version__, "python": platform.python_version()}


def _range_json(r) -> dict:
    return {"f_start_hz": r.f_start, "f_end_hz": r.f_end, "b_start": r.b_start, "b_end": r.b_end}


def write_analysis(a: Analysis, out: PathLike, render: RenderOptions = RenderOptions(),
                   inputs: Optional[dict] = None, seed: int = 0) -> dict:
    """Write grids, masks, reports and rasters for one analysed slab; return the manifest."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    cmap = COLORMAPS[render.colormap]
    thr = a.threshold
    write_grid(a.global_grid, out / "global_grid.csv")
    write_grid(a.low_grid, out / "low_band_grid.csv")
    write_mask(a.binary, out / "binary_mask.csv")
    write_mask(a.cluster, out / "cluster_mask.csv")
    dump_json(histogram_report(thr.histogram, thr.ranges, thr.pair, thr.config), out / "histogram.json")
    (out / "histogram.csv").write_text(histogram_csv(thr.histogram), encoding="utf-8")
    dump_json({
        "slab_id": a.slab_id,
        "binary_threshold_hz": a.binary_threshold,
        "binary_defect_cells": int(np.sum(a.binary.values == 0)),
        "cluster": a.model.summary(),
    }, out / "detection.json")
    (out / "surface.csv").write_text(surface_csv(a.low_grid), encoding="utf-8")
    write_pnm(heatmap(a.low_grid, cmap, render.upscale), out / "heatmap.ppm")
    write_pnm(heatmap(a.low_grid, cmap, render.upscale, smooth=True), out / "heatmap_smooth.ppm")
    write_pnm(heatmap(a.global_grid, cmap, render.upscale), out / "heatmap_global.ppm")
    write_pnm(mask_raster(a.binary, render.upscale), out / "binary_mask.pgm")
    write_pnm(mask_raster(a.cluster, render.upscale), out / "cluster_map.pgm")
    artifacts = sorted(p.name for p in out.iterdir() if p.name != "manifest.json")
    manifest = {
        "slab_id": a.slab_id,
        "versions": _versions(),
        "inputs": inputs or {},
        "config": {
            "exponent": thr.config.exponent,
            "multiplier": thr.config.multiplier,
            "seed": seed,
            "upscale": render.upscale,
            "colormap": render.colormap,
        },
        "bin_count": thr.histogram.k,
        "ranges": {
            "low": _range_json(thr.pair.low),
            "high": _range_json(thr.pair.high),
            "all": [_range_json(r) for r in thr.ranges],
        },
        "artifacts": {name: sha256_file(out / name) for name in artifacts},
    }
    dump_json(manifest, out / "manifest.json")
    return manifest


def load_analysis_outputs(directory: PathLike) -> tuple[BinaryMask, BinaryMask, FrequencyGrid]:
    d = Path(directory)
    return read_mask(d / "binary_mask.csv"), read_mask(d / "cluster_mask.csv"), read_grid(d / "low_band_grid.csv")


def metrics_json(slab_id: str, m: MetricsReport, mask_type: str) -> dict:
    def val(v):
        return "undefined" if v is None else v

    c = m.confusion
    return {
        "slab_id": slab_id,
        "mask": mask_type,
        "iou": val(m.iou), "precision": val(m.precision), "recall": val(m.recall),
        "f1": val(m.f1), "fnr": val(m.fnr), "fpr": val(m.fpr), "tnr": val(m.tnr),
        "auc_roc": val(m.auc_roc),
        "auc_resolution": "grid",
        "confusion": {"tp": c.tp, "fp": c.fp, "fn": c.fn, "tn": c.tn},
    }


def write_evaluation(ev: Evaluation, binary: BinaryMask, cluster: BinaryMask, out: PathLike,
                     render: RenderOptions = RenderOptions(), inputs: Optional[dict] = None) -> dict:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    dump_json(metrics_json(ev.slab_id, ev.binary, "binary"), out / "metrics_binary.json")
    dump_json(metrics_json(ev.slab_id, ev.cluster, "cluster"), out / "metrics_cluster.json")
    (out / "roc.csv").write_text(ev.roc_csv, encoding="utf-8")
    gtm_px = mask_raster(ev.gtm)
    write_pnm(gtm_px, out / "gtm.pgm")
    H, W = gtm_px.shape
    for name, dm in (("binary", binary), ("cluster", cluster)):
        dm_px = (upsample(dm.values, H, W) * 255).astype(np.uint8)
        write_pnm(overlay(gtm_px, dm_px, render.alpha), out / f"overlay_{name}.ppm")
    names = ["metrics_binary.json", "metrics_cluster.json", "roc.csv", "gtm.pgm",
             "overlay_binary.ppm", "overlay_cluster.ppm"]
    manifest = {
        "slab_id": ev.slab_id,
        "versions": _versions(),
        "inputs": inputs or {},
        "config": {"alpha": render.alpha},
        "artifacts": {n: sha256_file(out / n) for n in names},
    }
    dump_json(manifest, out / "evaluation_manifest.json")
    return manifest
