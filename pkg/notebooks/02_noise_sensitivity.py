# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # How noise erodes the two maps
#
# With clean tones every cell is recovered exactly. Adding white noise
# affects the two passes very differently. The first pass compares a strong
# resonance against noise and stays robust. The second pass only looks
# inside the low band. Intact cells have no energy there, so their
# low-band argmax comes from the tail of the decaying tone plus noise, and
# that drifts as soon as the noise is comparable to the tail.

# %%
import numpy as np

from iedefect.mapping import global_frequency_grid
from iedefect.pipeline import analyze, evaluate
from iedefect.synth import SynthConfig, defect_cells, generate_slab


def run(sigma, seed):
    cfg = SynthConfig(seed=seed, noise_sigma=sigma)
    rec, spec = generate_slab(cfg)
    g = global_frequency_grid(rec).values
    gap = (cfg.defect_band[1] + cfg.intact_band[0]) / 2
    wrong = float(np.mean((g < gap) != defect_cells(cfg)))
    a = analyze(rec)
    ev = evaluate(a.binary, a.cluster, a.low_grid, spec)
    return wrong, ev.binary.f1, ev.cluster.f1


# %%
print(f"{'sigma':>8s} {'pass-1 wrong':>13s} {'binary F1':>10s} {'cluster F1':>11s}")
for sigma in (0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 0.7):
    # an undefined F1 (no true positives at all) becomes nan and is skipped by nanmin
    res = np.array([run(sigma, s) for s in range(1, 9)], dtype=float)
    print(f"{sigma:8g} {res[:, 0].max():13.1%} {np.nanmin(res[:, 1]):10.3f} {np.nanmin(res[:, 2]):11.3f}")

# %% [markdown]
# The pass-1 column stays at or near zero well past the point where both
# F1 columns have collapsed. A small pass-1 error rate therefore does not
# guarantee good maps; the low-band grid of intact cells is the weak link.
