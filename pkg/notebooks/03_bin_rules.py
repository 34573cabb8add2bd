# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Bin-count rules
#
# The histogram uses the mean of an exponential rule and an adjusted
# square-root rule. Both are evaluated in exact integer arithmetic so that
# values like n = 27 with exponent 1.5 (where n ** (2/3) is exactly 9)
# never round the wrong way.

# %%
from iedefect.adaptive import ThresholdConfig, adjusted_sqrt_rule, bin_count, exponential_rule

for n in (1, 8, 27, 100, 252, 1000):
    print(f"n={n:5d} exp={exponential_rule(n):4d} sqrt={adjusted_sqrt_rule(n):4d} k={bin_count(n):4d}")

# %% [markdown]
# Both parameters can be tuned. Larger exponents or smaller multipliers give
# fewer, wider bins, which merges nearby ranges.

# %%
for cfg in (ThresholdConfig(), ThresholdConfig(2.0, 1.5), ThresholdConfig(1.5, 0.5)):
    print(cfg, bin_count(252, cfg))
