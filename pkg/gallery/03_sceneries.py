"""
Stationary sceneries and exact thresholds
=========================================

A scenery assigns a random value to every integer site. Values are generated on
demand from a counter-based hash, so sites can be queried in any order.
"""

import numpy as np

from rwrs import EXPONENTIAL1, FRECHET1, IID, GaussMA, MovingMax, make_scenery, pareto, scenery_values, threshold
from rwrs.scenery import moving_average

sites = np.arange(-3, 4)
for dep in (IID(), GaussMA((0.6, 0.8)), MovingMax(1)):
    model = make_scenery(dep, FRECHET1, master_seed=7)
    print(f"{type(dep).__name__:>9}:", np.round(scenery_values(model, sites), 3).tolist())

# %%
# Random access: a shuffled query returns the same values.
model = make_scenery(GaussMA((0.6, 0.8)), FRECHET1, master_seed=7)
idx = np.random.default_rng(0).permutation(sites.size)
assert np.array_equal(scenery_values(model, sites[idx]), scenery_values(model, sites)[idx])

# %%
# The Gaussian moving average has lag-1 correlation 0.6 * 0.8 = 0.48 and none beyond.
g = moving_average(model, np.arange(10**5))
print("lag correlations:", [round(float(np.corrcoef(g[:-j], g[j:])[0, 1]), 3) for j in (1, 2, 3)])

# %%
# Thresholds solve ``n P(xi > u_n) = tau`` exactly.
for marginal in (FRECHET1, pareto(2.0), EXPONENTIAL1):
    u = threshold(make_scenery(IID(), marginal, 0), 10**4, 1.0).u_n
    print(f"{marginal.name:>12}: u_n = {u:.4f},  n * P(xi > u_n) = {1e4 * float(marginal.survival(u)):.12f}")
