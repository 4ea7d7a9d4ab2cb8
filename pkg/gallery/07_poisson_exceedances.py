"""
Exceedances form a Poisson count
================================

Counting distinct visited sites above ``u_n`` gives, in the limit, a Poisson
variable with mean ``tau q``. Clustered sceneries break this.
"""

import numpy as np

from rwrs import ExperimentConfig, MovingMax, poisson_gof, run_annealed

for label, cfg in (
    ("iid", ExperimentConfig(n=10**4, reps=2000, master_seed=11)),
    ("moving max", ExperimentConfig(n=10**4, reps=2000, master_seed=11, dependence=MovingMax(1))),
):
    r = run_annealed(cfg)
    mean = r.q_estimate.value
    print(f"{label:>10}: count histogram {np.bincount(r.counts)[:6].tolist()}  "
          f"mean {r.counts.mean():.3f} vs tau q {mean:.3f}  GOF p={poisson_gof(r.counts, mean):.3g}")
