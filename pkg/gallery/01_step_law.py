"""
A heavy-tailed integer step law
===============================

Steps take values in Z minus the origin with probability proportional to
``|k| ** -(1 + alpha)``. For ``alpha < 1`` the walk built from them is transient.
"""

import numpy as np

from rwrs import make_step_law, sample_steps, self_similarity_check, step_pmf, tail_probability
from rwrs import _rng

# %%
# The normalizing constant comes from the Riemann zeta function.
law = make_step_law(0.5)
print(f"c = {law.normalizer:.6f},  P(X = 1) = {step_pmf(law, 1):.6f},  P(X = 4) = {step_pmf(law, 4):.6f}")

# %%
# Tail probabilities fall off like ``k ** -alpha``.
for k in (10, 1000, 10**5, 10**7):
    print(f"P(|X| > {k:>8}) = {tail_probability(law, k):.3e}   k^alpha * tail = {k**0.5 * tail_probability(law, k):.4f}")

# %%
# Sampling: inverse CDF on a table for small magnitudes, exact rejection beyond it.
x = sample_steps(law, _rng.generator(1), 10**6)
for k in (1, 2, 3, 10):
    print(f"k={k:>2}: empirical {np.mean(np.abs(x) == k):.5f}  exact {2 * step_pmf(law, k):.5f}")
print(f"largest |step| in a million draws: {np.abs(x).max():.3e}")

# %%
# ``n ** (-1/alpha) S_n`` settles on a stable law. Compare n = 10^3 with n = 10^4.
print(f"KS distance between rescaled sums: {self_similarity_check(law, 1000, 10000, 2000, seed=3):.4f}")
