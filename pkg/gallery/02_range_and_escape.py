"""
Range of the walk and the escape probability
============================================

``q`` is the probability of never returning to the origin. It can be read off
the range, ``R_n / n -> q``, or estimated directly from first-return times.
"""

from rwrs import estimate_q_range, estimate_q_survival, make_step_law, simulate_walk, walk_stats

law = make_step_law(0.5)

# %%
# One path and its distinct sites.
stats = walk_stats(simulate_walk(law, 20, seed=4))
print("sites in first-visit order:", stats.visited_sites.tolist())
print("first-visit times:         ", stats.distinct_visit_times.tolist())
print("range:", stats.range, " returned to 0:", stats.returned_to_origin)

# %%
# Two estimators of q. The survival route is biased upward at a finite horizon.
# Survival estimates share their walks across horizons, so they can only go down with n;
# late returns are rare (about 1/h beyond horizon h), hence the flat column.
for n in (10**3, 10**4, 10**5):
    r = estimate_q_range(law, n, 100, seed=5)
    s = estimate_q_survival(law, n, 2000, seed=5)
    print(f"n={n:>6}: range {r.value:.4f} +- {r.std_error:.4f}   survival {s.value:.4f} +- {s.std_error:.4f}")

# %%
# Heavier tails escape more easily.
for alpha in (0.2, 0.5, 0.8):
    print(f"alpha={alpha}: q ~ {estimate_q_range(make_step_law(alpha), 10**4, 50, seed=6).value:.3f}")
