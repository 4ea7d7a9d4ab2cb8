"""
Blocks and stripes over the visited sites
=========================================

Sorted visited sites are cut into blocks of ``r_n`` sites. Removing the
``l_n`` largest sites of each block (its stripe) leaves gaps wider than ``l_n``,
which decouples the blocks of an m-dependent scenery.
"""

from rwrs import FRECHET1, GaussMA, IID, decompose, default_schedule, estimate_q_range, lemma1_diagnostic
from rwrs import lemma2_diagnostic, make_scenery, make_step_law, simulate_walk, walk_stats
from rwrs.blocks import check_structure

law = make_step_law(0.5)
n = 10**4
walk = walk_stats(simulate_walk(law, n, seed=8))
model = make_scenery(GaussMA((0.6, 0.8)), FRECHET1, 8)
sched = default_schedule(model, n)
dec = decompose(walk, sched)
print(f"R_n={dec.R_n} r_n={dec.r_n} l_n={dec.l_n} K_n={dec.K_n} (k_n={dec.k_n})")
print("first block sizes:", dec.block_sizes[:5].tolist(), " last:", int(dec.block_sizes[-1]))
print("structural violations:", check_structure(dec))

# %%
# Monte Carlo over scenery redraws on this fixed walk.
q = estimate_q_range(law, n, 100, seed=8)
for dep in (IID(), GaussMA((0.6, 0.8))):
    m = make_scenery(dep, FRECHET1, 8)
    r1 = lemma1_diagnostic(m, walk, default_schedule(m, n), 1.0, reps=2000, seed=9)
    r2 = lemma2_diagnostic(m, walk, default_schedule(m, n), 1.0, reps=2000, seed=9, q=q)
    print(f"{type(dep).__name__:>7}: d_i={r1.d_i:.4f} d_ii={r1.d_ii:.4f} d_iii={r1.d_iii:.4f}  "
          f"product={r2.product:.4f} target={r2.target:.4f} z={r2.z_score:+.2f}")
