"""
Block schedules and the anti-clustering statistic
=================================================

The schedule ``(k_n, l_n)`` must grow so that ``k_n l_n / n -> 0`` and the
mixing term vanishes. The anti-clustering statistic separates sceneries whose
exceedances come alone from those that come in clusters.
"""

from rwrs import FRECHET1, IID, GaussMA, MovingMax, default_schedule, dprime_statistic, make_scenery, validate_schedule

iid = make_scenery(IID(), FRECHET1, 0)
for row in validate_schedule(None, [10**3, 10**4, 10**5], iid).rows():
    print(row)

# %%
# IID and Gaussian moving average: the statistic shrinks. Moving maxima: it stays near tau/2.
for dep in (IID(), GaussMA((0.6, 0.8)), MovingMax(1)):
    model = make_scenery(dep, FRECHET1, 0)
    vals = [dprime_statistic(model, n, default_schedule(model, n), 1.0, seed=1) for n in (10**3, 10**4, 10**5)]
    print(f"{type(dep).__name__:>9}:", [round(v.value, 4) for v in vals], vals[0].method)
