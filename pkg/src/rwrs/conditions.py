"""Mixing schedules and the anti-clustering statistic for the shipped sceneries.

A :class:`MixingSchedule` fixes, for one ``n``, the number of blocks ``k_n``,
the stripe width ``l_n``, the block size ``r_n = n // (k_n - 1) + 1`` and an
upper bound on the mixing coefficient at lag ``l``. For the m-dependent models
shipped here the bound is exactly 0 beyond lag ``m``.

The schedule has to satisfy, along ``n``::

    k_n -> inf,   k_n * l_n = o(n),   n**2 / k_n * alpha(n, l_n) -> 0

and the anti-clustering statistic ``n * sum_{j=1}^{n // k_n} P(xi(0) > u_n, xi(j) > u_n)``
must vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from . import _rng
from .scenery import GaussMA, MovingMax, SceneryModel, scenery_survival, threshold


def _m_dependent_bound(m: int) -> Callable[[int, int], float]:
    def bound(n: int, l: int) -> float:
        return 0.0 if l > m else 1.0

    return bound


@dataclass(frozen=True)
class MixingSchedule:
    n: int
    k_n: int
    l_n: int
    r_n: int
    alpha_bound: Callable[[int, int], float] = field(repr=False, compare=False)

    @property
    def alpha_at_l(self) -> float:
        return float(self.alpha_bound(self.n, self.l_n))


def make_schedule(n: int, k_n: int, l_n: int, alpha_bound: Callable[[int, int], float] | None = None,
                  m: int = 0) -> MixingSchedule:
    """Schedule with explicit ``k_n`` and ``l_n``; ``r_n`` follows from ``n`` and ``k_n``."""
    n, k_n, l_n = int(n), int(k_n), int(l_n)
    if k_n < 2:
        raise ValueError(f"k_n must be >= 2 (r_n divides by k_n - 1), got {k_n}")
    if l_n < 1:
        raise ValueError(f"l_n must be >= 1, got {l_n}")
    if alpha_bound is None:
        alpha_bound = _m_dependent_bound(m)
    return MixingSchedule(n, k_n, l_n, n // (k_n - 1) + 1, alpha_bound)


def default_schedule(model: SceneryModel, n: int) -> MixingSchedule:
    """``k_n = floor(sqrt(n))``, ``l_n = max(m + 1, floor(n ** 0.25))``."""
    if n < 100:
        raise ValueError(f"default schedule needs n >= 100, got {n}")
    k = math.isqrt(n)
    l = max(model.m + 1, math.isqrt(k))  # isqrt(isqrt(n)) == floor(n ** 0.25)
    return make_schedule(n, k, l, m=model.m)


# --------------------------------------------------------------------------
# schedule validation


@dataclass
class ConstraintCheck:
    constraint: str
    n_grid: list[int]
    values: list[float]
    passed: bool


@dataclass
class ScheduleReport:
    checks: list[ConstraintCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> ConstraintCheck:
        for c in self.checks:
            if c.constraint == name:
                return c
        raise KeyError(name)

    def rows(self) -> list[dict]:
        return [
            {"n": n, "constraint": c.constraint, "value": v, "pass": c.passed}
            for c in self.checks
            for n, v in zip(c.n_grid, c.values)
        ]


def _decreasing_to_zero(values: Sequence[float]) -> bool:
    v = np.asarray(values, dtype=np.float64)
    nonincreasing = bool(np.all(np.diff(v) <= 0))
    return bool(nonincreasing and (v[-1] < v[0] or v[-1] == 0.0))


def validate_schedule(rule: Callable[[int], MixingSchedule] | None, n_grid: Sequence[int],
                      model: SceneryModel | None = None) -> ScheduleReport:
    """Check the growth constraints of a schedule rule on a finite grid of ``n``.

    ``rule`` maps ``n`` to a schedule; ``None`` means ``default_schedule(model, n)``.
    The checks are trend checks: a finite grid cannot prove a limit.
    """
    grid = [int(n) for n in n_grid]
    if len(grid) < 3 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("n_grid must be increasing with at least 3 points")
    if rule is None:
        if model is None:
            raise ValueError("either a schedule rule or a scenery model is required")
        rule = lambda n: default_schedule(model, n)  # noqa: E731
    scheds = [rule(n) for n in grid]
    k = [s.k_n for s in scheds]
    kl = [s.k_n * s.l_n / s.n for s in scheds]
    mix = [s.n**2 / s.k_n * s.alpha_at_l for s in scheds]
    checks = [
        ConstraintCheck("k_n -> inf", grid, [float(x) for x in k], all(b > a for a, b in zip(k, k[1:]))),
        ConstraintCheck("k_n l_n = o(n)", grid, kl, _decreasing_to_zero(kl)),
        ConstraintCheck("n^2/k_n alpha(n,l_n) -> 0", grid, mix, _decreasing_to_zero(mix)),
    ]
    return ScheduleReport(checks)


# --------------------------------------------------------------------------
# anti-clustering statistic


@dataclass(frozen=True)
class DPrimeResult:
    """``value = in_window + beyond_window``.

    ``in_window`` covers lags ``1..min(m, n // k_n)``, ``beyond_window`` the
    remaining lags where sites are independent and the joint tail is ``(tau/n)**2``.
    """

    value: float
    std_error: float
    in_window: float
    beyond_window: float
    method: str
    fallback: bool
    n: int
    lags: int


def _joint_tail_moving_max(m: int, lag: int, p: float) -> float:
    # P(xi0 > u, xij > u) = 2p - 1 + P(Z_0..Z_{m+lag} <= u), union window of m+1+lag base variables
    inv_u = -math.log1p(-p)
    return 2.0 * p + math.expm1(-(m + 1 + lag) / (m + 1) * inv_u)


def _joint_tail_gauss_mc(r: float, p: float, reps: int, rng: np.random.Generator) -> tuple[float, float]:
    """``P(X > z, Y > z)`` for a standard bivariate normal pair with correlation ``r``.

    Paired draws with the first coordinate sampled from its tail beyond ``z``
    and weighted by ``p = P(X > z)``.
    """
    z = -special.ndtri(p)
    x = -special.ndtri(p * (1.0 - rng.random(reps)))
    y = r * x + math.sqrt(1.0 - r * r) * rng.standard_normal(reps)
    hit = y > z
    est = p * hit.mean()
    se = p * hit.std(ddof=1) / math.sqrt(reps) if reps > 1 else 0.0
    return float(est), float(se)


def _joint_tail_scenery_mc(model: SceneryModel, lag: int, p: float, reps: int, seed: int) -> tuple[float, float]:
    """Plain Monte Carlo from the scenery itself: pairs of sites far apart from each other."""
    spacing = model.m + lag + 1
    model = model.redraw(_rng.TAG_DPRIME, seed, lag)
    left = np.arange(reps, dtype=np.int64) * spacing
    hit = (scenery_survival(model, left) < p) & (scenery_survival(model, left + lag) < p)
    est = float(hit.mean())
    se = float(hit.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    return est, se


def dprime_statistic(model: SceneryModel, n: int, schedule: MixingSchedule, tau: float,
                     method: str = "analytic", reps: int = 10**6, seed: int = 0) -> DPrimeResult:
    if tau <= 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    if method not in ("analytic", "montecarlo"):
        raise ValueError(f"method must be 'analytic' or 'montecarlo', got {method!r}")
    if schedule.n != n:
        raise ValueError(f"schedule was built for n={schedule.n}, not n={n}")
    threshold(model, n, tau)
    p = tau / n
    lags = n // schedule.k_n
    dep = model.dependence
    window = min(dep.m, lags)
    beyond = n * (lags - window) * p * p

    fallback = False
    used = method
    if method == "analytic" and isinstance(dep, GaussMA):
        fallback = True
        used = "montecarlo"

    joint, var = 0.0, 0.0
    for j in range(1, window + 1):
        if used == "analytic":
            est, se = _joint_tail_moving_max(dep.m, j, p), 0.0
        elif isinstance(dep, GaussMA):
            est, se = _joint_tail_gauss_mc(dep.autocorrelation(j), p, reps,
                                           _rng.generator(seed, _rng.TAG_DPRIME, j))
        else:
            est, se = _joint_tail_scenery_mc(model, j, p, reps, seed)
        joint += est
        var += se * se
    in_window = n * joint
    return DPrimeResult(in_window + beyond, n * math.sqrt(var), in_window, beyond, used, fallback, n, lags)


def dprime_limit(model: SceneryModel, tau: float) -> float:
    """Large-``n`` limit of the statistic: 0 under anti-clustering, ``tau * m / 2`` for moving maxima."""
    if isinstance(model.dependence, MovingMax):
        return tau * model.m / 2.0
    return 0.0
