"""Maxima of the scenery seen along the walk, and the exceedance point process.

Because a maximum ignores repeats, ``max_{k<=n} xi(S_k)`` is the maximum of
``xi`` over the distinct visited sites. Exceedances are counted over distinct
sites (first visits) for the same reason: counting repeat visits would inflate
the Poisson mean by the local time.

Quenched runs fix one walk and redraw the scenery; annealed runs redraw both.
The target ``exp(-tau q)`` uses an independent range estimate of ``q`` and its
standard error enters every z-score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import stats

from . import _rng
from .scenery import FRECHET1, IID, Dependence, Marginal, SceneryModel, make_scenery, scenery_values, threshold
from .steplaw import StepLaw, make_step_law
from .walk import QEstimate, WalkStats, estimate_q_range, simulate_walk, walk_stats


@lru_cache(maxsize=8)
def _cached_law(alpha: float) -> StepLaw:
    return make_step_law(alpha)


@dataclass(frozen=True)
class ExperimentConfig:
    step_alpha: float = 0.5
    dependence: Dependence = IID()
    marginal: Marginal = FRECHET1
    n: int = 10**4
    tau: float = 1.0
    reps: int = 1000
    mode: str = "annealed"
    master_seed: int = 0
    k_n: int | None = None
    l_n: int | None = None
    q_reps: int = 200
    threads: int = 1
    # test-only override of the step law (e.g. the degenerate +1 law)
    step_law: StepLaw | None = field(default=None, repr=False, compare=False)

    @property
    def law(self) -> StepLaw:
        return self.step_law if self.step_law is not None else _cached_law(float(self.step_alpha))

    @property
    def model(self) -> SceneryModel:
        return make_scenery(self.dependence, self.marginal, self.master_seed)


@dataclass
class ExperimentResult:
    empirical_prob: float
    std_error: float
    target: float
    target_se: float
    q_estimate: QEstimate
    z_score: float
    counts: np.ndarray = field(repr=False)
    maxima: np.ndarray = field(repr=False)
    u_n: float = math.inf
    metadata: dict = field(default_factory=dict)

    @property
    def combined_se(self) -> float:
        return math.hypot(self.std_error, self.target_se)

    @property
    def zero_fraction(self) -> float:
        return float(np.mean(self.counts == 0))

    def record(self) -> dict:
        out = dict(self.metadata)
        out.update(
            empirical_prob=self.empirical_prob,
            std_error=self.std_error,
            target=self.target,
            target_se=self.target_se,
            abs_error=abs(self.empirical_prob - self.target),
            z_score=self.z_score,
            q_hat=self.q_estimate.value,
            q_se=self.q_estimate.std_error,
            mean_count=float(self.counts.mean()),
            u_n=self.u_n,
        )
        return out


def _q_for(config: ExperimentConfig) -> QEstimate:
    law = config.law
    if law.degenerate:
        return QEstimate(1.0, 0.0, "range", config.n, config.q_reps)
    return estimate_q_range(law, config.n, config.q_reps, config.master_seed, config.threads)


def _z(diff: float, se: float) -> float:
    if diff == 0:
        return 0.0
    return diff / se if se > 0 else math.copysign(math.inf, diff)


def _summarize(config: ExperimentConfig, mode: str, tau: float, maxima: np.ndarray, counts: np.ndarray,
               u_n: float, q: QEstimate, extra: dict) -> ExperimentResult:
    below = maxima <= u_n
    reps = maxima.size
    p = float(below.mean())
    se = math.sqrt(p * (1.0 - p) / reps)
    target = math.exp(-tau * q.value)
    target_se = tau * target * q.std_error
    meta = dict(mode=mode, n=config.n, tau=tau, reps=reps, seed=config.master_seed,
                alpha=config.step_alpha if config.step_law is None else "test-law",
                scenery=describe_dependence(config.dependence), marginal=describe_marginal(config.marginal))
    meta.update(extra)
    return ExperimentResult(p, se, target, target_se, q, _z(p - target, math.hypot(se, target_se)),
                            counts, maxima, u_n, meta)


def describe_dependence(dep: Dependence) -> str:
    if isinstance(dep, IID):
        return "iid"
    if hasattr(dep, "weights"):
        return "gaussma:" + ",".join(f"{w:g}" for w in dep.weights)
    return f"movingmax:{dep.m}"


def describe_marginal(marginal: Marginal) -> str:
    return f"pareto:{marginal.theta:g}" if marginal.name == "pareto" else marginal.name


def _tally(values: np.ndarray, levels: Sequence[float]) -> tuple[float, list[int]]:
    mx = float(values.max()) if values.size else -math.inf
    return mx, [int(np.count_nonzero(values > u)) for u in levels]


def _thresholds(model: SceneryModel, n: int, taus: Sequence[float]) -> list[float]:
    return [threshold(model, n, t).u_n for t in taus]


def run_quenched_many(config: ExperimentConfig, taus: Sequence[float], walk_seed: int | None = None,
                      q: QEstimate | None = None) -> list[ExperimentResult]:
    """One walk, ``reps`` scenery redraws, evaluated at several ``tau`` on common random numbers."""
    if config.reps < 100:
        raise ValueError(f"reps must be >= 100, got {config.reps}")
    model = config.model
    seed = config.master_seed if walk_seed is None else walk_seed
    stats_ = walk_stats(simulate_walk(config.law, config.n, seed))
    levels = _thresholds(model, config.n, taus)
    sites = stats_.visited_sites

    def one(i):
        return _tally(scenery_values(model.redraw(i), sites), levels)

    rows = _rng.parallel_map(one, range(config.reps), config.threads)
    maxima = np.array([r[0] for r in rows])
    counts = np.array([r[1] for r in rows], dtype=np.int64).reshape(config.reps, len(levels))
    if q is None:
        q = _q_for(config)
    extra = dict(walk_seed=seed, walk_range=stats_.range)
    return [_summarize(config, "quenched", t, maxima, counts[:, j], levels[j], q, extra)
            for j, t in enumerate(taus)]


def run_annealed_many(config: ExperimentConfig, taus: Sequence[float],
                      q: QEstimate | None = None) -> list[ExperimentResult]:
    """``reps`` fresh (walk, scenery) pairs, evaluated at several ``tau`` on common random numbers."""
    if config.reps < 100:
        raise ValueError(f"reps must be >= 100, got {config.reps}")
    model = config.model
    law = config.law
    levels = _thresholds(model, config.n, taus)

    def one(i):
        st = walk_stats(simulate_walk(law, config.n, config.master_seed,
                                      _rng.generator(config.master_seed, _rng.TAG_WALK, i)))
        return _tally(scenery_values(model.redraw(i), st.visited_sites), levels)

    rows = _rng.parallel_map(one, range(config.reps), config.threads)
    maxima = np.array([r[0] for r in rows])
    counts = np.array([r[1] for r in rows], dtype=np.int64).reshape(config.reps, len(levels))
    if q is None:
        q = _q_for(config)
    return [_summarize(config, "annealed", t, maxima, counts[:, j], levels[j], q, {})
            for j, t in enumerate(taus)]


def run_quenched(config: ExperimentConfig) -> ExperimentResult:
    """Probability that the maximum along one fixed walk stays below ``u_n``."""
    return run_quenched_many(config, [config.tau])[0]


def run_annealed(config: ExperimentConfig) -> ExperimentResult:
    return run_annealed_many(config, [config.tau])[0]


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    if config.mode == "quenched":
        return run_quenched(config)
    if config.mode == "annealed":
        return run_annealed(config)
    raise ValueError(f"mode must be 'quenched' or 'annealed', got {config.mode!r}")


def sweep(config: ExperimentConfig, n_grid: Sequence[int]) -> list[ExperimentResult]:
    """The same experiment at each ``n`` of the grid (same master seed)."""
    from dataclasses import replace

    return [run_experiment(replace(config, n=int(n))) for n in n_grid]


def quenched_average(config: ExperimentConfig, walk_seeds: Sequence[int]) -> tuple[float, float]:
    """Mean over walks of quenched probabilities, with its standard error.

    The spread between walks is part of the error, so the standard error comes
    from the between-walk sample variance.
    """
    q = _q_for(config)
    probs = np.array([run_quenched_many(config, [config.tau], walk_seed=s, q=q)[0].empirical_prob
                      for s in walk_seeds])
    return float(probs.mean()), float(probs.std(ddof=1) / math.sqrt(probs.size))


# --------------------------------------------------------------------------
# exceedance point process


@dataclass
class ExceedancePoints:
    """Points ``(tau_k / n, (xi(S_{tau_k}) - b) / a)`` with ``(a, b)`` the norming at ``floor(q n)``."""

    points: np.ndarray  # (R_n, 2)
    norming: tuple[float, float]
    level: float  # u_n on the normalized scale
    count_over_threshold: int


def exceedance_points(model: SceneryModel, walk: WalkStats, n: int, tau: float,
                      q_estimate: QEstimate) -> ExceedancePoints:
    if walk.n != n:
        raise ValueError(f"walk has length {walk.n}, expected n={n}")
    u_n = threshold(model, n, tau).u_n
    values = scenery_values(model, walk.visited_sites)
    a, b = model.marginal.norming(math.floor(q_estimate.value * n))
    pts = np.column_stack([walk.distinct_visit_times / n, (values - b) / a])
    return ExceedancePoints(pts, (a, b), (u_n - b) / a, int(np.count_nonzero(values > u_n)))


# --------------------------------------------------------------------------
# Poisson goodness of fit


def _merge_cells(expected: np.ndarray, observed: np.ndarray, minimum: float = 5.0):
    exp_cells = list(expected)
    obs_cells = list(observed)
    # fold the right tail inwards, then the left
    while len(exp_cells) > 1 and exp_cells[-1] < minimum:
        e, o = exp_cells.pop(), obs_cells.pop()
        exp_cells[-1] += e
        obs_cells[-1] += o
    while len(exp_cells) > 1 and exp_cells[0] < minimum:
        e, o = exp_cells.pop(0), obs_cells.pop(0)
        exp_cells[0] += e
        obs_cells[0] += o
    return np.array(exp_cells), np.array(obs_cells)


def poisson_gof(counts, mean: float) -> float:
    """Chi-square p-value of integer ``counts`` against Poisson(``mean``).

    Cells are ``0, 1, ..., K-1`` and ``>= K``; edge cells are merged until every
    expected count is at least 5. ``mean`` is taken as known, so the degrees of
    freedom are ``cells - 1``.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if counts.size == 0:
        raise ValueError("counts must be nonempty")
    if not mean > 0:
        raise ValueError(f"mean must be > 0, got {mean}")
    N = counts.size
    top = int(max(counts.max(), stats.poisson.isf(1e-12, mean))) + 1
    k = np.arange(top)
    probs = stats.poisson.pmf(k, mean)
    probs = np.append(probs, stats.poisson.sf(top - 1, mean))
    observed = np.append(np.bincount(counts, minlength=top)[:top], 0)
    expected, observed = _merge_cells(N * probs, observed.astype(np.float64))
    if expected.size < 2:
        raise ValueError("degenerate input: fewer than two cells with expected count >= 5")
    stat = float(np.sum((observed - expected) ** 2 / expected))
    return float(stats.chi2.sf(stat, expected.size - 1))
