"""Random walk paths, their range, and two estimators of the no-return probability q."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from . import _rng
from .steplaw import StepLaw, sample_steps


@dataclass(frozen=True)
class WalkRealization:
    """Path ``S_1..S_n`` (``S_0 = 0`` is implicit)."""

    positions: np.ndarray
    seed: int | None = None

    @property
    def n(self) -> int:
        return int(self.positions.size)


@dataclass(frozen=True)
class WalkStats:
    """Distinct-visit structure of a path.

    ``visited_sites[k]`` is the site first reached at time
    ``distinct_visit_times[k]`` (1-based), so both arrays are in first-visit
    order and ``distinct_visit_times`` is strictly increasing.
    """

    n: int
    range: int
    distinct_visit_times: np.ndarray
    visited_sites: np.ndarray
    returned_to_origin: bool

    @property
    def sorted_sites(self) -> np.ndarray:
        return np.sort(self.visited_sites)


@dataclass(frozen=True)
class QEstimate:
    value: float
    std_error: float
    method: str
    n_or_horizon: int
    reps: int


def simulate_walk(law: StepLaw, n: int, seed: int, rng: np.random.Generator | None = None) -> WalkRealization:
    """Simulate ``n`` steps. Positions are int64 with wrap-around arithmetic.

    Wrap-around only matters after a jump of order 2**62, which lands the walk
    on fresh sites either way.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if rng is None:
        rng = _rng.generator(seed, _rng.TAG_WALK)
    steps = sample_steps(law, rng, n)
    return WalkRealization(np.cumsum(steps), seed)


def walk_stats(walk: WalkRealization) -> WalkStats:
    pos = walk.positions
    # hash-based first-occurrence mask, a single pass over the path
    first = ~pd.Series(pos, copy=False).duplicated().to_numpy()
    times = np.flatnonzero(first) + 1
    return WalkStats(
        n=int(pos.size),
        range=int(times.size),
        distinct_visit_times=times,
        visited_sites=pos[first],
        returned_to_origin=bool((pos == 0).any()),
    )


def _check(n: int, reps: int, what: str) -> None:
    if n < 1000:
        raise ValueError(f"{what} must be >= 1000, got {n}")
    if reps < 2:
        raise ValueError(f"reps must be >= 2, got {reps}")


def range_fractions(law: StepLaw, n: int, reps: int, seed: int, threads: int = 1) -> np.ndarray:
    """``R_n / n`` for ``reps`` independent walks; replication ``i`` uses stream ``(seed, Q_RANGE, i)``."""

    def one(i):
        rng = _rng.generator(seed, _rng.TAG_Q_RANGE, i)
        return walk_stats(simulate_walk(law, n, seed, rng)).range / n

    return np.array(_rng.parallel_map(one, range(reps), threads))


def estimate_q_range(law: StepLaw, n: int, reps: int, seed: int, threads: int = 1) -> QEstimate:
    """Mean of ``R_n / n`` over independent walks, the range route to q."""
    _check(n, reps, "n")
    r = range_fractions(law, n, reps, seed, threads)
    return QEstimate(float(r.mean()), float(r.std(ddof=1) / math.sqrt(reps)), "range", n, reps)


def first_return_time(law: StepLaw, horizon: int, rng: np.random.Generator) -> int:
    """First ``k <= horizon`` with ``S_k = 0``, or 0 if the walk avoids the origin up to ``horizon``.

    The path is generated in doubling chunks (capped) so that walks that
    return early stop early. Chunk sizes never depend on ``horizon``: the
    path prefix is the same whatever horizon is asked for.
    """
    if law.degenerate:
        return 0
    pos = np.int64(0)
    done = 0
    size = 256
    while done < horizon:
        path = pos + np.cumsum(sample_steps(law, rng, size))
        hits = np.flatnonzero(path == 0)
        if hits.size and done + int(hits[0]) < horizon:
            return done + int(hits[0]) + 1
        pos = path[-1]
        done += size
        size = min(2 * size, 1 << 15)
    return 0


def first_return_times(law: StepLaw, horizon: int, reps: int, seed: int, threads: int = 1) -> np.ndarray:
    def one(i):
        return first_return_time(law, horizon, _rng.generator(seed, _rng.TAG_Q_SURVIVAL, i))

    return np.array(_rng.parallel_map(one, range(reps), threads), dtype=np.int64)


def survival_from_returns(returns: np.ndarray, horizon: int) -> QEstimate:
    """Survival estimate at ``horizon`` from first-return times simulated to any longer horizon."""
    alive = (returns == 0) | (returns > horizon)
    reps = returns.size
    p = float(alive.mean())
    return QEstimate(p, math.sqrt(p * (1.0 - p) / reps), "survival", horizon, reps)


def estimate_q_survival(law: StepLaw, horizon: int, reps: int, seed: int, threads: int = 1) -> QEstimate:
    """Fraction of walks that avoid the origin for ``horizon`` steps.

    This overestimates q (a walk may still return later) and is nonincreasing
    in ``horizon`` on common seeds. Replication ``i`` uses the stream
    ``(seed, Q_SURVIVAL, i)``, and a walk's first ``h`` steps do not depend on
    the horizon, so estimates at two horizons are nested event by event.
    """
    _check(horizon, reps, "horizon")
    return survival_from_returns(first_return_times(law, horizon, reps, seed, threads), horizon)
