"""Symmetric integer step law in the domain of attraction of an alpha-stable law.

The law puts mass ``c * |k| ** -(1 + alpha)`` on every nonzero integer ``k``,
with ``c = 1 / (2 * zeta(1 + alpha))``. For ``0 < alpha < 1`` the walk built
from these steps is transient.

Sampling is exact. The magnitude ``|X|`` is drawn by inverse CDF on a cached
table over ``1..tail_cutoff``; above the cutoff it is drawn by rejection from
the floor of a continuous Pareto variable, whose pmf dominates the target up to
a constant computed in closed form. A fair sign is attached afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from . import _rng

DEFAULT_TAIL_CUTOFF = 2**20
_FAST_TABLE = 4096
_GUIDE_BUCKETS = 1 << 16
# magnitudes at or beyond this are not representable once summed in int64;
# they are replaced by a uniformly placed far site (see _huge_magnitudes)
_HUGE = 2.0**62


@dataclass(frozen=True)
class StepLaw:
    """Step distribution with pmf ``normalizer * |k| ** -(1 + alpha)`` on ``k != 0``.

    ``survival`` holds ``P(|X| > k)`` for ``k = 1..tail_cutoff``; it is cached
    at construction and shared read-only between threads.
    """

    alpha: float
    normalizer: float
    tail_cutoff: int = DEFAULT_TAIL_CUTOFF
    survival: np.ndarray = field(repr=False, compare=False, default=None)
    degenerate: bool = field(default=False, repr=False)
    guide: np.ndarray = field(repr=False, compare=False, default=None)
    cdf: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def zeta(self) -> float:
        return 1.0 / (2.0 * self.normalizer)

    def pmf(self, k):
        return step_pmf(self, k)


def make_step_law(alpha: float, tail_cutoff: int = DEFAULT_TAIL_CUTOFF) -> StepLaw:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(
            f"alpha must lie in (0,1) (transient regime), got {alpha}"
        )
    if tail_cutoff < _FAST_TABLE:
        raise ValueError(f"tail_cutoff must be at least {_FAST_TABLE}")
    z = float(special.zeta(1.0 + alpha))
    k = np.arange(2, tail_cutoff + 2, dtype=np.float64)
    # P(|X| > k) = zeta(1+alpha, k+1) / zeta(1+alpha)
    survival = special.zeta(1.0 + alpha, k) / z
    survival.setflags(write=False)
    cdf = 1.0 - survival
    cdf.setflags(write=False)
    # guide[b] = #{k : P(|X| <= k) <= b / B}, a lower bound for the inverse at any w >= b / B
    guide = np.searchsorted(cdf[:_FAST_TABLE], np.arange(_GUIDE_BUCKETS) / _GUIDE_BUCKETS, side="right")
    guide.setflags(write=False)
    return StepLaw(alpha, 1.0 / (2.0 * z), int(tail_cutoff), survival, guide=guide, cdf=cdf)


def _plus_one_law() -> StepLaw:
    """Degenerate law X = +1 almost surely. Test-only: exact q = 1 and R_n = n."""
    return StepLaw(alpha=float("nan"), normalizer=float("nan"), tail_cutoff=1, degenerate=True)


def step_pmf(law: StepLaw, k):
    """``P(X = k)``; scalar in, float out, array in, array out."""
    k_arr = np.asarray(k)
    if law.degenerate:
        out = (k_arr == 1).astype(np.float64)
    else:
        a = np.abs(k_arr).astype(np.float64)
        with np.errstate(divide="ignore"):
            out = np.where(a > 0, law.normalizer * a ** -(1.0 + law.alpha), 0.0)
    return float(out) if np.ndim(out) == 0 else out


def tail_probability(law: StepLaw, k: int) -> float:
    """``P(|X| > k)`` for ``k >= 0``."""
    if k <= 0:
        return 1.0
    if k <= law.tail_cutoff:
        return float(law.survival[k - 1])
    return float(special.zeta(1.0 + law.alpha, k + 1.0) / law.zeta)


def _delta(law: StepLaw, k: np.ndarray) -> np.ndarray:
    # k^-a - (k+1)^-a, evaluated without cancellation
    a = law.alpha
    return -(k ** -a) * np.expm1(-a * np.log1p(1.0 / k))


def _huge_magnitudes(rng: np.random.Generator, size: int) -> np.ndarray:
    return (np.int64(1) << np.int64(62)) + rng.integers(0, 2**62, size=size, dtype=np.int64)


def _sample_tail(law: StepLaw, rng: np.random.Generator, size: int) -> np.ndarray:
    a = law.alpha
    m = float(law.tail_cutoff + 1)
    bound = m ** -(1.0 + a) / _delta(law, np.array([m]))[0]
    out = np.empty(size, dtype=np.int64)
    filled = 0
    while filled < size:
        need = size - filled
        v = 1.0 - rng.random(need)
        log_y = math.log(m) - np.log(v) / a
        y = np.exp(np.minimum(log_y, math.log(_HUGE)))
        k = np.floor(y)
        huge = k >= _HUGE
        ratio = np.empty(need)
        small = ~huge
        ks = k[small]
        ratio[small] = ks ** -(1.0 + a) / _delta(law, ks)
        # limit of the ratio as k grows
        ratio[huge] = 1.0 / a
        accept = rng.random(need) * bound < ratio
        got = k[accept].astype(np.int64)
        got_huge = huge[accept]
        if got_huge.any():
            got[got_huge] = _huge_magnitudes(rng, int(got_huge.sum()))
        out[filled:filled + got.size] = got
        filled += got.size
    return out


def _magnitudes_from_uniform(law: StepLaw, w: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # cdf[i] = P(|X| <= i + 1); the answer is #{i : cdf[i] <= w} + 1
    cdf = law.cdf
    idx = law.guide[(w * _GUIDE_BUCKETS).astype(np.intp)]
    step = cdf[idx] <= w
    idx += step
    todo = np.flatnonzero(step)
    slow = todo[w[todo] >= cdf[_FAST_TABLE - 1]]
    todo = todo[w[todo] < cdf[_FAST_TABLE - 1]]
    while todo.size:
        todo = todo[cdf[idx[todo]] <= w[todo]]
        idx[todo] += 1
    if slow.size:
        idx[slow] = np.searchsorted(cdf, w[slow], side="right")
    mags = idx.astype(np.int64) + 1
    tail = np.flatnonzero(idx == law.tail_cutoff)
    if tail.size:
        mags[tail] = _sample_tail(law, rng, tail.size)
    return mags


def sample_magnitudes(law: StepLaw, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` values of ``|X|`` as int64."""
    if law.degenerate:
        return np.ones(size, dtype=np.int64)
    return _magnitudes_from_uniform(law, rng.random(size), rng)


def sample_steps(law: StepLaw, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` i.i.d. steps as an int64 array.

    One raw 64-bit word per step: the top 53 bits give the uniform for the
    magnitude, the lowest bit gives the sign.
    """
    if law.degenerate:
        return np.ones(size, dtype=np.int64)
    raw = rng.bit_generator.random_raw(size)
    w = (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53
    mags = _magnitudes_from_uniform(law, w, rng)
    neg = (raw & np.uint64(1)).astype(bool)
    np.negative(mags, out=mags, where=neg)
    return mags


def sample_step(law: StepLaw, rng: np.random.Generator) -> int:
    return int(sample_steps(law, rng, 1)[0])


def scaled_endpoints(law: StepLaw, n: int, reps: int, seed: int) -> np.ndarray:
    """Samples of ``n ** (-1/alpha) * S_n``; the stream is keyed by ``(seed, n)``."""
    rng = _rng.generator(seed, _rng.TAG_SELF_SIMILARITY, n)
    out = np.empty(reps)
    batch = max(1, 2_000_000 // n)
    for lo, hi in _rng.chunk_ranges(reps, batch):
        steps = sample_steps(law, rng, (hi - lo) * n).reshape(hi - lo, n)
        # float sums: only the scaled value is needed, and it must not wrap
        out[lo:hi] = steps.astype(np.float64).sum(axis=1)
    return out * float(n) ** (-1.0 / law.alpha)


def self_similarity_check(law: StepLaw, n1: int, n2: int, reps: int, seed: int) -> float:
    """Two-sample KS distance between rescaled sums at two walk lengths.

    A small distance is evidence that ``n ** (-1/alpha) * S_n`` has settled on
    its stable limit; the limit law itself is never evaluated.
    """
    if reps < 100:
        raise ValueError(f"reps must be at least 100, got {reps}")
    if n1 > n2 or n1 < 1:
        raise ValueError(f"need 1 <= n1 <= n2, got n1={n1}, n2={n2}")
    a = scaled_endpoints(law, n1, reps, seed)
    b = scaled_endpoints(law, n2, reps, seed)
    return float(stats.ks_2samp(a, b).statistic)


def ks_critical_value(m: int, n: int, level: float = 0.01) -> float:
    """Asymptotic two-sample KS critical value ``c(level) * sqrt((m + n) / (m n))``."""
    c = math.sqrt(-0.5 * math.log(level / 2.0))
    return c * math.sqrt((m + n) / (m * n))
