"""Stationary random sceneries on the integer line.

A scenery is never stored. The value at a site is a pure function of
``(key, site)``: base variables come from a counter-based hash, so any subset of
sites can be evaluated in any order and the answers agree with a full sweep.

All transforms run in survival space (``p = P(xi > x)``) so that values far in
the upper tail keep full relative precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np
from scipy import special

from . import _rng

# counter-hash stream tags
_U = 11
_G = 12
_Z = 13


@dataclass(frozen=True)
class Marginal:
    """One of ``frechet1``, ``pareto`` (with ``theta``), ``exponential1``."""

    name: str
    theta: float = 1.0

    def __post_init__(self):
        if self.name not in ("frechet1", "pareto", "exponential1"):
            raise ValueError(f"unknown marginal family {self.name!r}")
        if self.name == "pareto" and not self.theta > 0:
            raise ValueError(f"pareto theta must be > 0, got {self.theta}")

    @property
    def lower(self) -> float:
        return {"frechet1": 0.0, "pareto": 1.0, "exponential1": 0.0}[self.name]

    def in_support(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        if self.name == "frechet1":
            return u > 0
        return u >= self.lower

    def survival(self, u):
        u = np.asarray(u, dtype=np.float64)
        if self.name == "frechet1":
            with np.errstate(divide="ignore"):
                out = -np.expm1(-1.0 / u)
        elif self.name == "pareto":
            out = u ** -self.theta
        else:
            out = np.exp(-u)
        return out

    def isf(self, p):
        """Inverse survival function: the ``x`` with ``P(xi > x) = p``."""
        p = np.asarray(p, dtype=np.float64)
        with np.errstate(divide="ignore"):
            if self.name == "frechet1":
                return -1.0 / np.log1p(-p)
            if self.name == "pareto":
                return p ** (-1.0 / self.theta)
            return -np.log(p)

    def quantile(self, p):
        return self.isf(1.0 - np.asarray(p, dtype=np.float64))

    def norming(self, n: int) -> tuple[float, float]:
        """Classical ``(a_n, b_n)`` so that ``(max - b_n) / a_n`` has a nondegenerate limit."""
        n = max(int(n), 1)
        if self.name == "frechet1":
            return float(n), 0.0
        if self.name == "pareto":
            return float(n) ** (1.0 / self.theta), 0.0
        return 1.0, math.log(n)


FRECHET1 = Marginal("frechet1")
EXPONENTIAL1 = Marginal("exponential1")


def pareto(theta: float) -> Marginal:
    return Marginal("pareto", float(theta))


@dataclass(frozen=True)
class IID:
    @property
    def m(self) -> int:
        return 0


@dataclass(frozen=True)
class GaussMA:
    """Gaussian moving average ``sum_j w_j G_{k+j}``, ``j = 0..m``, mapped to the marginal."""

    weights: tuple[float, ...]

    @property
    def m(self) -> int:
        return len(self.weights) - 1

    def autocorrelation(self, lag: int) -> float:
        w = np.asarray(self.weights)
        lag = abs(int(lag))
        if lag > self.m:
            return 0.0
        return float(np.dot(w[: w.size - lag], w[lag:]))


@dataclass(frozen=True)
class MovingMax:
    """``xi(k) = max(Z_k, ..., Z_{k+m})`` with Frechet base variables of scale ``1/(m+1)``."""

    m: int


Dependence = Union[IID, GaussMA, MovingMax]


@dataclass(frozen=True)
class SceneryModel:
    dependence: Dependence
    marginal: Marginal
    master_seed: int
    key: int = field(default=None, repr=False)

    def __post_init__(self):
        if self.key is None:
            object.__setattr__(self, "key", _rng.derive_key(self.master_seed, _rng.TAG_SCENERY))

    @property
    def m(self) -> int:
        return self.dependence.m

    def redraw(self, *path: int) -> "SceneryModel":
        """Same model, independent realization indexed by ``path``."""
        return replace(self, key=_rng.derive_key(self.master_seed, _rng.TAG_SCENERY, *path))


@dataclass(frozen=True)
class ThresholdSpec:
    n: int
    tau: float
    u_n: float


def make_scenery(dependence: Dependence, marginal: Marginal, master_seed: int) -> SceneryModel:
    if isinstance(dependence, GaussMA):
        w = np.asarray(dependence.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 2:
            raise ValueError("GaussMA needs m >= 1, i.e. at least two weights")
        norm = float(np.sum(w**2))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"GaussMA weights must have unit square norm, got {norm}")
        w = w / math.sqrt(norm)
        dependence = GaussMA(tuple(float(x) for x in w))
        if abs(dependence.autocorrelation(1)) >= 1.0:
            raise ValueError("GaussMA lag-1 correlation has modulus 1 (degenerate sequence)")
    elif isinstance(dependence, MovingMax):
        if int(dependence.m) < 1:
            raise ValueError(f"MovingMax needs m >= 1, got {dependence.m}")
        if marginal.name != "frechet1":
            raise ValueError(
                f"unsupported combination: MovingMax requires the frechet1 marginal, got {marginal.name}"
            )
        dependence = MovingMax(int(dependence.m))
    elif not isinstance(dependence, IID):
        raise TypeError(f"unknown dependence structure {dependence!r}")
    return SceneryModel(dependence, marginal, int(master_seed))


def _uniform(key: int, tag: int, sites: np.ndarray) -> np.ndarray:
    return _rng.counter_uniform(key, tag, sites)


def latent_gaussian(model: SceneryModel, sites) -> np.ndarray:
    """The standard normal base field ``G_k`` used by GaussMA sceneries."""
    return special.ndtri(_uniform(model.key, _G, np.asarray(sites, dtype=np.int64)))


def moving_average(model: SceneryModel, sites) -> np.ndarray:
    """Latent moving average ``sum_j w_j G_{k+j}`` (unit variance)."""
    sites = np.asarray(sites, dtype=np.int64)
    out = np.zeros(sites.shape)
    for j, w in enumerate(model.dependence.weights):
        out += w * latent_gaussian(model, sites + j)
    return out


def scenery_survival(model: SceneryModel, sites) -> np.ndarray:
    """``P(xi > x)`` evaluated at the realized values; uniform on (0, 1) at each site."""
    sites = np.asarray(sites, dtype=np.int64)
    dep = model.dependence
    if isinstance(dep, IID):
        return _uniform(model.key, _U, sites)
    if isinstance(dep, GaussMA):
        return special.ndtr(-moving_average(model, sites))
    return model.marginal.survival(scenery_values(model, sites))


def scenery_values(model: SceneryModel, sites) -> np.ndarray:
    """``xi(site)`` for an array of sites."""
    sites = np.asarray(sites, dtype=np.int64)
    dep = model.dependence
    if isinstance(dep, MovingMax):
        out = np.zeros(sites.shape)
        for j in range(dep.m + 1):
            u = _uniform(model.key, _Z, sites + j)
            np.maximum(out, -1.0 / ((dep.m + 1) * np.log1p(-u)), out=out)
        return out
    return model.marginal.isf(scenery_survival(model, sites))


def scenery_value(model: SceneryModel, site: int) -> float:
    return float(scenery_values(model, np.array([site]))[0])


def marginal_tail(model: SceneryModel, u: float) -> float:
    """Exact ``P(xi > u)``."""
    if not bool(model.marginal.in_support(u)):
        raise ValueError(f"u={u} lies outside the support of {model.marginal.name}")
    return float(model.marginal.survival(u))


def threshold(model: SceneryModel, n: int, tau: float) -> ThresholdSpec:
    """``u_n`` with ``n * P(xi > u_n) = tau`` exactly; ``tau = 0`` gives ``u_n = inf``.

    ``n`` is normally a walk length but any real ``n >= 1`` is accepted.
    """
    tau = float(tau)
    if not n >= 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= tau < n:
        raise ValueError(f"tau must satisfy 0 <= tau < n, got tau={tau}, n={n}")
    if tau == 0.0:
        return ThresholdSpec(n, tau, math.inf)
    u = float(model.marginal.isf(tau / n))
    got = n * float(model.marginal.survival(u))
    if abs(got - tau) > 1e-9 * tau:
        raise ArithmeticError(f"threshold inversion lost precision: n*P(xi>u_n)={got}, tau={tau}")
    return ThresholdSpec(n, tau, u)
