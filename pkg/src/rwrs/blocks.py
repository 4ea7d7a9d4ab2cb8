"""Blocks and stripes over the visited-site set, and Monte Carlo checks of the block lemmas.

The distinct visited sites are sorted by position and cut into ``K_n = R_n // r_n + 1``
consecutive blocks of ``r_n`` sites; the last block keeps the remainder and may
be empty. The stripe of a block is its ``l_n`` largest sites. The last stripe is
empty when the last block has fewer than ``l_n`` sites.

Removing the stripes leaves a gap wider than ``l_n`` between consecutive
trimmed blocks, which is what lets the mixing bound at lag ``l_n`` decouple
them.

The diagnostics hold the walk fixed and redraw only the scenery. All block
probabilities and joint probabilities come from the same redraws, and standard
errors use the influence function of each statistic (delta method with the
covariances included).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _rng
from .conditions import MixingSchedule
from .scenery import SceneryModel, scenery_values, threshold
from .walk import QEstimate, WalkStats


@dataclass(frozen=True)
class BlockDecomposition:
    sorted_sites: np.ndarray
    r_n: int
    l_n: int
    k_n: int
    K_n: int
    starts: np.ndarray  # block j covers sorted_sites[starts[j]:stops[j]]
    stops: np.ndarray
    in_stripe: np.ndarray  # mask over sorted_sites

    @property
    def R_n(self) -> int:
        return int(self.sorted_sites.size)

    @property
    def blocks(self) -> list[np.ndarray]:
        return [self.sorted_sites[a:b] for a, b in zip(self.starts, self.stops)]

    @property
    def stripes(self) -> list[np.ndarray]:
        return [self.sorted_sites[a:b][self.in_stripe[a:b]] for a, b in zip(self.starts, self.stops)]

    @property
    def trimmed_blocks(self) -> list[np.ndarray]:
        return [self.sorted_sites[a:b][~self.in_stripe[a:b]] for a, b in zip(self.starts, self.stops)]

    @property
    def block_sizes(self) -> np.ndarray:
        return self.stops - self.starts


def decompose_sites(sites, schedule: MixingSchedule) -> BlockDecomposition:
    sorted_sites = np.unique(np.asarray(sites, dtype=np.int64))
    R = sorted_sites.size
    if R < 1:
        raise ValueError("need at least one visited site")
    r, l = schedule.r_n, schedule.l_n
    K = R // r + 1
    starts = np.arange(K, dtype=np.int64) * r
    stops = np.minimum(starts + r, R)
    stops[-1] = R
    in_stripe = np.zeros(R, dtype=bool)
    for j, (a, b) in enumerate(zip(starts, stops)):
        size = b - a
        if j == K - 1 and size < l:
            continue
        in_stripe[max(a, b - l):b] = True
    return BlockDecomposition(sorted_sites, r, l, schedule.k_n, K, starts, stops, in_stripe)


def decompose(stats: WalkStats, schedule: MixingSchedule) -> BlockDecomposition:
    """Blocks and stripes of the visited sites of a walk.

    When ``r_n > R_n`` there is a single block holding every site.
    """
    return decompose_sites(stats.visited_sites, schedule)


def check_structure(dec: BlockDecomposition) -> list[str]:
    """Names of violated structural invariants (empty when the decomposition is sound)."""
    bad = []
    blocks = dec.blocks
    stripes = dec.stripes
    trimmed = dec.trimmed_blocks
    R, r, l, K = dec.R_n, dec.r_n, dec.l_n, dec.K_n
    if K != R // r + 1 or len(blocks) != K:
        bad.append("K_n = R_n // r_n + 1")
    if K > dec.k_n:
        bad.append("K_n <= k_n")
    union = np.concatenate(blocks) if blocks else np.empty(0, np.int64)
    if not np.array_equal(union, dec.sorted_sites):
        bad.append("blocks partition the sites")
    if any(b.size != r for b in blocks[:-1]) or blocks[-1].size != R - (K - 1) * r:
        bad.append("block sizes")
    for a, b in zip(blocks, blocks[1:]):
        if a.size and b.size and not a.max() < b.min():
            bad.append("max B_j < min B_j+1")
            break
    for j, (b, s) in enumerate(zip(blocks, stripes)):
        if j == K - 1 and b.size < l:
            want = b[:0]
        else:
            want = b[max(0, b.size - l):]
        if not np.array_equal(s, want):
            bad.append("stripe = l_n largest sites of its block")
            break
    nonempty = [t for t in trimmed if t.size]
    for a, b in zip(nonempty, nonempty[1:]):
        if not b.min() - a.max() > l:
            bad.append("gap between trimmed blocks > l_n")
            break
    return bad


@dataclass(frozen=True)
class BlockTallies:
    """Per-replication indicators of ``max <= u_n`` over the site groups of a decomposition."""

    whole: np.ndarray  # (reps,) over all sites
    trimmed_whole: np.ndarray  # (reps,) over sites outside the stripes
    block: np.ndarray  # (reps, K_n)
    trimmed_block: np.ndarray  # (reps, K_n)
    u_n: float


def block_tallies(model: SceneryModel, dec: BlockDecomposition, n: int, tau: float, reps: int,
                  seed: int, batch: int = 64) -> BlockTallies:
    u_n = threshold(model, n, tau).u_n
    R, K = dec.R_n, dec.K_n
    whole = np.empty(reps, dtype=bool)
    twhole = np.empty(reps, dtype=bool)
    blk = np.empty((reps, K), dtype=bool)
    tblk = np.empty((reps, K), dtype=bool)
    keep = ~dec.in_stripe
    for lo, hi in _rng.chunk_ranges(reps, max(1, min(batch, 4_000_000 // max(R, 1)))):
        exceed = np.empty((hi - lo, R), dtype=bool)
        for i in range(lo, hi):
            exceed[i - lo] = scenery_values(model.redraw(_rng.TAG_LEMMA, seed, i), dec.sorted_sites) > u_n
        texceed = exceed & keep
        c = np.zeros((hi - lo, R + 1), dtype=np.int32)
        np.cumsum(exceed, axis=1, out=c[:, 1:])
        tc = np.zeros((hi - lo, R + 1), dtype=np.int32)
        np.cumsum(texceed, axis=1, out=tc[:, 1:])
        blk[lo:hi] = (c[:, dec.stops] - c[:, dec.starts]) == 0
        tblk[lo:hi] = (tc[:, dec.stops] - tc[:, dec.starts]) == 0
        whole[lo:hi] = c[:, -1] == 0
        twhole[lo:hi] = tc[:, -1] == 0
    return BlockTallies(whole, twhole, blk, tblk, u_n)


def _product_influence(ind: np.ndarray) -> tuple[float, np.ndarray]:
    """Product of block means and the per-replication influence of that product."""
    p = ind.mean(axis=0)
    prod = float(np.prod(p))
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, (ind - p) / np.where(p > 0, p, 1.0), 0.0)
    return prod, prod * terms.sum(axis=1)


def _se(psi: np.ndarray) -> float:
    return float(psi.std(ddof=1) / math.sqrt(psi.size)) if psi.size > 1 else 0.0


@dataclass(frozen=True)
class Lemma1Result:
    d_i: float
    d_ii: float
    d_iii: float
    se_i: float
    se_ii: float
    se_iii: float
    p_whole: float
    p_trimmed: float
    prod_trimmed_blocks: float
    prod_blocks: float


@dataclass(frozen=True)
class Lemma2Result:
    product: float
    product_se: float
    target: float
    target_se: float

    @property
    def combined_se(self) -> float:
        return math.hypot(self.product_se, self.target_se)

    @property
    def z_score(self) -> float:
        diff = self.product - self.target
        if diff == 0:
            return 0.0
        return diff / self.combined_se if self.combined_se > 0 else math.copysign(math.inf, diff)


def lemma1_from_tallies(t: BlockTallies) -> Lemma1Result:
    a = t.whole.astype(np.float64)
    at = t.trimmed_whole.astype(np.float64)
    P, Pt = a.mean(), at.mean()
    prod, psi_b = _product_influence(t.block.astype(np.float64))
    prod_t, psi_tb = _product_influence(t.trimmed_block.astype(np.float64))
    return Lemma1Result(
        d_i=abs(P - Pt),
        d_ii=abs(Pt - prod_t),
        d_iii=abs(prod_t - prod),
        se_i=_se(a - at),
        se_ii=_se((at - Pt) - psi_tb),
        se_iii=_se(psi_tb - psi_b),
        p_whole=float(P),
        p_trimmed=float(Pt),
        prod_trimmed_blocks=prod_t,
        prod_blocks=prod,
    )


def lemma2_from_tallies(t: BlockTallies, tau: float, q: QEstimate) -> Lemma2Result:
    prod, psi = _product_influence(t.block.astype(np.float64))
    target = math.exp(-tau * q.value)
    return Lemma2Result(prod, _se(psi), target, tau * target * q.std_error)


def lemma1_diagnostic(model: SceneryModel, walk: WalkStats, schedule: MixingSchedule, tau: float,
                      reps: int, seed: int) -> Lemma1Result:
    """Effect of removing the stripes, and of factorizing over trimmed blocks.

    ``d_i``: whole set vs whole set minus stripes; ``d_ii``: trimmed set vs the
    product over trimmed blocks; ``d_iii``: product over trimmed blocks vs
    product over full blocks.
    """
    if reps < 500:
        raise ValueError(f"reps must be >= 500, got {reps}")
    dec = decompose(walk, schedule)
    return lemma1_from_tallies(block_tallies(model, dec, walk.n, tau, reps, seed))


def lemma2_diagnostic(model: SceneryModel, walk: WalkStats, schedule: MixingSchedule, tau: float,
                      reps: int, seed: int, q: QEstimate) -> Lemma2Result:
    """Product of block probabilities ``prod_j P(M_{B_j} <= u_n)`` against ``exp(-tau q)``."""
    if reps < 500:
        raise ValueError(f"reps must be >= 500, got {reps}")
    dec = decompose(walk, schedule)
    return lemma2_from_tallies(block_tallies(model, dec, walk.n, tau, reps, seed), tau, q)
