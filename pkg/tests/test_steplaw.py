import math

import numpy as np
import pytest
from scipy import stats

from rwrs import make_step_law, sample_step, sample_steps, self_similarity_check, step_pmf, tail_probability
from rwrs import _rng
from rwrs.steplaw import _sample_tail, ks_critical_value

# zeta(1.5) and 1/(2 zeta(1.5)) from a 30-digit evaluation, frozen
ZETA_1_5 = 2.612375348685488
NORMALIZER_0_5 = 0.19139669199971328


def zeta_oracle(s: float, terms: int = 10**6) -> float:
    """Partial sum plus Euler-Maclaurin remainder, independent of scipy."""
    k = np.arange(terms, 0, -1, dtype=np.float64)
    head = float(np.sum(k**-s))
    N = float(terms)
    return head + N ** (1 - s) / (s - 1) - 0.5 * N**-s + s / 12 * N ** (-s - 1)


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_normalizer_matches_partial_sum_oracle(alpha):
    law = make_step_law(alpha)
    assert law.normalizer == pytest.approx(1 / (2 * zeta_oracle(1 + alpha)), rel=1e-12)


def test_normalizer_reference_value(law):
    assert zeta_oracle(1.5) == pytest.approx(ZETA_1_5, rel=1e-13)
    assert law.normalizer == pytest.approx(NORMALIZER_0_5, rel=1e-12)
    assert round(law.normalizer, 5) == 0.19140


@pytest.mark.parametrize("alpha", [1.2, 1.0, 0.0, -0.5, float("nan")])
def test_alpha_outside_unit_interval_rejected(alpha):
    with pytest.raises(ValueError, match="alpha must lie in"):
        make_step_law(alpha)


def test_pmf_values(law):
    assert step_pmf(law, 0) == 0.0
    assert step_pmf(law, 1) == pytest.approx(NORMALIZER_0_5, rel=1e-12)
    assert step_pmf(law, 4) == pytest.approx(step_pmf(law, 1) / 8, rel=1e-14)
    assert step_pmf(law, 3) == step_pmf(law, -3)


def test_pmf_symmetric_exactly(law):
    k = np.arange(1, 10**4 + 1)
    assert np.array_equal(step_pmf(law, k), step_pmf(law, -k))


def test_normalization_with_tail_remainder(law):
    k = np.arange(10**6, 0, -1)
    head = 2 * float(np.sum(step_pmf(law, k)))
    assert head + tail_probability(law, 10**6) == pytest.approx(1.0, abs=1e-10)
    # tail probability against the same independent oracle
    tail = 2 * law.normalizer * (zeta_oracle(1.5) - float(np.sum(np.arange(1000, 0, -1.0) ** -1.5)))
    assert tail_probability(law, 1000) == pytest.approx(tail, rel=1e-9)


def test_tail_probability_beyond_cutoff_is_continuous(law):
    K = law.tail_cutoff
    lo, hi = tail_probability(law, K), tail_probability(law, K + 1)
    assert hi == pytest.approx(lo - 2 * step_pmf(law, K + 1), rel=1e-10)


def test_log_pmf_slope(law):
    k = np.logspace(2, 5, 50).astype(np.int64)
    slope = np.polyfit(np.log(k), np.log(step_pmf(law, k)), 1)[0]
    assert slope == pytest.approx(-1.5, abs=1e-6)


def test_frequency_of_one_and_sign_balance(law):
    x = sample_steps(law, _rng.generator(11), 10**6)
    p1 = step_pmf(law, 1)
    se = math.sqrt(p1 * (1 - p1) / x.size)
    assert abs(np.mean(x == 1) - p1) < 4 * se
    assert abs(np.mean(np.sign(x))) < 4 / math.sqrt(x.size)
    assert not np.any(x == 0)


def test_same_seed_same_draws(law):
    a = sample_steps(law, _rng.generator(5), 1000)
    b = sample_steps(law, _rng.generator(5), 1000)
    assert np.array_equal(a, b)
    assert isinstance(sample_step(law, _rng.generator(5)), int)


def test_tail_sampler_matches_conditional_tail_law(law):
    K = law.tail_cutoff
    m = _sample_tail(law, _rng.generator(3), 200_000)
    assert m.min() > K
    edges = [K + 1, K + 50, K + 500, 2 * K, 4 * K, 16 * K, 256 * K, 2**40]
    obs = [np.count_nonzero((m >= a) & (m < b)) for a, b in zip(edges, edges[1:])]
    obs.append(np.count_nonzero(m >= edges[-1]))
    base = tail_probability(law, K)
    probs = [(tail_probability(law, a - 1) - tail_probability(law, b - 1)) / base for a, b in zip(edges, edges[1:])]
    probs.append(tail_probability(law, edges[-1] - 1) / base)
    assert sum(probs) == pytest.approx(1.0, abs=1e-12)
    res = stats.chisquare(obs, np.array(probs) * m.size)
    assert res.pvalue > 0.001


def test_self_similarity_identical_lengths_give_zero(law):
    assert self_similarity_check(law, 1000, 1000, 200, seed=1) == 0.0


def test_self_similarity_requires_reps(law):
    with pytest.raises(ValueError):
        self_similarity_check(law, 100, 1000, 50, seed=1)


def test_ks_critical_value_matches_kolmogorov_limit():
    assert ks_critical_value(2000, 2000) == pytest.approx(stats.kstwobign.isf(0.01) * math.sqrt(2 / 2000), rel=1e-3)
