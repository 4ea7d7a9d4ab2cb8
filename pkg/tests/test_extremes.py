import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rwrs import (
    EXPONENTIAL1,
    FRECHET1,
    IID,
    ExperimentConfig,
    GaussMA,
    MovingMax,
    exceedance_points,
    make_scenery,
    poisson_gof,
    run_annealed,
    run_experiment,
    run_quenched,
    scenery_values,
    simulate_walk,
    sweep,
    threshold,
    walk_stats,
)
from rwrs.extremes import quenched_average, run_annealed_many, run_quenched_many
from rwrs.walk import QEstimate, WalkRealization


def config(**kw):
    base = dict(step_alpha=0.5, n=10**4, tau=1.0, reps=400, master_seed=3, q_reps=50)
    base.update(kw)
    return ExperimentConfig(**base)


@pytest.mark.parametrize("mode", ["quenched", "annealed"])
def test_zero_tau_never_exceeds(mode):
    r = run_experiment(config(tau=0.0, mode=mode, reps=100))
    assert r.empirical_prob == 1.0 and r.target == 1.0
    assert r.z_score == 0.0
    assert not r.counts.any()


def test_mode_and_reps_preconditions():
    with pytest.raises(ValueError):
        run_experiment(config(mode="sideways"))
    with pytest.raises(ValueError):
        run_quenched(config(reps=99))
    with pytest.raises(ValueError):
        run_annealed(config(reps=99))


def test_degenerate_walk_recovers_classical_limit(plus_one):
    r = run_quenched(config(step_law=plus_one, reps=2000))
    assert r.q_estimate.value == 1.0 and r.q_estimate.std_error == 0.0
    assert r.target == pytest.approx(math.exp(-1), rel=1e-15)
    assert abs(r.empirical_prob - math.exp(-1)) < 3 * r.std_error


@given(positions=st.lists(st.integers(-30, 30), min_size=1, max_size=300), seed=st.integers(0, 1000))
@settings(max_examples=100, deadline=None)
def test_maximum_over_path_equals_maximum_over_distinct_sites(positions, seed):
    model = make_scenery(GaussMA((0.6, 0.8)), EXPONENTIAL1, seed)
    pos = np.asarray(positions, dtype=np.int64)
    streaming = -np.inf
    for s in pos:
        streaming = max(streaming, float(scenery_values(model, [s])[0]))
    sites = walk_stats(WalkRealization(pos)).visited_sites
    assert streaming == float(scenery_values(model, sites).max())


@pytest.mark.parametrize("runner", [run_quenched_many, run_annealed_many], ids=["quenched", "annealed"])
def test_probability_nonincreasing_in_tau_and_zero_count_identity(runner):
    results = runner(config(), [0.0, 0.25, 0.5, 1.0, 2.0, 4.0])
    probs = [r.empirical_prob for r in results]
    assert all(b <= a for a, b in zip(probs, probs[1:]))
    for r in results:
        assert 0.0 <= r.empirical_prob <= 1.0
        assert r.zero_fraction == r.empirical_prob
        assert math.isfinite(r.z_score)
        assert np.array_equal(r.counts == 0, r.maxima <= r.u_n)


def test_results_do_not_depend_on_threads():
    a = run_annealed(config(reps=200, threads=1))
    b = run_annealed(config(reps=200, threads=3))
    assert np.array_equal(a.maxima, b.maxima) and a.record() == b.record()


def test_quenched_average_agrees_with_annealed():
    cfg = config(reps=500, q_reps=100)
    mean, se = quenched_average(cfg, walk_seeds=range(100, 120))
    ann = run_annealed(replace(cfg, reps=4000))
    assert abs(mean - ann.empirical_prob) < 3 * math.hypot(se, ann.std_error)


def test_mean_exceedance_count_matches_tau_q():
    r = run_annealed(config(reps=2000, q_reps=200))
    mean = r.counts.mean()
    se = math.hypot(r.counts.std(ddof=1) / math.sqrt(r.counts.size), r.q_estimate.std_error)
    assert abs(mean - r.q_estimate.value) < 3 * se


def test_sweep_one_result_per_n():
    out = sweep(config(reps=100), [1000, 2000, 4000])
    assert [r.metadata["n"] for r in out] == [1000, 2000, 4000]


def test_exceedance_points_degenerate_walk(plus_one):
    n = 5000
    model = make_scenery(IID(), FRECHET1, 8)
    walk = walk_stats(simulate_walk(plus_one, n, 0))
    ep = exceedance_points(model, walk, n, 1.0, QEstimate(1.0, 0.0, "range", n, 1))
    assert ep.norming == (float(n), 0.0)
    assert np.array_equal(ep.points[:, 0], np.arange(1, n + 1) / n)
    assert np.allclose(ep.points[:, 1], scenery_values(model, np.arange(1, n + 1)) / n, rtol=1e-15)
    u_n = threshold(model, n, 1.0).u_n
    assert ep.level == pytest.approx(u_n / n)
    assert ep.count_over_threshold == int(np.count_nonzero(ep.points[:, 1] > ep.level))


def test_exceedance_points_on_transient_walk(law):
    n = 10**4
    model = make_scenery(GaussMA((0.6, 0.8)), FRECHET1, 9)
    walk = walk_stats(simulate_walk(law, n, 4))
    q = QEstimate(0.8, 0.0, "range", n, 1)
    ep = exceedance_points(model, walk, n, 2.0, q)
    t = ep.points[:, 0]
    assert t.min() > 0 and t.max() <= 1 and np.all(np.diff(t) > 0)
    values = scenery_values(model, walk.visited_sites)
    u_n = threshold(model, n, 2.0).u_n
    assert ep.count_over_threshold == int(np.count_nonzero(values > u_n))
    assert (ep.count_over_threshold == 0) == (values.max() <= u_n)
    with pytest.raises(ValueError):
        exceedance_points(model, walk, n + 1, 2.0, q)


def test_poisson_gof_calibrated_on_poisson_samples():
    rng = np.random.default_rng(2024)
    passes = sum(poisson_gof(rng.poisson(1.0, 10**4), 1.0) > 0.01 for _ in range(100))
    assert passes >= 98


def test_poisson_gof_rejects_gross_misfit():
    assert poisson_gof(np.zeros(1000, dtype=int), 5.0) < 1e-6
    rng = np.random.default_rng(1)
    assert poisson_gof(rng.poisson(1.5, 5000), 1.0) < 1e-6


def test_poisson_gof_degenerate_input():
    with pytest.raises(ValueError):
        poisson_gof([7] * 10, 7.0)
    with pytest.raises(ValueError):
        poisson_gof([], 1.0)
    with pytest.raises(ValueError):
        poisson_gof([1, 2], 0.0)


@pytest.mark.slow
def test_moving_max_clusters_raise_probability(law):
    r = run_annealed(config(dependence=MovingMax(1), reps=2000, q_reps=200, n=10**4))
    assert r.z_score > 3
