import math

import numpy as np
import pytest
from scipy import integrate, special

from rwrs import (
    FRECHET1,
    IID,
    GaussMA,
    MovingMax,
    default_schedule,
    dprime_limit,
    dprime_statistic,
    make_scenery,
    make_schedule,
    validate_schedule,
)

IID_MODEL = make_scenery(IID(), FRECHET1, 0)
GAUSS = make_scenery(GaussMA((0.6, 0.8)), FRECHET1, 0)
MOVMAX = make_scenery(MovingMax(1), FRECHET1, 0)


def gauss_joint_tail(r, p):
    """P(X > z, Y > z) for a standard bivariate normal with correlation r, z = Phi^-1(1 - p), by quadrature."""
    z = -special.ndtri(p)
    s = math.sqrt(1 - r * r)
    f = lambda x: math.exp(-x * x / 2) / math.sqrt(2 * math.pi) * special.ndtr(-(z - r * x) / s)  # noqa: E731
    val, _ = integrate.quad(f, z, z + 40, epsabs=0, epsrel=1e-12, limit=200)
    return val


def moving_max_joint_tail(u):
    return 1 - 2 * math.exp(-1 / u) + math.exp(-3 / (2 * u))


def test_default_schedule_examples():
    s = default_schedule(IID_MODEL, 10**4)
    assert (s.k_n, s.l_n, s.r_n) == (100, 10, 102)
    g3 = make_scenery(GaussMA((0.5, 0.5, 0.5, 0.5)), FRECHET1, 0)
    assert default_schedule(g3, 10**4).l_n == 10
    assert default_schedule(make_scenery(MovingMax(12), FRECHET1, 0), 10**4).l_n == 13
    assert make_schedule(10**4, 100, 5, m=3).alpha_at_l == 0.0
    assert make_schedule(10**4, 100, 3, m=3).alpha_at_l == 1.0


def test_schedule_preconditions():
    with pytest.raises(ValueError):
        make_schedule(1000, 1, 5)
    with pytest.raises(ValueError):
        make_schedule(1000, 10, 0)
    with pytest.raises(ValueError):
        default_schedule(IID_MODEL, 50)


def test_default_schedule_passes_on_grid():
    grid = [10**3, 10**4, 10**5]
    report = validate_schedule(None, grid, IID_MODEL)
    assert report.passed
    expected = [math.floor(n**0.5) * math.floor(n**0.25) / n for n in grid]
    assert report["k_n l_n = o(n)"].values == pytest.approx(expected, rel=1e-15)
    assert report["k_n l_n = o(n)"].values == pytest.approx([0.155, 0.1, 0.05372], rel=1e-12)
    assert {r["constraint"] for r in report.rows()} == {c.constraint for c in report.checks}
    assert len(report.rows()) == 9


def test_constant_block_count_fails():
    report = validate_schedule(lambda n: make_schedule(n, 2, 1), [10**3, 10**4, 10**5])
    assert not report["k_n -> inf"].passed
    assert not report.passed


def test_half_width_stripes_fail():
    report = validate_schedule(lambda n: make_schedule(n, math.isqrt(n), n // 2), [10**3, 10**4, 10**5])
    assert not report["k_n l_n = o(n)"].passed


def test_mixing_term_fails_when_stripes_too_narrow():
    report = validate_schedule(lambda n: make_schedule(n, math.isqrt(n), 1, m=1), [10**3, 10**4, 10**5])
    assert not report["n^2/k_n alpha(n,l_n) -> 0"].passed


def test_grid_precondition():
    with pytest.raises(ValueError):
        validate_schedule(None, [1000, 10000], IID_MODEL)


def test_iid_statistic_is_product_of_tails():
    n = 10**4
    d = dprime_statistic(IID_MODEL, n, make_schedule(n, 100, 10), tau=1.0)
    assert d.value == pytest.approx(0.01, rel=1e-12)
    for n, tau in [(10**3, 0.5), (10**5, 2.0), (12345, 3.0)]:
        s = default_schedule(IID_MODEL, n)
        assert dprime_statistic(IID_MODEL, n, s, tau).value == pytest.approx(tau**2 * (n // s.k_n) / n, rel=1e-12)


@pytest.mark.parametrize("n", [10**3, 10**4, 10**5, 10**6])
def test_moving_max_statistic_closed_form(n):
    s = default_schedule(MOVMAX, n)
    u = -1 / math.log1p(-1 / n)
    expected = n * (moving_max_joint_tail(u) + (n // s.k_n - 1) / n**2)
    d = dprime_statistic(MOVMAX, n, s, tau=1.0)
    assert d.method == "analytic" and not d.fallback
    assert d.value == pytest.approx(expected, rel=1e-6)


def test_moving_max_statistic_tends_to_half():
    n = 10**6
    d = dprime_statistic(MOVMAX, n, default_schedule(MOVMAX, n), tau=1.0)
    assert abs(d.value - 0.5) < 0.05 * 0.5
    assert dprime_limit(MOVMAX, 1.0) == 0.5
    assert dprime_limit(make_scenery(MovingMax(3), FRECHET1, 0), 2.0) == 3.0
    assert dprime_limit(GAUSS, 1.0) == 0.0


def test_moving_max_monte_carlo_matches_analytic():
    n = 1000
    s = default_schedule(MOVMAX, n)
    a = dprime_statistic(MOVMAX, n, s, tau=1.0)
    mc = dprime_statistic(MOVMAX, n, s, tau=1.0, method="montecarlo", reps=10**6, seed=3)
    assert abs(mc.value - a.value) < 4 * mc.std_error


def test_gauss_statistic_falls_back_and_matches_quadrature():
    values = []
    for n in (10**3, 10**4, 10**5):
        s = default_schedule(GAUSS, n)
        d = dprime_statistic(GAUSS, n, s, tau=1.0, seed=1)
        assert d.fallback and d.method == "montecarlo"
        oracle_in = n * gauss_joint_tail(0.48, 1.0 / n)
        assert abs(d.in_window - oracle_in) < 4 * d.std_error
        assert d.beyond_window == pytest.approx(n * (n // s.k_n - 1) / n**2, rel=1e-12)
        assert d.value == pytest.approx(d.in_window + d.beyond_window, rel=1e-15)
        values.append(d.value)
    assert values[0] > values[1] > values[2]
    assert values[2] < 0.05


def test_statistic_preconditions():
    s = default_schedule(IID_MODEL, 1000)
    with pytest.raises(ValueError):
        dprime_statistic(IID_MODEL, 1000, s, tau=0.0)
    with pytest.raises(ValueError):
        dprime_statistic(IID_MODEL, 2000, s, tau=1.0)
    with pytest.raises(ValueError):
        dprime_statistic(IID_MODEL, 1000, s, tau=1.0, method="quadrature")
