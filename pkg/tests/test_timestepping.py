import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssplab.errors import NonFiniteState
from ssplab.experiments import observed_order
from ssplab.problems import GridConfig, advection_upwind_first_order
from ssplab.tableau import ButcherTableau, family_tableau, make_named
from ssplab.timestepping import OdeSystem, integrate, minimum_value, rk_step, step_times, total_variation

DECAY = OdeSystem(1, lambda t, u: -u, name="decay")
# u' = u^2 - t u + 1 has no closed form; use the Riccati u' = u^2, u(0) = 1/2, u = 1/(2 - t)
RICCATI = OdeSystem(1, lambda t, u: u * u, name="riccati")
# non-autonomous: u' = cos(t) u, u = exp(sin t)
NONAUTONOMOUS = OdeSystem(1, lambda t, u: np.cos(t) * u, name="nonautonomous")


def errors_at(tab, system, u0, T, exact, ns):
    return [abs(integrate(tab, system, u0, 0.0, T, T / n, store_every=None).final[0] - exact) for n in ns]


@given(st.floats(0.0, 5.0), st.floats(0.01, 3.0), st.floats(1e-3, 0.7))
def test_step_times_land_on_final_time(t0, span, dt):
    times = step_times(t0, t0 + span, dt)
    assert times[0] == t0 and times[-1] == t0 + span
    steps = np.diff(times)
    # differences of stored times carry roundoff of order ulp(t)
    assert np.all(steps > 0) and np.all(steps <= dt + 8 * np.spacing(t0 + span))


def test_exact_multiple_has_no_sliver_step():
    times = step_times(0.0, 1.0, 0.1)
    assert len(times) == 11
    assert np.diff(times).min() > 0.099


def test_forward_euler_step():
    fe = ButcherTableau([[0.0]], [1.0])
    out = rk_step(fe, lambda t, u: -2 * u, 0.0, np.array([1.0, 3.0]), 0.25)
    np.testing.assert_allclose(out, [0.5, 1.5])


@pytest.mark.parametrize("name,p", [("ssprk22", 2), ("ssprk33", 3), ("ssprk54", 4), ("ssprk104", 4)])
def test_nonlinear_convergence_matches_order(name, p):
    ns = [10, 20, 40, 80]
    errs = errors_at(make_named(name), RICCATI, [0.5], 1.0, 1.0, ns)
    assert observed_order(ns, errs) == pytest.approx(p, abs=0.3)


@pytest.mark.parametrize("s", [3, 5])
def test_family_is_order_two_on_nonlinear_problems(s):
    ns = [10, 20, 40, 80]
    errs = errors_at(family_tableau(s, "plin_eq_s"), NONAUTONOMOUS, [1.0], 2.0, np.exp(np.sin(2.0)), ns)
    assert observed_order(ns, errs) == pytest.approx(2, abs=0.3)


def test_family_is_high_order_on_linear_problems():
    ns = [4, 6, 8, 10]
    errs = errors_at(family_tableau(5, "plin_eq_s"), DECAY, [1.0], 1.0, np.exp(-1.0), ns)
    assert observed_order(ns, errs) == pytest.approx(5, abs=0.4)


def test_non_finite_state_reports_step():
    with pytest.raises(NonFiniteState) as err, np.errstate(over="ignore", invalid="ignore"):
        integrate(make_named("ssprk33"), RICCATI, [1e100], 0.0, 1.0, 0.1)
    assert err.value.step == 1


def test_storage_options():
    tab = make_named("ssprk33")
    full = integrate(tab, DECAY, [1.0], 0.0, 1.0, 0.1)
    assert full.states.shape == (11, 1)
    sparse = integrate(tab, DECAY, [1.0], 0.0, 1.0, 0.1, store_every=3)
    np.testing.assert_allclose(sparse.times, [0, 0.3, 0.6, 0.9, 1.0])
    ends = integrate(tab, DECAY, [1.0], 0.0, 1.0, 0.1, store_every=None)
    assert len(ends.times) == 2
    assert np.array_equal(ends.final, full.final)


def test_functionals_are_recorded_each_step():
    grid = GridConfig(21)
    sys = advection_upwind_first_order(grid)
    u0 = np.where(grid.x <= 0.5, 1.0, 0.0)
    rec = integrate(make_named("ssprk33"), sys, u0, 0.0, 0.2, grid.dx, functionals=True)
    assert len(rec.tv) == len(rec.minimum) == 5
    assert rec.tv[0] == pytest.approx(2.0)
    assert np.all(np.diff(rec.tv) <= 1e-12)


def test_functional_helpers():
    u = np.array([0.0, 1.0, 0.5, -0.25])
    assert total_variation(u) == pytest.approx(1 + 0.5 + 0.75 + 0.25)
    assert minimum_value(u) == -0.25


@given(st.integers(0, 2**32 - 1), st.sampled_from(["ssprk22", "ssprk33", "ssprk54", "ssprk104"]))
def test_ssp_step_preserves_tv_of_random_data(seed, name):
    # forward Euler is TVD for dt <= dx; every SSP method inherits this up to C dx
    from ssplab.monotonicity import ssp_radius

    grid = GridConfig(41)
    sys = advection_upwind_first_order(grid)
    u = np.random.default_rng(seed).standard_normal(grid.n_points - 1)
    tab = make_named(name)
    dt = ssp_radius(tab).radius * grid.dx * (1 - 1e-9)
    v = rk_step(tab, sys.rhs, 0.0, u, dt)
    assert total_variation(v) <= total_variation(u) + 1e-12
