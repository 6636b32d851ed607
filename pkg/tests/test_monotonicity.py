import numpy as np
import pytest
from hypothesis import given

from conftest import nonnegative_tableaux, shu_osher_forms
from ssplab.errors import NotSspAtZero
from ssplab.monotonicity import (
    canonical_failure_radius,
    is_absolutely_monotonic,
    monotonicity_margins,
    ssp_radius,
)
from ssplab.stability import stability_polynomial
from ssplab.tableau import ButcherTableau, FAMILIES, family_tableau, make_named, shu_osher_to_butcher


def threshold_factor(tab, r_max, n=2000):
    """Largest r with every derivative of R(z) nonnegative on [-r, 0]; an upper bound for C."""
    poly = np.polynomial.Polynomial(stability_polynomial(tab).coeffs)
    zs = -np.linspace(0, r_max, n + 1)
    ok_up_to = r_max
    for k in range(poly.degree() + 1):
        vals = poly.deriv(k)(zs) if k else poly(zs)
        bad = np.flatnonzero(vals < -1e-12)
        if len(bad):
            ok_up_to = min(ok_up_to, -zs[bad[0]])
    return ok_up_to


@pytest.mark.parametrize("name,C,tol", [("ssprk22", 1, 1e-8), ("ssprk33", 1, 1e-8), ("ssprk54", 1.508, 1e-3), ("ssprk104", 6, 1e-8)])
def test_named_radii(name, C, tol):
    assert ssp_radius(make_named(name)).radius == pytest.approx(C, abs=tol)


@pytest.mark.parametrize("kind,C", [("plin_eq_s", 1.0), ("plin_eq_s_minus_1", 2.0)])
@pytest.mark.parametrize("s", range(2, 13))
def test_family_radii(kind, C, s):
    assert ssp_radius(family_tableau(s, kind)).radius == pytest.approx(C, abs=1e-8)


def test_forward_euler_radius_is_one():
    res = ssp_radius(ButcherTableau([[0.0]], [1.0]))
    assert res.radius == pytest.approx(1.0, abs=1e-9)
    assert res.effective == pytest.approx(1.0, abs=1e-9)


@given(shu_osher_forms())
def test_decomposition_coefficient_is_a_lower_bound(form):
    # the search is capped at s + 1, which only binds for inconsistent forms
    C = ssp_radius(shu_osher_to_butcher(form)).radius
    assert C >= min(form.ssp_coefficient(), form.s + 1) - 1e-9


@given(nonnegative_tableaux())
def test_radius_bounded_by_stage_count_and_threshold_factor(tab):
    C = ssp_radius(tab).radius
    assert C <= tab.s + 1e-9
    assert C <= threshold_factor(tab, tab.s + 1.0) + 2e-3


@given(nonnegative_tableaux())
def test_canonical_form_oracle_agrees(tab):
    C = ssp_radius(tab).radius
    assert canonical_failure_radius(tab) == pytest.approx(C, abs=1e-8)


@given(nonnegative_tableaux())
def test_bisection_trace_is_monotone(tab):
    res = ssp_radius(tab)
    assert res.trace_is_monotone()
    feasible = [r for r, ok in res.feasibility_trace if ok]
    assert max(feasible) == pytest.approx(res.radius, abs=1e-12)


@given(nonnegative_tableaux())
def test_feasible_below_infeasible_above(tab):
    C = ssp_radius(tab).radius
    assert is_absolutely_monotonic(tab, 0.5 * C)
    if C < tab.s + 1 - 1e-6:
        assert not is_absolutely_monotonic(tab, C + 1e-6)


@given(nonnegative_tableaux(s_min=2))
def test_certificate_reproduces_radius(tab):
    res = ssp_radius(tab)
    cert = res.certificate
    np.testing.assert_allclose(cert.alpha[1:].sum(axis=1), 1.0, atol=1e-12)
    assert cert.ssp_coefficient() == pytest.approx(res.radius, rel=1e-6, abs=1e-9)
    assert shu_osher_to_butcher(cert).allclose(tab, atol=1e-10)


def test_negative_coefficient_is_not_ssp():
    A = np.array([[0, 0, 0], [0.5, 0, 0], [-1, 2, 0]])
    with pytest.raises(NotSspAtZero) as err:
        ssp_radius(ButcherTableau(A, [1 / 6, 2 / 3, 1 / 6]))
    assert err.value.index == (2, 0)
    assert err.value.radius == 0


def test_margins_at_zero_for_families():
    for kind in FAMILIES:
        lo, norm_margin = monotonicity_margins(family_tableau(5, kind), 0.0)
        assert lo >= 0 and norm_margin == pytest.approx(1.0)


def test_negative_radius_rejected():
    with pytest.raises(ValueError):
        is_absolutely_monotonic(make_named("ssprk33"), -1.0)
