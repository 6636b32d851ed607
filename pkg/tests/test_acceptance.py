"""Acceptance criteria 1-9, one test per criterion.

Each test prints ``criterion N: PASS|FAIL <detail>``; the lines are also
repeated in the pytest terminal summary. Run stand-alone with
``python3 tests/test_acceptance.py``.
"""

import json
import sys
import time

import numpy as np
import pytest

from ssplab.catalog import catalog, get_method
from ssplab.conditions import certified_orders, linear_residuals
from ssplab.experiments import ConvergenceStudy, find_max_step, run_convergence, step_sweep
from ssplab.monotonicity import canonical_failure_radius, ssp_radius
from ssplab.optimizer import OptimizationConfig, optimize, table_value
from ssplab.problems import GridConfig, advection_upwind_first_order, advection_weno5, buckley_leverett_koren, burgers_weno5, get_problem
from ssplab.stability import stability_polynomial
from ssplab.tableau import (
    ButcherTableau,
    MethodSpec,
    ShuOsherForm,
    butcher_to_canonical_shu_osher,
    family_tableau,
    make_named,
    shu_osher_to_butcher,
)
from ssplab.timestepping import rk_step, total_variation

RESULTS: dict[int, str] = {}
SEED = 2024


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def test_criterion_1_named_radii():
    t0 = time.perf_counter()
    expected = {"ssprk22": (1.0, 1e-3), "ssprk33": (1.0, 1e-3), "ssprk54": (1.508, 1e-3), "ssprk104": (6.0, 1e-6)}
    got = {name: ssp_radius(make_named(name)).radius for name in expected}
    elapsed = time.perf_counter() - t0
    ok = all(abs(got[n] - C) <= tol for n, (C, tol) in expected.items()) and elapsed < 1.0
    report(1, ok, " ".join(f"{n}={r:.6f}" for n, r in got.items()) + f" ({elapsed:.2f}s)")


def test_criterion_2_family_radii():
    t0 = time.perf_counter()
    worst = 0.0
    for s in range(2, 13):
        worst = max(worst, abs(ssp_radius(family_tableau(s, "plin_eq_s")).radius - 1.0))
        worst = max(worst, abs(ssp_radius(family_tableau(s, "plin_eq_s_minus_1")).radius - 2.0))
    elapsed = time.perf_counter() - t0
    report(2, worst <= 1e-8 and elapsed < 1.0, f"max |C - C_ref| = {worst:.1e} over s=2..12 ({elapsed:.2f}s)")


def test_criterion_3_order_certification():
    t0 = time.perf_counter()
    got = {
        "ssprk33": certified_orders(make_named("ssprk33"), tol=1e-10),
        "ssprk104": certified_orders(make_named("ssprk104"), tol=1e-10),
        "plin_eq_s/7": certified_orders(family_tableau(7, "plin_eq_s"), tol=1e-10),
    }
    elapsed = time.perf_counter() - t0
    ok = got == {"ssprk33": (3, 3), "ssprk104": (4, 4), "plin_eq_s/7": (7, 2)} and elapsed < 1.0
    report(3, ok, " ".join(f"{k}={v}" for k, v in got.items()) + f" ({elapsed:.2f}s)")


CELLS = [(5, 5, 2), (7, 5, 3), (5, 5, 4), (6, 5, 4), (8, 6, 4)]


def test_criterion_4_optimizer_tables():
    parts, ok = [], True
    for s, p_lin, p in CELLS:
        t0 = time.perf_counter()
        out = optimize(OptimizationConfig(MethodSpec(s, p_lin, p), restarts=50, seed=SEED))
        ref = table_value(s, p_lin, p)
        # independent recomputation through the canonical Shu-Osher form
        indep = canonical_failure_radius(out.best)
        orders = certified_orders(out.best)
        cell_ok = (
            out.valid
            and abs(out.radius - ref) <= 1e-2
            and abs(indep - out.radius) <= 1e-6
            and orders[0] >= p_lin and orders[1] >= p
        )
        ok &= cell_ok
        parts.append(f"({s},{p_lin},{p})={out.radius:.5f}/table {ref} [{time.perf_counter() - t0:.0f}s]")
    report(4, ok, " ".join(parts))


def test_criterion_5_van_der_pol():
    t0 = time.perf_counter()
    methods = ["lnl-9-6-2", "lnl-9-6-3", "lnl-9-6-4"]
    res = run_convergence(ConvergenceStudy(methods, "vdp", list(range(15, 44, 4))))
    elapsed = time.perf_counter() - t0
    ok = all(abs(res.orders[m] - p) <= 0.4 for m, p in zip(methods, (2, 3, 4))) and elapsed < 10
    report(5, ok, " ".join(f"{m}={res.orders[m]:.2f}" for m in methods) + f" ({elapsed:.1f}s)")


def test_criterion_6_spectral_advection():
    t0 = time.perf_counter()
    targets = {"lnl-10-8-4": 8, "lnl-10-9-4": 9, "plin_eq_s/8": 8, "plin_eq_s/9": 9,
               "plin_eq_s_minus_1/9": 8, "plin_eq_s_minus_1/10": 9}
    study = ConvergenceStudy(list(targets), "adv-spectral", list(range(9, 20, 2)), cfl=0.9, error_floor=1e-13)
    res = run_convergence(study)
    elapsed = time.perf_counter() - t0
    ok = all(abs(res.orders[m] - p) <= 0.7 for m, p in targets.items()) and elapsed < 10
    report(6, ok, " ".join(f"{m}={res.orders[m]:.2f}" for m in targets) + f" dropped={len(res.dropped)} ({elapsed:.1f}s)")


def test_criterion_7_linear_tvd_step():
    t0 = time.perf_counter()
    methods = ["ssprk104"] + [f"plin_eq_s/{s}" for s in range(1, 11)] + [f"plin_eq_s_minus_1/{s}" for s in range(2, 11)]
    results = step_sweep(methods, "adv-upwind", ("tv", "positivity"))
    by = {(r.method, r.functional): r for r in results}
    worst, ok = 0.0, True
    for m in methods:
        tv, pos = by[m, "tv"], by[m, "positivity"]
        C = tv.dt_theory / tv.dt_fe
        rel = abs(tv.observed_coefficient - C) / C
        worst = max(worst, rel)
        ok &= tv.bracket_valid and rel <= 0.05 and pos.dt_observed >= tv.dt_observed
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120
    report(7, ok, f"{len(methods)} methods, max |dt_obs/dt_FE - C|/C = {worst:.3f} ({elapsed:.0f}s)")


def test_criterion_8_nonlinear_tvd_step():
    t0 = time.perf_counter()
    entry = get_problem("buckley-leverett")
    fe = ButcherTableau([[0.0]], [1.0], "fe")
    self_test = find_max_step(fe, entry, "tv", C=1.0).dt_observed >= entry.dt_fe * (1 - 1e-9)
    # forward Euler at exactly dt = 0.0025 over the whole run
    u = entry.u0
    for _ in range(50):
        v = rk_step(fe, entry.system.rhs, 0.0, u, 0.0025)
        self_test &= total_variation(v) <= total_variation(u) + 1e-10
        u = v
    methods = [e.name for e in catalog()]
    results = step_sweep(methods, "buckley-leverett", ("tv",))
    low = min(results, key=lambda r: r.ratio)
    ok = self_test and all(r.dt_observed >= 0.99 * r.dt_theory for r in results)
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120
    report(8, ok, f"FE self-test={'ok' if self_test else 'broken'}, {len(methods)} methods, "
                  f"min dt_obs/(C dt_FE) = {low.ratio:.3f} ({low.method}) ({elapsed:.0f}s)")


def test_criterion_9_property_suite(tmp_path):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    checks = {}

    worst = 0.0
    for _ in range(200):
        s = int(rng.integers(1, 9))
        alpha, beta = np.zeros((s + 1, s + 1)), np.zeros((s + 1, s + 1))
        for i in range(1, s + 1):
            row = rng.random(i) + 1e-3
            alpha[i, :i] = row / row.sum()
            beta[i, :i] = alpha[i, :i] * rng.uniform(0.2, 1.0, i)
        form = ShuOsherForm(alpha, beta)
        tab = shu_osher_to_butcher(form)
        back = shu_osher_to_butcher(butcher_to_canonical_shu_osher(tab, form.ssp_coefficient()))
        worst = max(worst, np.abs(back.A - tab.A).max(), np.abs(back.b - tab.b).max())
    checks["round-trip"] = worst <= 1e-10

    worst = 0.0
    for _ in range(200):
        s = int(rng.integers(1, 11))
        tab = ButcherTableau(np.tril(rng.uniform(0, 1 / s, (s, s)), -1), rng.dirichlet(np.ones(s)))
        coeffs = stability_polynomial(tab).coeffs
        for q, r in linear_residuals(tab, s):
            worst = max(worst, abs(coeffs[q] - 1 / np.prod(np.arange(1, q + 1)) - r))
    checks["stability-vs-residuals"] = worst <= 1e-12

    worst = 0.0
    for scheme in (advection_upwind_first_order, advection_weno5, burgers_weno5, buckley_leverett_koren):
        for n in (21, 64, 101):
            grid = GridConfig(n)
            u = rng.random(n - 1)
            worst = max(worst, abs(scheme(grid).rhs(0.0, u).sum() * grid.dx))
    checks["conservation"] = worst <= 1e-12

    traces = [ssp_radius(get_method(n)) for n in ("ssprk54", "ssprk104", "plin_eq_s_minus_1/7")]
    checks["trace-monotone"] = all(t.trace_is_monotone() for t in traces)

    runs = [optimize(OptimizationConfig(MethodSpec(4, 4, 3), restarts=3, seed=SEED, workers=1)) for _ in range(2)]
    checks["seeded-rerun"] = json.dumps(runs[0].to_dict()) == json.dumps(runs[1].to_dict())

    elapsed = time.perf_counter() - t0
    ok = all(checks.values()) and elapsed < 30
    report(9, ok, " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items()) + f" ({elapsed:.1f}s)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
