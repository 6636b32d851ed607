"""Radius of absolute monotonicity (SSP coefficient) by bisection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import NotAbsolutelyMonotonic, NotSspAtZero
from .tableau import ButcherTableau, ShuOsherForm, butcher_to_canonical_shu_osher, extended_matrix

FEAS_TOL = 1e-12
CERTIFICATE_SHRINK = 1e-9


def _resolvent_product(K: np.ndarray, r: float) -> np.ndarray:
    # K (I + rK)^{-1} == (I + rK)^{-1} K; unit lower triangular solve
    n = K.shape[0]
    return solve_triangular(np.eye(n) + r * K, K, lower=True, unit_diagonal=True)


def monotonicity_margins(tab: ButcherTableau, r: float) -> tuple[float, float]:
    """(min entry of K(I+rK)^{-1}, 1 - ||rK(I+rK)^{-1}||_inf)."""
    P = _resolvent_product(extended_matrix(tab), r)
    return float(P.min()), float(1.0 - np.abs(r * P).sum(axis=1).max())


def is_absolutely_monotonic(tab: ButcherTableau, r: float, tol: float = FEAS_TOL) -> bool:
    if r < 0:
        raise ValueError("r must be nonnegative")
    lo, norm_margin = monotonicity_margins(tab, r)
    return lo >= -tol and norm_margin >= -tol


@dataclass
class SspResult:
    radius: float
    s: int
    certificate: ShuOsherForm | None
    feasibility_trace: list[tuple[float, bool]] = field(default_factory=list)

    @property
    def effective(self) -> float:
        return self.radius / self.s

    def trace_is_monotone(self) -> bool:
        """True if no feasible probe lies above an infeasible one."""
        infeasible = [r for r, ok in self.feasibility_trace if not ok]
        if not infeasible:
            return True
        first_bad = min(infeasible)
        return all(r < first_bad for r, ok in self.feasibility_trace if ok)


def ssp_radius(
    tab: ButcherTableau,
    r_max: float | None = None,
    tol_bisect: float = 1e-10,
    n_scan: int = 16,
    tol: float = FEAS_TOL,
) -> SspResult:
    """Largest r in [0, r_max] with the method absolutely monotonic at r.

    A coarse scan of ``n_scan`` points precedes the bisection so that
    non-monotone feasibility shows up in ``feasibility_trace``. ``r_max``
    defaults to ``s + 1``, just above the bound C <= s.
    """
    s = tab.s
    if r_max is None:
        r_max = s + 1.0
    trace = []

    def probe(r):
        ok = is_absolutely_monotonic(tab, r, tol)
        trace.append((float(r), ok))
        return ok

    if not probe(0.0):
        K = extended_matrix(tab)
        i, j = np.unravel_index(np.argmin(K), K.shape)
        raise NotSspAtZero(
            f"{tab.label or 'method'} is not SSP: extended matrix entry ({i},{j}) = {K[i, j]:.3e} < 0",
            (int(i), int(j)),
        )

    lo, hi = 0.0, None
    for r in np.linspace(0.0, r_max, n_scan + 1)[1:]:
        if probe(r):
            lo = float(r)
        else:
            hi = float(r)
            break
    if hi is None:
        radius = float(r_max)
    else:
        while hi - lo > tol_bisect:
            mid = 0.5 * (lo + hi)
            if probe(mid):
                lo = mid
            else:
                hi = mid
        radius = lo
    cert = butcher_to_canonical_shu_osher(tab, radius * (1.0 - CERTIFICATE_SHRINK))
    return SspResult(radius, s, cert, trace)


def canonical_failure_radius(tab: ButcherTableau, r_max: float | None = None, tol_bisect: float = 1e-10) -> float:
    """Radius at which the canonical Shu-Osher form first goes negative.

    An independent route to the SSP coefficient through the tableau module.
    """
    def ok(r):
        try:
            butcher_to_canonical_shu_osher(tab, r)
        except NotAbsolutelyMonotonic:
            return False
        return True

    lo, hi = 0.0, float(tab.s + 1 if r_max is None else r_max)
    if ok(hi):
        return hi
    while hi - lo > tol_bisect:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo
