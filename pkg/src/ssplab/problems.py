"""Benchmark semi-discretizations used by the convergence and step-size studies.

Periodic grids follow the point-grid convention ``dx = L / (n_points - 1)``:
the last point coincides with the first, so ``n_points - 1`` unknowns are
stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import EvenGrid, UnknownProblem
from .timestepping import OdeSystem, minimum_value, total_variation

WENO_EPS = 1e-6


@dataclass(frozen=True)
class GridConfig:
    n_points: int
    domain: tuple[float, float] = (0.0, 1.0)
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n_points < 3:
            raise ValueError("n_points must be >= 3")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundaries are supported")
        if not self.domain[1] > self.domain[0]:
            raise ValueError("empty domain")

    @property
    def length(self) -> float:
        return self.domain[1] - self.domain[0]

    @property
    def dx(self) -> float:
        return self.length / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return self.domain[0] + self.dx * np.arange(self.n_points - 1)


@dataclass
class ProblemCatalogEntry:
    name: str
    system: OdeSystem
    grid: GridConfig | None
    u0: np.ndarray
    t_final: float
    dt_fe: float | None = None
    exact: Callable[[float], np.ndarray] | None = None


def _periodic_system(n, rhs, name):
    return OdeSystem(n, rhs, tv=total_variation, minimum=minimum_value, name=name)


# -- van der Pol ---------------------------------------------------------------


def van_der_pol(epsilon: float = 10.0) -> OdeSystem:
    if epsilon == 0:
        raise ValueError("epsilon must be nonzero")
    inv = 1.0 / epsilon

    def rhs(t, u):
        return np.array([u[1], inv * (-u[0] + (1.0 - u[0] ** 2) * u[1])])

    return OdeSystem(2, rhs, name="vdp")


def _rk4_scalar_vdp(u0, t_final, n, epsilon):
    inv = 1.0 / epsilon
    h = t_final / n
    x, y = float(u0[0]), float(u0[1])

    def f(x, y):
        return y, inv * (-x + (1.0 - x * x) * y)

    for _ in range(n):
        k1x, k1y = f(x, y)
        k2x, k2y = f(x + 0.5 * h * k1x, y + 0.5 * h * k1y)
        k3x, k3y = f(x + 0.5 * h * k2x, y + 0.5 * h * k2y)
        k4x, k4y = f(x + h * k3x, y + h * k3y)
        x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
    return np.array([x, y])


@lru_cache(maxsize=16)
def vdp_reference(t_final: float = 4.0, epsilon: float = 10.0, u0=(0.5, 0.0), tol: float = 1e-12) -> np.ndarray:
    """Reference solution by step-halving RK4 until successive results agree to ``tol``."""
    n = 1000
    prev = _rk4_scalar_vdp(u0, t_final, n, epsilon)
    while True:
        n *= 2
        cur = _rk4_scalar_vdp(u0, t_final, n, epsilon)
        if np.max(np.abs(cur - prev)) < tol:
            # Richardson extrapolation removes the leading h^4 term
            return cur + (cur - prev) / 15.0
        if n > 2**20:
            raise RuntimeError("van der Pol reference did not converge")
        prev = cur


# -- linear advection ----------------------------------------------------------


def fourier_diff_matrix(m: int, length: float = 1.0) -> np.ndarray:
    """Periodic Fourier differentiation matrix on ``m`` equispaced points."""
    h = 2.0 * np.pi / m
    idx = np.arange(m)
    diff = idx[:, None] - idx[None, :]
    sign = np.where(diff % 2 == 0, 1.0, -1.0)
    D = np.zeros((m, m))
    off = diff != 0
    half = diff[off] * h / 2.0
    if m % 2 == 0:
        D[off] = 0.5 * sign[off] / np.tan(half)
    else:
        D[off] = 0.5 * sign[off] / np.sin(half)
    return D * (2.0 * np.pi / length)


def advection_spectral(grid: GridConfig, k: int = 2) -> OdeSystem:
    """u_t = -u_x with Fourier spectral differentiation.

    ``k`` names the exact solution ``sin(2 pi k (x - t))`` used by
    :func:`get_problem`; the operator itself does not depend on it.
    """
    if grid.n_points % 2 == 0:
        raise EvenGrid(f"spectral advection needs odd n_points, got {grid.n_points}")
    D = fourier_diff_matrix(grid.n_points - 1, grid.length)

    def rhs(t, u):
        return -(D @ u)

    sys = _periodic_system(grid.n_points - 1, rhs, "adv-spectral")
    sys.matrix = -D
    return sys


def advection_upwind_first_order(grid: GridConfig) -> OdeSystem:
    dx = grid.dx

    def rhs(t, u):
        return -(u - np.roll(u, 1)) / dx

    return _periodic_system(grid.n_points - 1, rhs, "adv-upwind")


def step_initial_condition(x: np.ndarray) -> np.ndarray:
    return np.where(x <= 0.5, 1.0, 0.0)


# -- WENO5 -----------------------------------------------------------------------


def _weno5_left(a, b, c, d, e):
    """Value at the c|d interface from the left-biased five-point stencil."""
    q0 = (2 * a - 7 * b + 11 * c) / 6.0
    q1 = (-b + 5 * c + 2 * d) / 6.0
    q2 = (2 * c + 5 * d - e) / 6.0
    s0 = 13.0 / 12.0 * (a - 2 * b + c) ** 2 + 0.25 * (a - 4 * b + 3 * c) ** 2
    s1 = 13.0 / 12.0 * (b - 2 * c + d) ** 2 + 0.25 * (b - d) ** 2
    s2 = 13.0 / 12.0 * (c - 2 * d + e) ** 2 + 0.25 * (3 * c - 4 * d + e) ** 2
    w0 = 0.1 / (WENO_EPS + s0) ** 2
    w1 = 0.6 / (WENO_EPS + s1) ** 2
    w2 = 0.3 / (WENO_EPS + s2) ** 2
    return (w0 * q0 + w1 * q1 + w2 * q2) / (w0 + w1 + w2)


def weno5_interface_flux(u: np.ndarray, flux, wave_speed) -> np.ndarray:
    """Numerical flux at x_{j+1/2} with local Lax-Friedrichs splitting."""
    f = flux(u)
    alpha = float(np.max(np.abs(wave_speed(u))))
    fp = 0.5 * (f + alpha * u)
    fm = 0.5 * (f - alpha * u)
    r = np.roll
    plus = _weno5_left(r(fp, 2), r(fp, 1), fp, r(fp, -1), r(fp, -2))
    minus = _weno5_left(r(fm, -3), r(fm, -2), r(fm, -1), fm, r(fm, 1))
    return plus + minus


def _conservative(grid, flux, wave_speed, name):
    dx = grid.dx

    def rhs(t, u):
        F = weno5_interface_flux(u, flux, wave_speed)
        return -(F - np.roll(F, 1)) / dx

    return _periodic_system(grid.n_points - 1, rhs, name)


def advection_weno5(grid: GridConfig) -> OdeSystem:
    if grid.n_points < 10:
        raise ValueError("WENO5 needs n_points >= 10")
    return _conservative(grid, lambda u: u, np.ones_like, "adv-weno5")


def burgers_weno5(grid: GridConfig) -> OdeSystem:
    if grid.n_points < 10:
        raise ValueError("WENO5 needs n_points >= 10")
    return _conservative(grid, lambda u: 0.5 * u * u, lambda u: u, "burgers-weno5")


def _burgers_exact_point(x: float, t: float) -> float:
    x = x % 1.0
    if x == 0.0 or x == 0.5:
        return 0.0
    if x > 0.5:
        return -_burgers_exact_point(1.0 - x, t)
    if t == 0:
        return float(np.sin(2 * np.pi * x))
    # foot of the characteristic through (x, t) lies in [0, x]
    xi = brentq(lambda xi: xi + t * np.sin(2 * np.pi * xi) - x, 0.0, x, xtol=1e-15, rtol=1e-15)
    return float(np.sin(2 * np.pi * xi))


def burgers_exact(x, t: float) -> np.ndarray:
    """Method-of-characteristics solution for u0 = sin(2 pi x).

    Valid away from the standing shock at x = 1/2.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.array([_burgers_exact_point(xi, t) for xi in x])


# -- Buckley-Leverett --------------------------------------------------------------


def koren_limiter(theta):
    return np.maximum(0.0, np.minimum(np.minimum(2.0 * theta, (1.0 + 2.0 * theta) / 3.0), 2.0))


def buckley_leverett_flux(u, a: float = 1.0 / 3.0):
    u2 = u * u
    return u2 / (u2 + a * (1.0 - u) ** 2)


def buckley_leverett_koren(grid: GridConfig, a: float = 1.0 / 3.0) -> OdeSystem:
    """Second-order upwind MUSCL scheme with the Koren limiter.

    Upwinding to the left is valid for states in [0, 1], where f' >= 0.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    dx = grid.dx

    def rhs(t, u):
        fwd = np.roll(u, -1) - u
        bwd = u - np.roll(u, 1)
        denom = fwd + np.where(fwd >= 0, 1e-14, -1e-14)
        u_face = u + 0.5 * koren_limiter(bwd / denom) * fwd
        F = buckley_leverett_flux(u_face, a)
        return -(F - np.roll(F, 1)) / dx

    return _periodic_system(grid.n_points - 1, rhs, "buckley-leverett")


# -- catalog -------------------------------------------------------------------------

PROBLEM_NAMES = ("vdp", "adv-spectral", "adv-upwind", "adv-weno5", "burgers-weno5", "buckley-leverett", "decay")


def get_problem(name: str, n_points: int | None = None, **params) -> ProblemCatalogEntry:
    """Reference configuration of a named benchmark."""
    if name == "vdp":
        eps = params.get("epsilon", 10.0)
        u0 = np.array([0.5, 0.0])
        return ProblemCatalogEntry(
            name, van_der_pol(eps), None, u0, 4.0,
            exact=lambda t: vdp_reference(float(t), float(eps), (0.5, 0.0)),
        )
    if name == "decay":
        sys = OdeSystem(1, lambda t, u: -u, name="decay")
        return ProblemCatalogEntry(name, sys, None, np.array([1.0]), 1.0, exact=lambda t: np.array([np.exp(-t)]))
    if name == "adv-spectral":
        grid = GridConfig(n_points or 17)
        k = params.get("k", 2)
        x = grid.x
        return ProblemCatalogEntry(
            name, advection_spectral(grid, k), grid, np.sin(2 * np.pi * k * x), 1.0,
            exact=lambda t: np.sin(2 * np.pi * k * (x - t)),
        )
    if name == "adv-upwind":
        grid = GridConfig(n_points or 101)
        return ProblemCatalogEntry(
            name, advection_upwind_first_order(grid), grid, step_initial_condition(grid.x), 0.125, dt_fe=grid.dx
        )
    if name == "adv-weno5":
        grid = GridConfig(n_points or 41)
        x = grid.x
        return ProblemCatalogEntry(
            name, advection_weno5(grid), grid, np.sin(4 * np.pi * x), 1.0,
            exact=lambda t: np.sin(4 * np.pi * (x - t)),
        )
    if name == "burgers-weno5":
        grid = GridConfig(n_points or 101)
        x = grid.x
        return ProblemCatalogEntry(
            name, burgers_weno5(grid), grid, np.sin(2 * np.pi * x), params.get("t_final", 0.3),
            exact=lambda t: burgers_exact(x, t),
        )
    if name == "buckley-leverett":
        grid = GridConfig(n_points or 101)
        a = params.get("a", 1.0 / 3.0)
        return ProblemCatalogEntry(
            name, buckley_leverett_koren(grid, a), grid, np.where(grid.x >= 0.5, 0.5, 0.0), 0.125,
            dt_fe=grid.dx / 4.0,
        )
    raise UnknownProblem(f"unknown problem {name!r}; expected one of {PROBLEM_NAMES}")
