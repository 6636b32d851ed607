"""Fixed-step explicit Runge-Kutta integration in Butcher form."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NonFiniteState
from .tableau import ButcherTableau

Rhs = Callable[[float, np.ndarray], np.ndarray]


def total_variation(u: np.ndarray) -> float:
    """Periodic total variation sum_j |u_{j+1} - u_j|."""
    return float(np.abs(np.roll(u, -1) - u).sum())


def minimum_value(u: np.ndarray) -> float:
    return float(np.min(u))


@dataclass
class OdeSystem:
    """``u' = rhs(t, u)`` with optional monitored functionals."""

    dimension: int
    rhs: Rhs
    tv: Callable[[np.ndarray], float] | None = None
    minimum: Callable[[np.ndarray], float] | None = None
    name: str = ""
    # dense operator L when the system is linear, u' = L u
    matrix: np.ndarray | None = None


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    states: np.ndarray
    tv: list[float] = field(default_factory=list)
    minimum: list[float] = field(default_factory=list)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def rk_step(tab: ButcherTableau, rhs: Rhs, t: float, u: np.ndarray, dt: float) -> np.ndarray:
    A, b, c = tab.A, tab.b, tab.c
    k = []
    for i in range(tab.s):
        y = u
        for j in np.flatnonzero(A[i, :i]):
            y = y + (dt * A[i, j]) * k[j]
        k.append(np.asarray(rhs(t + c[i] * dt, y)))
    out = u
    for j in np.flatnonzero(b):
        out = out + (dt * b[j]) * k[j]
    return out


def step_times(t0: float, t_final: float, dt: float) -> np.ndarray:
    """Uniform grid from t0 with a shortened last step landing on t_final."""
    if dt <= 0 or not t_final > t0:
        raise ValueError("need dt > 0 and t_final > t0")
    n = int(np.ceil((t_final - t0) / dt * (1 - 1e-12)))
    times = t0 + dt * np.arange(n + 1, dtype=float)
    times[-1] = t_final
    return times


def integrate(
    tab: ButcherTableau,
    sys: OdeSystem,
    u0,
    t0: float,
    t_final: float,
    dt: float,
    *,
    store_every: int | None = 1,
    functionals: bool = False,
) -> TrajectoryRecord:
    """Integrate with fixed step ``dt``.

    ``store_every=None`` keeps only the initial and final states. With
    ``functionals=True`` the system's TV/minimum hooks are evaluated after
    every step (and at t0).
    """
    times = step_times(t0, t_final, dt)
    u = np.array(u0, dtype=float)
    kept_t, kept_u = [times[0]], [u.copy()]
    tvs, mins = [], []
    if functionals:
        if sys.tv is not None:
            tvs.append(sys.tv(u))
        if sys.minimum is not None:
            mins.append(sys.minimum(u))
    n_steps = len(times) - 1
    for n in range(n_steps):
        u = rk_step(tab, sys.rhs, times[n], u, times[n + 1] - times[n])
        if not np.all(np.isfinite(u)):
            raise NonFiniteState(n + 1)
        if functionals:
            if sys.tv is not None:
                tvs.append(sys.tv(u))
            if sys.minimum is not None:
                mins.append(sys.minimum(u))
        last = n == n_steps - 1
        if last or (store_every and (n + 1) % store_every == 0):
            kept_t.append(times[n + 1])
            kept_u.append(u.copy())
    return TrajectoryRecord(np.array(kept_t), np.array(kept_u), tvs, mins)
