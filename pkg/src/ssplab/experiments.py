"""Convergence studies and empirical TVD/positivity step-size searches."""

from __future__ import annotations

import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .catalog import get_method
from .errors import OracleUnavailable
from .monotonicity import ssp_radius
from .optimizer import max_workers
from .problems import ProblemCatalogEntry, get_problem
from .tableau import ButcherTableau
from .timestepping import integrate, minimum_value, rk_step, step_times, total_variation

PRESERVE_TOL = 1e-10

# step size per resolution N: ODEs use T/(N-1), PDEs cfl * dx.
# "l2" is the plain vector norm sqrt(sum e^2); "l2-grid" weights it by dx.
DEFAULT_CFL = {"adv-spectral": 0.9, "adv-weno5": 0.9, "burgers-weno5": 0.45}
DEFAULT_NORM = {"vdp": "first", "decay": "first", "burgers-weno5": "pointwise"}


@dataclass
class ConvergenceStudy:
    methods: list[str | tuple[str, ButcherTableau]]
    problem: str
    resolutions: list[int]
    norm: str | None = None
    cfl: float | None = None
    t_final: float | None = None
    x_star: float = 0.2
    error_floor: float = 0.0

    def __post_init__(self):
        if len(self.resolutions) < 4:
            raise ValueError("a convergence study needs at least 4 resolutions")


@dataclass
class ConvergenceResult:
    rows: list[tuple[str, int, float]]
    orders: dict[str, float]
    dropped: list[tuple[str, int, float]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("method,N,error\n")
        for m, n, e in self.rows:
            buf.write(f"{m},{n},{e:.17g}\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "rows": [{"method": m, "N": n, "error": e} for m, n, e in self.rows],
            "orders": self.orders,
            "dropped": [{"method": m, "N": n, "error": e} for m, n, e in self.dropped],
        }


def _resolve(method) -> tuple[str, ButcherTableau]:
    if isinstance(method, str):
        return method, get_method(method)
    return method


def observed_order(ns, errors) -> float:
    """Least-squares slope of -log10(error) against log10(N)."""
    slope = np.polyfit(np.log10(np.asarray(ns, dtype=float)), np.log10(np.asarray(errors)), 1)[0]
    return float(-slope)


def convergence_error(tab: ButcherTableau, study: ConvergenceStudy, n: int) -> float:
    entry = get_problem(study.problem, n_points=n if study.problem not in ("vdp", "decay") else None)
    if entry.exact is None:
        raise OracleUnavailable(f"no exact or reference solution for {study.problem!r}")
    T = study.t_final or entry.t_final
    if entry.grid is None:
        dt = T / (n - 1)
    else:
        dt = (study.cfl or DEFAULT_CFL.get(study.problem, 0.9)) * entry.grid.dx
    final = integrate(tab, entry.system, entry.u0, 0.0, T, dt, store_every=None).final
    err = final - entry.exact(T)
    norm = study.norm or DEFAULT_NORM.get(study.problem, "l2")
    if norm == "first":
        return float(abs(err[0]))
    if norm == "linf":
        return float(np.max(np.abs(err)))
    if norm == "pointwise":
        j = int(np.argmin(np.abs(entry.grid.x - study.x_star)))
        if abs(entry.grid.x[j] - study.x_star) > 1e-12:
            raise ValueError(f"x* = {study.x_star} is not a grid point for N = {n}")
        return float(abs(err[j]))
    if norm == "l2":
        return float(np.sqrt(np.sum(err**2)))
    if norm == "l2-grid":
        dx = entry.grid.dx if entry.grid is not None else 1.0
        return float(np.sqrt(dx * np.sum(err**2)))
    raise ValueError(f"unknown norm {norm!r}")


def run_convergence(study: ConvergenceStudy) -> ConvergenceResult:
    rows, dropped, orders = [], [], {}
    for method in study.methods:
        name, tab = _resolve(method)
        kept = []
        for n in study.resolutions:
            e = convergence_error(tab, study, n)
            if e <= study.error_floor:
                dropped.append((name, n, e))
                continue
            rows.append((name, n, e))
            kept.append((n, e))
        if len(kept) >= 2:
            orders[name] = observed_order(*zip(*kept))
    return ConvergenceResult(rows, orders, dropped)


# -- step-size search ------------------------------------------------------------------


@dataclass
class StepSearchResult:
    method: str
    functional: str
    dt_observed: float
    dt_theory: float
    dt_fe: float
    bracket_valid: bool = True
    monotone: bool = True
    trace: list[tuple[float, bool]] = field(default_factory=list)

    @property
    def ratio(self) -> float:
        """Observed over theoretical step."""
        return self.dt_observed / self.dt_theory if self.dt_theory > 0 else np.inf

    @property
    def observed_coefficient(self) -> float:
        return self.dt_observed / self.dt_fe

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ratio"] = self.ratio
        return d


def preserves(tab: ButcherTableau, entry: ProblemCatalogEntry, dt: float, functional: str) -> bool:
    """Run to the final time; False as soon as one step violates the functional bound."""
    u = np.array(entry.u0, dtype=float)
    times = step_times(0.0, entry.t_final, dt)
    rhs = entry.system.rhs
    tv = total_variation(u)
    for n in range(len(times) - 1):
        v = rk_step(tab, rhs, times[n], u, times[n + 1] - times[n])
        if not np.all(np.isfinite(v)):
            return False
        if functional == "tv":
            tv_new = total_variation(v)
            if tv_new > tv + PRESERVE_TOL:
                return False
            tv = tv_new
        elif functional == "positivity":
            if minimum_value(v) < -PRESERVE_TOL:
                return False
        else:
            raise ValueError(f"unknown functional {functional!r}")
        u = v
    return True


def find_max_step(
    tab: ButcherTableau,
    entry: ProblemCatalogEntry,
    functional: str = "tv",
    dt_hi: float | None = None,
    tol_dt: float | None = None,
    C: float | None = None,
    label: str | None = None,
    n_scan: int = 12,
) -> StepSearchResult:
    """Largest step preserving TV or positivity over the whole run.

    A scan of ``n_scan`` steps in ``(0, dt_hi]`` locates the first
    violation, then bisection refines it to ``tol_dt``. ``monotone`` is
    False when the scan saw a preserving step above a violating one.
    """
    if entry.dt_fe is None:
        raise ValueError(f"problem {entry.name!r} has no forward-Euler step")
    dt_fe = entry.dt_fe
    if C is None:
        C = ssp_radius(tab).radius
    dt_hi = dt_hi if dt_hi is not None else 1.5 * tab.s * dt_fe
    tol_dt = tol_dt if tol_dt is not None else dt_fe / 200.0
    name = label or tab.label
    trace = []

    def probe(dt):
        ok = preserves(tab, entry, dt, functional)
        trace.append((float(dt), ok))
        return ok

    verdicts = [(dt, probe(dt)) for dt in np.linspace(0.0, dt_hi, n_scan + 1)[1:]]
    first_bad = next((k for k, (_, ok) in enumerate(verdicts) if not ok), None)
    monotone = first_bad is None or not any(ok for _, ok in verdicts[first_bad:])
    if first_bad is None:
        return StepSearchResult(name, functional, float(dt_hi), C * dt_fe, dt_fe, False, monotone, trace)
    lo = verdicts[first_bad - 1][0] if first_bad > 0 else 0.0
    hi = verdicts[first_bad][0]
    while hi - lo > tol_dt:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            lo = mid
        else:
            hi = mid
    return StepSearchResult(name, functional, float(lo), C * dt_fe, dt_fe, True, monotone, trace)


def _sweep_job(args):
    method, problem, functional, n_points = args
    name, tab = _resolve(method)
    entry = get_problem(problem, n_points=n_points)
    return find_max_step(tab, entry, functional, label=name)


def step_sweep(methods, problem: str, functionals=("tv", "positivity"), n_points=None, workers=None):
    """find_max_step over methods x functionals; methods may run in parallel."""
    jobs = [(m, problem, f, n_points) for m in methods for f in functionals]
    workers = workers or max_workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_job, jobs))
    return [_sweep_job(j) for j in jobs]


def step_csv(results: list[StepSearchResult]) -> str:
    buf = io.StringIO()
    buf.write("method,functional,dt_observed,dt_theory,ratio\n")
    for r in results:
        buf.write(f"{r.method},{r.functional},{r.dt_observed:.17g},{r.dt_theory:.17g},{r.ratio:.17g}\n")
    return buf.getvalue()

