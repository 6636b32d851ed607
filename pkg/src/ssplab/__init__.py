"""Analysis, construction and testing of explicit SSP Runge-Kutta methods."""

__version__ = "0.1.0"

from .conditions import OrderReport, constraint_vector, linear_residuals, nonlinear_residuals, order_report
from .monotonicity import SspResult, is_absolutely_monotonic, ssp_radius
from .stability import StabilityPolynomial, region_boundary, stability_polynomial
from .tableau import (
    ButcherTableau,
    MethodSpec,
    ShuOsherForm,
    butcher_to_canonical_shu_osher,
    make_linear_family,
    make_named,
    read_tableau,
    shu_osher_to_butcher,
    write_tableau,
)
from .timestepping import OdeSystem, TrajectoryRecord, integrate

__all__ = [
    "ButcherTableau",
    "MethodSpec",
    "OdeSystem",
    "OrderReport",
    "ShuOsherForm",
    "SspResult",
    "StabilityPolynomial",
    "TrajectoryRecord",
    "butcher_to_canonical_shu_osher",
    "constraint_vector",
    "integrate",
    "is_absolutely_monotonic",
    "linear_residuals",
    "make_linear_family",
    "make_named",
    "nonlinear_residuals",
    "order_report",
    "read_tableau",
    "region_boundary",
    "shu_osher_to_butcher",
    "ssp_radius",
    "stability_polynomial",
    "write_tableau",
]
