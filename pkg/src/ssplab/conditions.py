"""Linear and nonlinear (through order 4) order-condition residuals.

The residual kernels operate on raw ``(A, b)`` arrays and avoid ``abs``
and comparisons, so they accept complex input; the optimizer relies on
that for complex-step differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .tableau import ButcherTableau, MethodSpec

DEFAULT_TOL = 1e-10

NONLINEAR_NAMES = (
    "b.e - 1",
    "b.c - 1/2",
    "b.c^2 - 1/3",
    "b.(c^2/2 - Ac)",
    "b.c^3 - 1/4",
    "b.A(c^2/2 - Ac)",
    "b.(c^3/6 - Ac^2/2)",
    "b.C(c^2/2 - Ac)",
)
# number of nonlinear residuals needed for orders 1..4
NONLINEAR_COUNT = {1: 1, 2: 2, 3: 4, 4: 8}


def _linear_kernel(A, b, q_max):
    res = []
    w = np.ones(len(b), dtype=A.dtype)
    for q in range(1, q_max + 1):
        res.append(b @ w - 1.0 / factorial(q))
        w = A @ w
    return res


def _nonlinear_kernel(A, b, count=8):
    e = np.ones(len(b))
    c = A @ e
    c2 = c * c
    d = c2 / 2 - A @ c
    res = [b @ e - 1, b @ c - 0.5]
    if count > 2:
        res += [b @ c2 - 1 / 3, b @ d]
    if count > 4:
        c3 = c2 * c
        res += [b @ c3 - 0.25, b @ (A @ d), b @ (c3 / 6 - (A @ c2) / 2), b @ (c * d)]
    return res


def linear_residuals(tab: ButcherTableau, q_max: int) -> list[tuple[int, float]]:
    """``(q, b^T A^{q-1} e - 1/q!)`` for q = 1..q_max."""
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    return list(enumerate((float(v) for v in _linear_kernel(tab.A, tab.b, q_max)), start=1))


def nonlinear_residuals(tab: ButcherTableau) -> dict[str, float]:
    return {k: float(v) for k, v in zip(NONLINEAR_NAMES, _nonlinear_kernel(tab.A, tab.b))}


def constraint_kernel(A, b, spec: MethodSpec):
    res = _nonlinear_kernel(A, b, NONLINEAR_COUNT[spec.p])
    if spec.p_lin > spec.p:
        # linear conditions up to p are implied by the nonlinear ones
        res += _linear_kernel(A, b, spec.p_lin)[spec.p:]
    return np.array(res)


def constraint_vector(tab: ButcherTableau, spec: MethodSpec) -> np.ndarray:
    """Equality constraints for a method of type ``spec``."""
    return constraint_kernel(tab.A, tab.b, spec).astype(float)


@dataclass
class OrderReport:
    linear_residuals: list[tuple[int, float]]
    nonlinear_residuals: dict[str, float]
    certified_linear_order: int
    certified_nonlinear_order: int
    tol: float = DEFAULT_TOL
    label: str = field(default="")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "tol": self.tol,
            "linear_residuals": [{"q": q, "residual": r} for q, r in self.linear_residuals],
            "nonlinear_residuals": dict(self.nonlinear_residuals),
            "certified_linear_order": self.certified_linear_order,
            "certified_nonlinear_order": self.certified_nonlinear_order,
        }


def _linear_order(res, tol):
    order = 0
    for q, r in res:
        if abs(r) > tol:
            break
        order = q
    return order


def order_report(tab: ButcherTableau, q_max: int = 8, tol: float = DEFAULT_TOL) -> OrderReport:
    lin = linear_residuals(tab, q_max)
    nl = nonlinear_residuals(tab)
    vals = list(nl.values())
    p = 0
    for order in (1, 2, 3, 4):
        if all(abs(v) <= tol for v in vals[: NONLINEAR_COUNT[order]]):
            p = order
    # the nonlinear conditions only imply the linear ones to within a small
    # multiple of tol; keep p <= p_lin explicitly
    p = min(p, _linear_order(linear_residuals(tab, max(q_max, 4)), tol))
    return OrderReport(lin, nl, _linear_order(lin, tol), p, tol, tab.label)


def certified_orders(tab: ButcherTableau, q_max: int = 12, tol: float = DEFAULT_TOL) -> tuple[int, int]:
    rep = order_report(tab, q_max, tol)
    return rep.certified_linear_order, rep.certified_nonlinear_order
