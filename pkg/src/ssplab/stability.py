"""Linear stability polynomial and boundary-locus data for plotting."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .tableau import ButcherTableau


@dataclass(frozen=True, eq=False)
class StabilityPolynomial:
    """Coefficients of R(z), lowest degree first."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or len(c) < 1 or c[0] != 1.0:
            raise ValueError("stability polynomial needs coeffs[0] == 1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        # Horner, highest degree first
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for a in self.coeffs[::-1]:
            out = out * z + a
        return out


def stability_polynomial(tab: ButcherTableau) -> StabilityPolynomial:
    """R(z) = 1 + sum_q (b^T A^{q-1} e) z^q."""
    coeffs = [1.0]
    w = np.ones(tab.s)
    for _ in range(tab.s):
        coeffs.append(float(tab.b @ w))
        w = tab.A @ w
    return StabilityPolynomial(np.array(coeffs))


def region_boundary(poly: StabilityPolynomial, n_theta: int = 256, n_samples: int = 4000, radius=None):
    """Outermost |R(z)| = 1 crossing along each ray z = rho e^{i theta}.

    Returns ``(theta, z)`` arrays; rays without a crossing in
    ``(0, radius]`` contribute the origin. The outermost crossing is
    bracketed on a uniform grid and refined by bisection. ``radius`` defaults to twice the
    degree.
    """
    if n_theta < 8:
        raise ValueError("n_theta must be >= 8")
    if radius is None:
        radius = 2.0 * max(poly.degree, 1)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    # one sample past the radius so a crossing exactly at it (forward Euler at -2) is kept
    rho = np.linspace(0.0, radius * (1.0 + 1.0 / n_samples), n_samples + 2)[1:]
    points = np.zeros(n_theta, dtype=complex)
    for k, th in enumerate(theta):
        ray = np.exp(1j * th)
        g = np.abs(poly(rho * ray)) - 1.0
        cross = np.flatnonzero((g[:-1] <= 0) & (g[1:] > 0))
        if len(cross) == 0:
            continue
        lo, hi = rho[cross[-1]], rho[cross[-1] + 1]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if abs(poly(mid * ray)) - 1.0 <= 0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-15 * hi:
                break
        points[k] = lo * ray
    return theta, points


def boundary_csv(theta, points) -> str:
    buf = io.StringIO()
    buf.write("theta,re,im\n")
    for th, z in zip(theta, points):
        buf.write(f"{th:.17g},{z.real:.17g},{z.imag:.17g}\n")
    return buf.getvalue()
