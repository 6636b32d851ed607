"""Butcher and Shu-Osher representations of explicit Runge-Kutta methods.

Shu-Osher matrices use a dense ``(s+1, s+1)`` layout: row/column ``i``
refers to stage ``u^(i)``, with ``u^(0) = u^n`` and ``u^(s) = u^{n+1}``.
Stage ``u^(i)`` for ``i < s`` is the Butcher stage ``i + 1``.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from pathlib import Path

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    InvalidMethodSpec,
    InvalidStageCount,
    InvariantViolation,
    NotAbsolutelyMonotonic,
    ParseError,
    UnknownMethod,
)

SO_ROW_TOL = 1e-12
NEGATIVE_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    """Explicit RK coefficients ``(A, b)``; ``c`` is always ``A @ e``."""

    A: np.ndarray
    b: np.ndarray
    label: str = ""

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise InvariantViolation(f"A must be square with s >= 1, got shape {A.shape}")
        if b.shape != (A.shape[0],):
            raise InvariantViolation(f"b must have length {A.shape[0]}, got shape {b.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InvariantViolation("non-finite coefficient")
        upper = np.argwhere(np.triu(A) != 0)
        if len(upper):
            i, j = upper[0]
            raise InvariantViolation("A is not strictly lower triangular", (int(i), int(j)))
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "b", _frozen(b))

    @property
    def s(self) -> int:
        return len(self.b)

    @property
    def c(self) -> np.ndarray:
        return self.A.sum(axis=1)

    def allclose(self, other: "ButcherTableau", atol=1e-12) -> bool:
        return (
            self.s == other.s
            and np.allclose(self.A, other.A, rtol=0, atol=atol)
            and np.allclose(self.b, other.b, rtol=0, atol=atol)
        )

    def with_label(self, label: str) -> "ButcherTableau":
        return ButcherTableau(self.A, self.b, label)

    def __repr__(self):
        return f"ButcherTableau(label={self.label!r}, s={self.s})"


@dataclass(frozen=True, eq=False)
class ShuOsherForm:
    """Convex-combination form with ``(s+1, s+1)`` matrices ``alpha``, ``beta``.

    Construction checks ``alpha >= 0`` and unit row sums for stages 1..s.
    Whether the form is an SSP decomposition (``alpha == 0`` implies
    ``beta == 0``, ``beta >= 0``) is reported by :meth:`ssp_coefficient`.
    """

    alpha: np.ndarray
    beta: np.ndarray
    label: str = ""

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        n = alpha.shape[0] if alpha.ndim == 2 else 0
        if n < 2 or alpha.shape != (n, n) or beta.shape != (n, n):
            raise InvariantViolation("alpha and beta must be equal (s+1)x(s+1) matrices")
        for name, m in (("alpha", alpha), ("beta", beta)):
            if not np.all(np.isfinite(m)):
                raise InvariantViolation(f"non-finite entry in {name}")
            upper = np.argwhere(np.triu(m) != 0)
            if len(upper):
                i, j = upper[0]
                raise InvariantViolation(f"{name} is not strictly lower triangular", (int(i), int(j)))
        neg = np.argwhere(alpha < -NEGATIVE_TOL)
        if len(neg):
            i, j = neg[0]
            raise InvariantViolation("negative alpha entry", (int(i), int(j)))
        sums = alpha[1:].sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > SO_ROW_TOL)
        if len(bad):
            raise InvariantViolation("alpha row does not sum to 1", int(bad[0]) + 1)
        object.__setattr__(self, "alpha", _frozen(np.maximum(alpha, 0.0)))
        object.__setattr__(self, "beta", _frozen(beta))

    @property
    def s(self) -> int:
        return self.alpha.shape[0] - 1

    def ssp_coefficient(self, tol=NEGATIVE_TOL) -> float:
        """min over entries of alpha/beta, 0 if the form is not an SSP decomposition."""
        if np.any(self.beta < -tol):
            return 0.0
        active = self.beta > tol
        if np.any(active & (self.alpha <= 0.0)):
            return 0.0
        if not np.any(active):
            return np.inf
        return float(np.min(self.alpha[active] / self.beta[active]))

    def __repr__(self):
        return f"ShuOsherForm(label={self.label!r}, s={self.s})"


@dataclass(frozen=True)
class MethodSpec:
    """Target ``(s, p_lin, p)`` for a method search."""

    s: int
    p_lin: int
    p: int
    label: str = ""

    def __post_init__(self):
        if not 1 <= self.p <= 4:
            raise InvalidMethodSpec(f"nonlinear order p={self.p} outside 1..4")
        if not self.p <= self.p_lin <= self.s:
            raise InvalidMethodSpec(f"need p <= p_lin <= s, got ({self.s}, {self.p_lin}, {self.p})")

    @property
    def name(self) -> str:
        return self.label or f"lnl-{self.s}-{self.p_lin}-{self.p}"


def shu_osher_to_butcher(form: ShuOsherForm) -> ButcherTableau:
    # (I - alpha) Ahat = beta, forward substitution over stages
    n = form.s + 1
    ahat = solve_triangular(np.eye(n) - form.alpha, form.beta, lower=True, unit_diagonal=True)
    ahat = np.tril(ahat, -1)
    s = form.s
    return ButcherTableau(ahat[:s, :s], ahat[s, :s], form.label)


def extended_matrix(tab: ButcherTableau) -> np.ndarray:
    """The ``(s+1, s+1)`` matrix ``[[A, 0], [b, 0]]``."""
    s = tab.s
    K = np.zeros((s + 1, s + 1))
    K[:s, :s] = tab.A
    K[s, :s] = tab.b
    return K


def butcher_to_canonical_shu_osher(tab: ButcherTableau, r: float) -> ShuOsherForm:
    """Canonical Shu-Osher form at radius ``r``.

    ``beta = K (I + rK)^{-1}``, ``alpha = r beta`` with the remainder of
    each row placed on the ``u^n`` column. Raises NotAbsolutelyMonotonic
    if beta or that remainder is negative, i.e. if ``r`` exceeds the
    radius of absolute monotonicity.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    K = extended_matrix(tab)
    n = K.shape[0]
    beta = solve_triangular(np.eye(n) + r * K, K, lower=True, unit_diagonal=True)
    beta = np.tril(beta, -1)
    neg = np.argwhere(beta < -NEGATIVE_TOL)
    if len(neg):
        i, j = neg[0]
        raise NotAbsolutelyMonotonic(f"canonical form at r={r!r} has beta[{i},{j}] = {beta[i, j]:.3e} < 0")
    # clip before scaling so roundoff in beta is not amplified by r
    beta = np.maximum(beta, 0.0)
    alpha = r * beta
    # weight left on u^n, (I + rK)^{-1} e; it must be nonnegative on its own
    v = 1.0 - alpha[1:].sum(axis=1)
    neg = np.flatnonzero(v < -NEGATIVE_TOL)
    if len(neg):
        i = neg[0] + 1
        raise NotAbsolutelyMonotonic(f"canonical form at r={r!r} leaves weight {v[i - 1]:.3e} < 0 on u^n in row {i}")
    alpha[1:, 0] += np.maximum(v, 0.0)
    return ShuOsherForm(alpha, beta, tab.label)


def _so_from_rows(s: int, rows: dict, label: str) -> ShuOsherForm:
    # rows: stage -> list of (j, alpha_ij, beta_ij)
    alpha = np.zeros((s + 1, s + 1))
    beta = np.zeros((s + 1, s + 1))
    for i, terms in rows.items():
        for j, a, bt in terms:
            alpha[i, j] = float(a)
            beta[i, j] = float(bt)
    return ShuOsherForm(alpha, beta, label)


def _ssprk22():
    return {1: [(0, 1, 1)], 2: [(0, Fraction(1, 2), 0), (1, Fraction(1, 2), Fraction(1, 2))]}


def _ssprk33():
    return {
        1: [(0, 1, 1)],
        2: [(0, Fraction(3, 4), 0), (1, Fraction(1, 4), Fraction(1, 4))],
        3: [(0, Fraction(1, 3), 0), (2, Fraction(2, 3), Fraction(2, 3))],
    }


def _ssprk54():
    return {
        1: [(0, 1.0, 0.391752226571890)],
        2: [(0, 0.444370493651235, 0.0), (1, 0.555629506348765, 0.368410593050371)],
        3: [(0, 0.620101851488403, 0.0), (2, 0.379898148511597, 0.251891774271694)],
        4: [(0, 0.178079954393132, 0.0), (3, 0.821920045606868, 0.544974750228521)],
        5: [
            (2, 0.517231671970585, 0.0),
            (3, 0.096059710526147, 0.063692468666290),
            (4, 0.386708617503269, 0.226007483236906),
        ],
    }


def _ssprk104():
    sixth = Fraction(1, 6)
    rows = {1: [(0, 1, sixth)]}
    for i in (2, 3, 4):
        rows[i] = [(i - 1, 1, sixth)]
    rows[5] = [(0, Fraction(3, 5), 0), (4, Fraction(2, 5), Fraction(1, 15))]
    for i in (6, 7, 8, 9):
        rows[i] = [(i - 1, 1, sixth)]
    rows[10] = [
        (0, Fraction(1, 25), 0),
        (4, Fraction(9, 25), Fraction(3, 50)),
        (9, Fraction(3, 5), Fraction(1, 10)),
    ]
    return rows


NAMED_METHODS = {
    "ssprk22": (2, _ssprk22),
    "ssprk33": (3, _ssprk33),
    "ssprk54": (5, _ssprk54),
    "ssprk104": (10, _ssprk104),
}


def make_named_shu_osher(name: str) -> ShuOsherForm:
    key = name.lower()
    if key not in NAMED_METHODS:
        raise UnknownMethod(f"unknown method {name!r}; expected one of {sorted(NAMED_METHODS)}")
    s, rows = NAMED_METHODS[key]
    return _so_from_rows(s, rows(), key)


def make_named(name: str) -> ButcherTableau:
    return shu_osher_to_butcher(make_named_shu_osher(name))


FAMILIES = ("plin_eq_s", "plin_eq_s_minus_1")


def family_weights(s: int, kind: str) -> list[Fraction]:
    """Final-stage weights ``alpha^s_k``, k = 0..s-1, in exact arithmetic."""
    if kind == "plin_eq_s_minus_1":
        if s < 2:
            raise InvalidStageCount(f"plin_eq_s_minus_1 needs s >= 2, got {s}")
        w = [Fraction(0), Fraction(1)]
        for m in range(3, s + 1):
            new = [Fraction(0)] * m
            for k in range(1, m - 1):
                new[k] = Fraction(2, k) * w[k - 1]
            new[m - 1] = Fraction(2, m) * w[m - 2]
            new[0] = 1 - sum(new[1:])
            w = new
        return w
    if kind == "plin_eq_s":
        if s < 1:
            raise InvalidStageCount(f"plin_eq_s needs s >= 1, got {s}")
        w = [Fraction(1)]
        for m in range(2, s + 1):
            new = [Fraction(0)] * m
            for k in range(1, m - 1):
                new[k] = Fraction(1, k) * w[k - 1]
            new[m - 1] = Fraction(1, factorial(m))
            new[0] = 1 - sum(new[1:])
            w = new
        return w
    raise UnknownMethod(f"unknown family {kind!r}; expected one of {FAMILIES}")


def make_linear_family(s: int, kind: str) -> ShuOsherForm:
    """Optimal linear-order families in canonical Shu-Osher form.

    ``plin_eq_s``: forward Euler interior stages, C = 1.
    ``plin_eq_s_minus_1``: half-step interior stages, C = 2.
    """
    if not isinstance(s, (int, np.integer)):
        raise InvalidStageCount(f"stage count must be an integer, got {s!r}")
    w = family_weights(int(s), kind)
    h = Fraction(1) if kind == "plin_eq_s" else Fraction(1, 2)
    rows = {i: [(i - 1, 1, h)] for i in range(1, s)}
    final = [(k, w[k], 0) for k in range(s - 1) if w[k] != 0]
    final.append((s - 1, w[s - 1], w[s - 1] * h))
    rows[s] = final
    return _so_from_rows(s, rows, f"{kind}/{s}")


def family_tableau(s: int, kind: str) -> ButcherTableau:
    return shu_osher_to_butcher(make_linear_family(s, kind))


# -- file format -------------------------------------------------------------


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _matrix_json(m) -> str:
    return "[" + ", ".join("[" + ", ".join(_num(v) for v in row) + "]" for row in m) + "]"


def _vector_json(v) -> str:
    return "[" + ", ".join(_num(x) for x in v) + "]"


def tableau_to_json(tab: ButcherTableau) -> str:
    return (
        "{\n"
        f'  "label": {json.dumps(tab.label)},\n'
        f'  "s": {tab.s},\n'
        f'  "A": {_matrix_json(tab.A)},\n'
        f'  "b": {_vector_json(tab.b)}\n'
        "}\n"
    )


def shu_osher_to_json(form: ShuOsherForm) -> str:
    return (
        "{\n"
        f'  "label": {json.dumps(form.label)},\n'
        f'  "s": {form.s},\n'
        f'  "alpha": {_matrix_json(form.alpha)},\n'
        f'  "beta": {_matrix_json(form.beta)}\n'
        "}\n"
    )


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_tableau(tab: ButcherTableau, path) -> None:
    atomic_write_text(path, tableau_to_json(tab))


def write_shu_osher(form: ShuOsherForm, path) -> None:
    atomic_write_text(path, shu_osher_to_json(form))


def _load_json(text: str, keys) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object")
    missing = [k for k in keys if k not in data]
    if missing:
        raise ParseError(f"missing keys: {missing}")
    return data


def _square(data, key, n):
    try:
        m = np.array(data[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{key!r} is not a numeric matrix") from exc
    if m.shape != (n, n):
        raise ParseError(f"{key!r} must be {n}x{n}, got shape {m.shape}")
    return m


def tableau_from_json(text: str) -> ButcherTableau:
    data = _load_json(text, ("s", "A", "b"))
    s = data["s"]
    if not isinstance(s, int) or s < 1:
        raise ParseError(f"'s' must be a positive integer, got {s!r}")
    A = _square(data, "A", s)
    try:
        b = np.array(data["b"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError("'b' is not a numeric vector") from exc
    if b.shape != (s,):
        raise ParseError(f"'b' must have length {s}, got shape {b.shape}")
    return ButcherTableau(A, b, str(data.get("label", "")))


def shu_osher_from_json(text: str) -> ShuOsherForm:
    data = _load_json(text, ("s", "alpha", "beta"))
    s = data["s"]
    if not isinstance(s, int) or s < 1:
        raise ParseError(f"'s' must be a positive integer, got {s!r}")
    alpha = _square(data, "alpha", s + 1)
    beta = _square(data, "beta", s + 1)
    return ShuOsherForm(alpha, beta, str(data.get("label", "")))


def read_tableau(path) -> ButcherTableau:
    return tableau_from_json(Path(path).read_text())


def read_shu_osher(path) -> ShuOsherForm:
    return shu_osher_from_json(Path(path).read_text())
