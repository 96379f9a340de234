"""Fundamental solutions of linear time-dependent systems and extraction of
the scattering matrix relative to the free centre rotation.

The scattering matrix of a centre-block problem is the stabilised value of
Psi(-T) Phi(T, -T) Psi(-T), where Phi is the fundamental solution of the
perturbed variational equation and Psi the free centre flow.  For the
compactly supported perturbations built here the limit is attained exactly
once T clears the support, but the convergence loop still runs so that a
mis-specified problem is reported instead of silently truncated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .matkit import (
    _square,
    center_frequencies,
    max_abs,
    standard_symplectic_form,
    symplectic_rotation,
)

DEFAULT_SIGMA_TOL = 1e-8
DEFAULT_INTEGRATOR_TOL = 1e-10
_MAX_STEPS = 2 ** 22


class ScatteringConvergenceError(RuntimeError):
    """The scattering iterates failed to stabilise before the support ran out."""

    def __init__(self, trace: list[tuple[float, float]]):
        self.trace = list(trace)
        pretty = ", ".join(f"T={t:g}: {r:.3e}" for t, r in self.trace)
        super().__init__(
            "scattering matrix did not converge before the declared support "
            f"was exhausted (residual trace: {pretty})"
        )


def center_linear_flow(D_center, t: float) -> np.ndarray:
    """Free centre flow Psi(t): the symplectic rotation by t * omega."""
    w = center_frequencies(D_center)
    return symplectic_rotation(float(t) * w)


def _field_values(fld: Callable, ts: np.ndarray, d: int) -> np.ndarray:
    values = None
    try:
        batch = np.asarray(fld(ts), dtype=float)
        if batch.shape == (ts.size, d, d):
            values = batch
    except Exception:
        values = None
    if values is None:
        values = np.stack([np.asarray(fld(float(t)), dtype=float) for t in ts])
    if values.shape != (ts.size, d, d):
        raise ValueError(f"field returned shape {values.shape}, expected ({ts.size}, {d}, {d})")
    if not np.all(np.isfinite(values)):
        raise ValueError("field produced non-finite values")
    return values


def _rk4_product(fld: Callable, t0: float, t1: float, n: int, d: int) -> np.ndarray:
    # classic RK4 on the matrix equation, written as one update matrix per step
    # so the per-step factors can be built and multiplied in batch
    h = (t1 - t0) / n
    ts = t0 + (t1 - t0) * np.arange(2 * n + 1) / (2 * n)
    A = _field_values(fld, ts, d)
    A1 = A[0 : 2 * n : 2]
    Am = A[1 : 2 * n : 2]
    A4 = A[2 : 2 * n + 1 : 2]
    eye = np.eye(d)
    K1 = A1
    K2 = Am + (0.5 * h) * (Am @ K1)
    K3 = Am + (0.5 * h) * (Am @ K2)
    K4 = A4 + h * (A4 @ K3)
    U = eye + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)
    P = U
    while P.shape[0] > 1:
        m = P.shape[0]
        if m % 2:
            P = np.concatenate([P[1::2] @ P[0 : m - 1 : 2], P[m - 1 :]])
        else:
            P = P[1::2] @ P[0::2]
    return P[0]


def fundamental_solution(fld: Callable, t0: float, t1: float, tol: float = DEFAULT_INTEGRATOR_TOL) -> np.ndarray:
    """Phi(t1, t0) for udot = field(t) u, by fixed-step RK4 with step doubling.

    The step count is doubled until two successive refinements agree to
    within tol * max(1, t1 - t0) in max-abs norm; the finer result is
    returned.
    """
    t0, t1 = float(t0), float(t1)
    if not (np.isfinite(t0) and np.isfinite(t1)):
        raise ValueError("integration endpoints must be finite")
    if t1 < t0:
        raise ValueError("t0 must not exceed t1")
    if tol <= 0:
        raise ValueError("integrator tolerance must be positive")
    probe = _square(np.asarray(fld(t0), dtype=float), "field value")
    d = probe.shape[0]
    if t1 == t0:
        return np.eye(d)
    span = t1 - t0
    n = int(2 ** np.ceil(np.log2(max(16.0, 8.0 * span))))
    previous = _rk4_product(fld, t0, t1, n, d)
    budget = tol * max(1.0, span)
    while True:
        n *= 2
        if n > _MAX_STEPS:
            raise ArithmeticError("step refinement exhausted without meeting the tolerance")
        current = _rk4_product(fld, t0, t1, n, d)
        if max_abs(current - previous) <= budget:
            return current
        previous = current


@dataclass(eq=False)
class ScatteringProblem:
    """A centre-block variational problem with a compactly supported perturbation.

    `field` maps t to the 2l x 2l coefficient matrix; outside
    [-support_halfwidth, support_halfwidth] it must equal `asymptotic_field`,
    which is J @ D_center.  The declaration is the caller's contract; a wrong
    support surfaces as a convergence failure in scattering_matrix.
    """

    field: Callable
    asymptotic_field: np.ndarray
    support_halfwidth: float
    D_center: np.ndarray

    def __post_init__(self):
        self.D_center = _square(self.D_center, "D_center")
        omega = center_frequencies(self.D_center)
        self.asymptotic_field = _square(self.asymptotic_field, "asymptotic_field")
        expected = standard_symplectic_form(omega.size) @ self.D_center
        if max_abs(self.asymptotic_field - expected) > 1e-12 * max(1.0, max_abs(expected)):
            raise ValueError("asymptotic_field must equal J @ D_center")
        self.support_halfwidth = float(self.support_halfwidth)
        if not (self.support_halfwidth > 0):
            raise ValueError("support_halfwidth must be positive")
        sample = _square(np.asarray(self.field(0.0), dtype=float), "field value")
        if sample.shape != self.D_center.shape:
            raise ValueError("field dimension does not match D_center")

    @property
    def dim(self) -> int:
        return self.D_center.shape[0]


@dataclass(frozen=True, eq=False)
class ScatteringResult:
    """Scattering matrix with its convergence and structure diagnostics."""

    sigma: np.ndarray
    T_used: float
    residual: float
    symplectic_defect: float

    def to_json_dict(self) -> dict:
        return {
            "sigma": {
                "dim": int(self.sigma.shape[0]),
                "data": [float(x) for x in self.sigma.ravel()],
            },
            "T_used": float(self.T_used),
            "residual": float(self.residual),
            "symplectic_defect": float(self.symplectic_defect),
        }


def scattering_matrix(
    problem: ScatteringProblem,
    tol: float = DEFAULT_SIGMA_TOL,
    integrator_tol: float = DEFAULT_INTEGRATOR_TOL,
) -> ScatteringResult:
    """Stabilised value of Psi(-T) Phi(T, -T) Psi(-T) over increasing T.

    T advances in unit steps; the loop stops once two successive iterates
    agree to within tol entrywise.  Failure to stabilise before
    support_halfwidth + 2 raises ScatteringConvergenceError carrying the
    residual trace, which signals a mis-specified problem.
    """
    if tol <= 0:
        raise ValueError("scattering tolerance must be positive")
    D = problem.D_center
    l = D.shape[0] // 2
    J = standard_symplectic_form(l)
    t_max = problem.support_halfwidth + 2.0
    T = 1.0
    Phi = fundamental_solution(problem.field, -T, T, integrator_tol)
    half = center_linear_flow(D, -T)
    sigma_prev = half @ Phi @ half
    trace: list[tuple[float, float]] = []
    while True:
        T_next = T + 1.0
        ahead = fundamental_solution(problem.field, T, T_next, integrator_tol)
        behind = fundamental_solution(problem.field, -T_next, -T, integrator_tol)
        Phi = ahead @ Phi @ behind
        half = center_linear_flow(D, -T_next)
        sigma = half @ Phi @ half
        residual = max_abs(sigma - sigma_prev)
        trace.append((T_next, residual))
        if residual <= tol:
            defect = max_abs(sigma.T @ J @ sigma - J)
            return ScatteringResult(
                sigma=sigma,
                T_used=T_next,
                residual=residual,
                symplectic_defect=defect,
            )
        if T_next > t_max:
            raise ScatteringConvergenceError(trace)
        sigma_prev = sigma
        T = T_next
