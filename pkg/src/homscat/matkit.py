"""Dense linear algebra for small real matrices with symplectic structure.

Everything here targets matrices of at most a few dozen rows: the symmetric
eigensolver is a cyclic Jacobi iteration, the exponential is truncated
scaling-and-squaring, and tolerances are expressed in the entrywise max-abs
norm.  numpy supplies storage and arithmetic only; no LAPACK-backed
decomposition is used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_JACOBI_RELTOL = 1e-12
_JACOBI_MAX_SWEEPS = 64
_EXP_SERIES_ORDER = 12
_SYMMETRY_TOL = 1e-10


class NotPositiveDefiniteError(ValueError):
    """Symmetric square root requested for a matrix that is not SPD."""


def max_abs(M) -> float:
    """Entrywise max-abs norm; the reference norm for tolerances throughout."""
    A = np.asarray(M, dtype=float)
    return float(np.max(np.abs(A))) if A.size else 0.0


def _square(M, name: str = "matrix") -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ValueError(f"{name} must be square and nonempty, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def is_symmetric(M, tol: float = _SYMMETRY_TOL) -> bool:
    A = _square(M)
    return max_abs(A - A.T) <= tol * max(1.0, max_abs(A))


def _require_symmetric(M, name: str = "matrix", tol: float = _SYMMETRY_TOL) -> np.ndarray:
    A = _square(M, name)
    defect = max_abs(A - A.T)
    if defect > tol * max(1.0, max_abs(A)):
        raise ValueError(f"{name} is not symmetric (asymmetry {defect:.3e})")
    return 0.5 * (A + A.T)


def standard_symplectic_form(n: int) -> np.ndarray:
    """The 2n x 2n block matrix [[0, I], [-I, 0]]."""
    n = int(n)
    if n < 1:
        raise ValueError("the symplectic form needs at least one conjugate pair")
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def is_symplectic(M, tol: float) -> bool:
    """True iff M^T J M reproduces J to within tol in max-abs norm."""
    A = _square(M)
    if A.shape[0] % 2:
        raise ValueError("symplectic matrices have even dimension")
    J = standard_symplectic_form(A.shape[0] // 2)
    return max_abs(A.T @ J @ A - J) <= tol


def symplectic_rotation(theta) -> np.ndarray:
    """Block-planar rotation by theta_i in each conjugate pair (i, n+i).

    The returned matrix is orthogonal and symplectic; it is the fundamental
    solution of the decoupled centre dynamics at unit frequencies theta.
    """
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    if th.ndim != 1 or th.size == 0:
        raise ValueError("theta must be a nonempty vector of angles")
    if not np.all(np.isfinite(th)):
        raise ValueError("theta contains non-finite entries")
    n = th.size
    R = np.zeros((2 * n, 2 * n))
    i = np.arange(n)
    R[i, i] = np.cos(th)
    R[i, n + i] = np.sin(th)
    R[n + i, i] = -np.sin(th)
    R[n + i, n + i] = np.cos(th)
    return R


def matrix_exponential(M) -> np.ndarray:
    """exp(M) by scaling-and-squaring over a fixed-order truncated series.

    The argument is halved until its max-row-sum norm is at most 0.5, the
    series is summed to order 12 by Horner's scheme, and the result is
    squared back up.  Accuracy is far below 1e-8 for the matrix sizes used
    in this package.
    """
    A = _square(M)
    norm = float(np.max(np.sum(np.abs(A), axis=1)))
    squarings = 0 if norm <= 0.5 else int(np.ceil(np.log2(norm / 0.5)))
    A = A / (2.0 ** squarings)
    E = np.eye(A.shape[0])
    for k in range(_EXP_SERIES_ORDER, 0, -1):
        E = np.eye(A.shape[0]) + (A @ E) / k
    for _ in range(squarings):
        E = E @ E
    return E


def eigh_jacobi(S) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Returns (eigenvalues sorted descending, orthonormal eigenvector columns).
    Iteration stops when the off-diagonal Frobenius norm drops below
    1e-12 times the Frobenius norm of the input.
    """
    A = _require_symmetric(S, "eigendecomposition input")
    d = A.shape[0]
    V = np.eye(d)
    scale = float(np.sqrt(np.sum(A * A)))
    if scale == 0.0:
        return np.zeros(d), V
    target = _JACOBI_RELTOL * scale
    # entries this small cannot lift the off-diagonal norm above target
    skip = target / (2.0 * d * d)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off_part = A - np.diag(np.diag(A))
        off = float(np.sqrt(np.sum(off_part * off_part)))
        if off < target:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if abs(apq) <= skip:
                    continue
                diff = A[q, q] - A[p, p]
                if abs(apq) * 1e15 < abs(diff):
                    t = apq / diff
                else:
                    tau = diff / (2.0 * apq)
                    t = 1.0 if tau == 0.0 else np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise ArithmeticError("Jacobi iteration did not converge within the sweep limit")
    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]


def classification_tol(S) -> float:
    """Scale-relative default tolerance separating zero from nonzero eigenvalues."""
    return 1e-7 * max(1.0, max_abs(S))


@dataclass(frozen=True, eq=False)
class SignatureReport:
    """Inertia of a symmetric matrix at a stated zero-tolerance.

    Eigenvalues with magnitude at most tol count as zero; ties at exactly
    +-tol are zeros, since a vanishing eigenvalue must be surfaced rather
    than silently classified.
    """

    n_pos: int
    n_neg: int
    n_zero: int
    eigenvalues: np.ndarray
    tol: float

    @property
    def inertia(self) -> tuple[int, int, int]:
        return (self.n_pos, self.n_neg, self.n_zero)

    @property
    def degenerate(self) -> bool:
        return self.n_zero > 0

    @property
    def dim(self) -> int:
        return self.n_pos + self.n_neg + self.n_zero

    def to_json_dict(self) -> dict:
        return {
            "n_pos": int(self.n_pos),
            "n_neg": int(self.n_neg),
            "n_zero": int(self.n_zero),
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "tol": float(self.tol),
        }


def inertia(S, tol: float | None = None) -> SignatureReport:
    """Count eigenvalues of a symmetric matrix above tol, below -tol, and between."""
    A = _require_symmetric(S, "inertia input")
    if tol is None:
        tol = classification_tol(A)
    if tol <= 0:
        raise ValueError("inertia tolerance must be positive")
    w, _ = eigh_jacobi(A)
    n_pos = int(np.sum(w > tol))
    n_neg = int(np.sum(w < -tol))
    return SignatureReport(
        n_pos=n_pos,
        n_neg=n_neg,
        n_zero=int(w.size - n_pos - n_neg),
        eigenvalues=w,
        tol=float(tol),
    )


def spd_sqrt(S) -> np.ndarray:
    """Unique symmetric square root of a symmetric positive definite matrix."""
    A = _require_symmetric(S, "square root input")
    w, V = eigh_jacobi(A)
    floor = classification_tol(A)
    if w[-1] <= floor:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite: smallest eigenvalue {w[-1]:.3e} <= {floor:.3e}"
        )
    T = (V * np.sqrt(w)) @ V.T
    return 0.5 * (T + T.T)


def center_diagonal(omega) -> np.ndarray:
    """diag(omega, omega): the paired diagonal quadratic form of a centre block."""
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    if w.ndim != 1 or w.size == 0 or not np.all(np.isfinite(w)):
        raise ValueError("omega must be a nonempty finite vector")
    return np.diag(np.concatenate([w, w]))


def center_frequencies(D) -> np.ndarray:
    """Recover omega from diag(omega, omega), validating the paired pattern."""
    A = _square(D, "centre diagonal")
    if A.shape[0] % 2:
        raise ValueError("centre diagonal must have even dimension")
    l = A.shape[0] // 2
    if max_abs(A - np.diag(np.diag(A))) > 1e-12 * max(1.0, max_abs(A)):
        raise ValueError("centre block must be diagonal")
    w = np.diag(A)[:l].copy()
    if max_abs(np.diag(A)[l:] - w) > 1e-12 * max(1.0, max_abs(A)):
        raise ValueError("centre diagonal must repeat its frequencies in both blocks")
    return w
