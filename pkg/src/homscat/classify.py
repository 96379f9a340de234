"""Hessian assembly from scattering matrices, signature classification, the
signature-realization pipeline, and the time-reversible case.

The reduced Hessian of the splitting function is sigma^T D sigma - D with
D = diag(omega, omega).  It is never definite; every indefinite signature
(m, 2l - m) is reachable by choosing a spectrum that majorizes the balanced
+-1 diagonal, building a symmetric target with that diagonal and spectrum,
solving the bracket equation for a generator B, and taking
sigma = exp(-eps J B) for small eps.  When an antisymplectic involution R
reverses the dynamics, sigma R sigma = R forces the signature (l, l).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .majorize import (
    CenterBlock,
    hessian_bracket,
    indefinite_spectrum,
    mirsky_matrix,
    solve_bracket,
)
from .matkit import (
    SignatureReport,
    _square,
    center_frequencies,
    eigh_jacobi,
    inertia,
    is_symplectic,
    matrix_exponential,
    max_abs,
    spd_sqrt,
    standard_symplectic_form,
)

_SYMPLECTIC_PRECONDITION_TOL = 1e-7
_STRUCTURE_TOL = 1e-10
_REALIZE_MAX_HALVINGS = 20


class RealizationError(RuntimeError):
    """The eps-halving retry loop was exhausted without hitting the target signature."""


def hessian_from_scattering(sigma, D_center) -> np.ndarray:
    """sigma^T D sigma - D; requires sigma symplectic within 1e-7."""
    S = _square(sigma, "scattering matrix")
    D = _square(D_center, "D_center")
    center_frequencies(D)
    if S.shape != D.shape:
        raise ValueError("scattering matrix and centre diagonal have different dimensions")
    if not is_symplectic(S, _SYMPLECTIC_PRECONDITION_TOL):
        J = standard_symplectic_form(S.shape[0] // 2)
        defect = max_abs(S.T @ J @ S - J)
        raise ValueError(f"scattering matrix is not symplectic (defect {defect:.3e})")
    return S.T @ D @ S - D


def first_order_hessian(block: CenterBlock, B) -> np.ndarray:
    """First-order Hessian of the splitting function: the bracket of B."""
    return hessian_bracket(block, B)


def classify_hessian(Hess, tol: float | None = None) -> SignatureReport:
    """Inertia of the reduced Hessian; a nonzero n_zero flags degeneracy."""
    return inertia(Hess, tol)


@dataclass(frozen=True, eq=False)
class EnsembleSummary:
    """Definite-signature counts over a seeded random symplectic ensemble."""

    l: int
    omega: np.ndarray
    trials: int
    seed: int
    tol: float
    definite_positive: int
    definite_negative: int
    largest_min_eigenvalue: float
    smallest_max_eigenvalue: float

    def to_json_dict(self) -> dict:
        return {
            "l": int(self.l),
            "omega": [float(x) for x in self.omega],
            "trials": int(self.trials),
            "seed": int(self.seed),
            "tol": float(self.tol),
            "definite_positive": int(self.definite_positive),
            "definite_negative": int(self.definite_negative),
            "largest_min_eigenvalue": float(self.largest_min_eigenvalue),
            "smallest_max_eigenvalue": float(self.smallest_max_eigenvalue),
        }


def random_symplectic(l: int, rng: np.random.Generator, max_factors: int = 5, max_norm: float = 2.0) -> np.ndarray:
    """Product of up to max_factors exponentials exp(-J B) with random
    symmetric B scaled to a spectral norm drawn from (0.1, max_norm]."""
    J = standard_symplectic_form(l)
    sigma = np.eye(2 * l)
    for _ in range(int(rng.integers(1, max_factors + 1))):
        raw = rng.standard_normal((2 * l, 2 * l))
        B = 0.5 * (raw + raw.T)
        w, _ = eigh_jacobi(B)
        spectral = max(abs(w[0]), abs(w[-1]))
        if spectral == 0.0:
            continue
        B *= rng.uniform(0.1, max_norm) / spectral
        sigma = sigma @ matrix_exponential(-J @ B)
    return sigma


def indefiniteness_ensemble(D_center, trials: int, seed: int, tol: float = 1e-9) -> EnsembleSummary:
    """Extreme Hessian eigenvalues over a seeded random symplectic ensemble.

    Each trial draws its generator from (seed, trial index), so the summary
    is reproducible regardless of evaluation order.  Both definite counts
    must come out zero: the reduced Hessian is never definite.
    """
    D = _square(D_center, "D_center")
    omega = center_frequencies(D)
    trials = int(trials)
    if trials < 1:
        raise ValueError("need at least one trial")
    definite_pos = definite_neg = 0
    largest_min = -np.inf
    smallest_max = np.inf
    for k in range(trials):
        rng = np.random.default_rng((int(seed), k))
        sigma = random_symplectic(omega.size, rng)
        H = hessian_from_scattering(sigma, D)
        w, _ = eigh_jacobi(H)
        lo, hi = float(w[-1]), float(w[0])
        largest_min = max(largest_min, lo)
        smallest_max = min(smallest_max, hi)
        if lo > tol:
            definite_pos += 1
        if hi < -tol:
            definite_neg += 1
    return EnsembleSummary(
        l=omega.size,
        omega=omega,
        trials=trials,
        seed=int(seed),
        tol=float(tol),
        definite_positive=definite_pos,
        definite_negative=definite_neg,
        largest_min_eigenvalue=largest_min,
        smallest_max_eigenvalue=smallest_max,
    )


@dataclass(frozen=True, eq=False)
class RealizationReport:
    """End-to-end witness that the signature (m, 2l - m) is realised."""

    l: int
    m: int
    b: np.ndarray
    G: np.ndarray
    B: np.ndarray
    eps_used: float
    sigma: np.ndarray
    achieved: SignatureReport
    first_order_gap: float
    gap_constant: float

    def to_json_dict(self) -> dict:
        def mat(M):
            return {"dim": int(M.shape[0]), "data": [float(x) for x in M.ravel()]}

        return {
            "l": int(self.l),
            "m": int(self.m),
            "b": [float(x) for x in self.b],
            "G": mat(self.G),
            "B": mat(self.B),
            "eps_used": float(self.eps_used),
            "sigma": mat(self.sigma),
            "achieved": self.achieved.to_json_dict(),
            "first_order_gap": float(self.first_order_gap),
            "gap_constant": float(self.gap_constant),
        }


def realize_signature(l: int, m: int, omega, eps: float) -> RealizationReport:
    """Construct a scattering matrix whose reduced Hessian has signature (m, 2l - m).

    Pipeline: majorizing spectrum -> symmetric target with the balanced +-1
    diagonal -> bracket solve for the generator B -> sigma = exp(-eps J B).
    If the achieved signature misses the target (the second-order terms are
    not yet dominated), eps is halved, up to 20 times.
    """
    l, m = int(l), int(m)
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    if w.size != l:
        raise ValueError(f"omega must have length l = {l}, got {w.size}")
    eps = float(eps)
    if not (eps > 0):
        raise ValueError("eps must be positive")
    block = CenterBlock(w)
    balanced = np.concatenate([np.ones(l), -np.ones(l)])
    b = indefinite_spectrum(l, m)
    G = mirsky_matrix(balanced, b)
    B = solve_bracket(block, G)
    target = (m, 2 * l - m, 0)
    eps_cur = eps
    for _ in range(_REALIZE_MAX_HALVINGS):
        sigma = matrix_exponential(-eps_cur * (block.J @ B))
        H = hessian_from_scattering(sigma, block.D)
        achieved = inertia(H)
        if achieved.inertia == target:
            gap = max_abs(H / eps_cur - hessian_bracket(block, B))
            return RealizationReport(
                l=l,
                m=m,
                b=b,
                G=G,
                B=B,
                eps_used=eps_cur,
                sigma=sigma,
                achieved=achieved,
                first_order_gap=gap,
                gap_constant=gap / eps_cur,
            )
        eps_cur *= 0.5
    raise RealizationError(
        f"signature ({m}, {2 * l - m}) not reached after {_REALIZE_MAX_HALVINGS} halvings of eps; "
        "the frequency choice is numerically degenerate"
    )


def center_reversal(l: int) -> np.ndarray:
    """The centre-block involution diag(I_l, -I_l): q -> q, p -> -p."""
    l = int(l)
    if l < 1:
        raise ValueError("l must be at least 1")
    return np.diag(np.concatenate([np.ones(l), -np.ones(l)]))


def random_reversible_form(l: int, rng: np.random.Generator) -> np.ndarray:
    """Random symmetric form commuting with the centre reversal: block
    diagonal over the +-1 eigenspaces, which makes exp(-eps J B) reversible."""
    def sym(n):
        raw = rng.standard_normal((n, n))
        return 0.5 * (raw + raw.T)

    B = np.zeros((2 * l, 2 * l))
    B[:l, :l] = sym(l)
    B[l:, l:] = sym(l)
    return B


@dataclass(frozen=True, eq=False)
class ReversibilityReport:
    residual: float
    tol: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {"residual": float(self.residual), "tol": float(self.tol), "passed": bool(self.passed)}


def _validated_reversal(R) -> np.ndarray:
    A = _square(R, "reversal")
    if A.shape[0] % 2:
        raise ValueError("reversal must act on an even-dimensional space")
    scale = max(1.0, max_abs(A))
    if max_abs(A - A.T) > _STRUCTURE_TOL * scale:
        raise ValueError("reversal is not symmetric")
    if max_abs(A.T @ A - np.eye(A.shape[0])) > _STRUCTURE_TOL * scale:
        raise ValueError("reversal is not orthogonal")
    if max_abs(A @ A - np.eye(A.shape[0])) > _STRUCTURE_TOL * scale:
        raise ValueError("reversal is not an involution")
    J = standard_symplectic_form(A.shape[0] // 2)
    if max_abs(A @ J + J @ A) > _STRUCTURE_TOL * scale:
        raise ValueError("reversal is not antisymplectic")
    return A


def check_reversibility(sigma, R, tol: float) -> ReversibilityReport:
    """Residual of sigma R sigma = R for a validated antisymplectic involution R."""
    S = _square(sigma, "scattering matrix")
    A = _validated_reversal(R)
    if S.shape != A.shape:
        raise ValueError("scattering matrix and reversal have different dimensions")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    residual = max_abs(S @ A @ S - A)
    return ReversibilityReport(residual=residual, tol=float(tol), passed=bool(residual <= tol))


def reversible_signature(sigma, R, D_center, tol: float, class_tol: float | None = None) -> SignatureReport:
    """Inertia of the reduced Hessian in the reversible case.

    Verifies the mechanism forcing the (l, l) signature: in the basis given
    by the symmetric square root S of (I + (R sigma)^T R sigma)/2, the map
    K = S (R sigma) S^{-1} is orthogonal and anticommutes with the
    transformed Hessian, so its spectrum is symmetric about zero.  The
    report is computed on the transformed Hessian: the counts agree with
    the raw one (the transform is a congruence) and the reported
    eigenvalues pair as +-lambda.  A degenerate Hessian is reported as
    such, never forced to (l, l).
    """
    report = check_reversibility(sigma, R, tol)
    if not report.passed:
        raise ValueError(
            f"scattering matrix is not reversible: residual {report.residual:.3e} exceeds {tol:.3e}"
        )
    S = np.asarray(sigma, dtype=float)
    D = _square(D_center, "D_center")
    H = hessian_from_scattering(S, D)
    A = np.asarray(R, dtype=float) @ S
    M = 0.5 * (np.eye(A.shape[0]) + A.T @ A)
    root = spd_sqrt(M)
    w, V = eigh_jacobi(root)
    root_inv = (V / w) @ V.T
    K = root @ A @ root_inv
    ortho_defect = max_abs(K.T @ K - np.eye(K.shape[0]))
    if ortho_defect > max(tol, 100.0 * report.residual):
        raise ArithmeticError(f"transformed reversal failed orthogonality (defect {ortho_defect:.3e})")
    H_t = root_inv @ H @ root_inv
    anti = max_abs(H_t @ K + K.T @ H_t)
    if anti > max(tol, 100.0 * report.residual) * max(1.0, max_abs(H_t)):
        raise ArithmeticError(f"transformed Hessian failed to anticommute (defect {anti:.3e})")
    return inertia(H_t, class_tol)
