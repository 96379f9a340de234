"""Majorization order, inverse eigenvalue construction, and the bracket
operator generating first-order scattering Hessians.

The bracket sends a symmetric B to B @ J @ D - D @ J @ B over a centre block
D = diag(w_1..w_l, w_1..w_l).  Its kernel consists of the paired diagonals
diag(a_1..a_l, a_1..a_l); its range is the set of symmetric matrices whose
diagonal entries cancel in conjugate pairs.  Together with Mirsky's
diagonal-versus-spectrum criterion this lets us build a symmetric target
with any prescribed indefinite signature and solve for a generator B.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matkit import (
    _require_symmetric,
    eigh_jacobi,
    max_abs,
    standard_symplectic_form,
)

_MAJORIZE_TOL = 1e-10


class MajorizationError(ValueError):
    """Majorization precondition failed; `index` is the offending partial sum (1-based)."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True, eq=False)
class MajorizationWitness:
    """Partial-sum evidence for (or against) a <| b in the majorization order."""

    a_sorted: np.ndarray
    b_sorted: np.ndarray
    partial_sum_gaps: np.ndarray
    total_gap: float
    holds: bool
    tol: float

    def first_failure(self) -> int:
        """1-based index of the first violated partial sum, or len(a) for the total."""
        bad = np.nonzero(self.partial_sum_gaps < -self.tol)[0]
        if bad.size:
            return int(bad[0]) + 1
        return int(self.a_sorted.size)

    def to_json_dict(self) -> dict:
        return {
            "a_sorted": [float(x) for x in self.a_sorted],
            "b_sorted": [float(x) for x in self.b_sorted],
            "partial_sum_gaps": [float(x) for x in self.partial_sum_gaps],
            "total_gap": float(self.total_gap),
            "holds": bool(self.holds),
            "tol": float(self.tol),
        }


def majorizes(a, b, tol: float = _MAJORIZE_TOL) -> MajorizationWitness:
    """Decide a <| b: sorted partial sums of a never exceed those of b, totals equal."""
    av = np.atleast_1d(np.asarray(a, dtype=float))
    bv = np.atleast_1d(np.asarray(b, dtype=float))
    if av.ndim != 1 or bv.ndim != 1 or av.size == 0:
        raise ValueError("majorization needs two nonempty vectors")
    if av.size != bv.size:
        raise ValueError(f"length mismatch: {av.size} vs {bv.size}")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    a_sorted = np.sort(av)[::-1]
    b_sorted = np.sort(bv)[::-1]
    ca, cb = np.cumsum(a_sorted), np.cumsum(b_sorted)
    gaps = cb[:-1] - ca[:-1]
    total = float(cb[-1] - ca[-1])
    holds = bool(np.all(gaps >= -tol)) and abs(total) <= tol
    return MajorizationWitness(
        a_sorted=a_sorted,
        b_sorted=b_sorted,
        partial_sum_gaps=gaps,
        total_gap=total,
        holds=holds,
        tol=float(tol),
    )


def indefinite_spectrum(l: int, m: int) -> np.ndarray:
    """Zero-sum spectrum with m positive and 2l-m negative entries that
    majorizes the balanced diagonal (1,..,1,-1,..,-1).

    The vector is (2l-m, 1, ..., 1) followed by 2l-m copies of
    -(2l-1)/(2l-m); it realises the signature (m, 2l-m) through the Mirsky
    construction.
    """
    l, m = int(l), int(m)
    if l < 1:
        raise ValueError("l must be at least 1")
    if not 1 <= m <= 2 * l - 1:
        raise ValueError(f"m must lie in 1..{2 * l - 1}, got {m}")
    head = [float(2 * l - m)] + [1.0] * (m - 1)
    tail = [-(2.0 * l - 1.0) / (2 * l - m)] * (2 * l - m)
    return np.array(head + tail)


def mirsky_matrix(diag_entries, eigenvalues) -> np.ndarray:
    """Symmetric matrix with prescribed diagonal (in order) and spectrum.

    Requires diag_entries <| eigenvalues.  Starting from the diagonal matrix
    of eigenvalues, plane rotations pin diagonal entries to their targets one
    at a time, smallest target first: each step rotates the plane spanned by
    one unpinned slot at or below the target and one at or above it, which
    leaves the remaining unpinned block diagonal and preserves the spectrum
    exactly.  A final symmetric permutation restores the requested diagonal
    order.
    """
    d = np.atleast_1d(np.asarray(diag_entries, dtype=float))
    lam = np.atleast_1d(np.asarray(eigenvalues, dtype=float))
    witness = majorizes(d, lam, _MAJORIZE_TOL)
    if not witness.holds:
        k = witness.first_failure()
        raise MajorizationError(
            f"diagonal is not majorized by the spectrum: partial sum {k} fails "
            f"(gap {witness.partial_sum_gaps[k - 1] if k <= witness.partial_sum_gaps.size else witness.total_gap:.3e})",
            index=k,
        )
    n = d.size
    order = np.argsort(d, kind="stable")
    targets = d[order]
    A = np.diag(np.sort(lam))
    unpinned = list(range(n))
    pin_slot = np.empty(n, dtype=int)
    scale = max(1.0, max_abs(lam))
    snap = 1e-13 * scale
    for k, t in enumerate(targets):
        vals = np.array([A[s, s] for s in unpinned])
        below = vals <= t + snap
        above = vals >= t - snap
        a_idx = int(np.nonzero(below)[0][np.argmax(vals[below])]) if below.any() else int(np.argmin(np.abs(vals - t)))
        b_idx = int(np.nonzero(above)[0][np.argmin(vals[above])]) if above.any() else int(np.argmin(np.abs(vals - t)))
        a_slot, b_slot = unpinned[a_idx], unpinned[b_idx]
        va, vb = A[a_slot, a_slot], A[b_slot, b_slot]
        if a_slot == b_slot or vb - va <= snap:
            # target coincides with an available slot value, no rotation needed
            chosen = a_slot if abs(va - t) <= abs(vb - t) else b_slot
            pin_slot[k] = chosen
            unpinned.remove(chosen)
            continue
        c = np.sqrt((vb - t) / (vb - va))
        s = np.sqrt((t - va) / (vb - va))
        cp, cq = A[:, a_slot].copy(), A[:, b_slot].copy()
        A[:, a_slot] = c * cp - s * cq
        A[:, b_slot] = s * cp + c * cq
        rp, rq = A[a_slot, :].copy(), A[b_slot, :].copy()
        A[a_slot, :] = c * rp - s * rq
        A[b_slot, :] = s * rp + c * rq
        pin_slot[k] = a_slot
        unpinned.remove(a_slot)
    rank_of = np.empty(n, dtype=int)
    rank_of[order] = np.arange(n)
    placement = pin_slot[rank_of]
    out = A[np.ix_(placement, placement)]
    return 0.5 * (out + out.T)


@dataclass(frozen=True, eq=False)
class CenterBlock:
    """Paired diagonal quadratic form of the linearised centre dynamics.

    omega holds l nonzero frequencies with pairwise distinct squares; the
    block carries D = diag(omega, omega) together with the standard
    symplectic form of matching size.
    """

    omega: np.ndarray
    D: np.ndarray = field(init=False, repr=False)
    J: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.omega, dtype=float))
        if w.ndim != 1 or w.size == 0 or not np.all(np.isfinite(w)):
            raise ValueError("omega must be a nonempty finite vector")
        if np.any(w == 0.0):
            raise ValueError("all centre frequencies must be nonzero")
        sq = w * w
        gap = 1e-12 * max(1.0, float(sq.max()))
        for i in range(w.size):
            for j in range(i + 1, w.size):
                if abs(sq[i] - sq[j]) <= gap:
                    raise ValueError(
                        f"squared frequencies must be pairwise distinct, got "
                        f"omega[{i}]^2 ~ omega[{j}]^2 ~ {sq[i]:.6g}"
                    )
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "D", np.diag(np.concatenate([w, w])))
        object.__setattr__(self, "J", standard_symplectic_form(w.size))

    @property
    def l(self) -> int:
        return self.omega.size

    @property
    def dim(self) -> int:
        return 2 * self.omega.size


def _check_block_input(block: CenterBlock, M, name: str) -> np.ndarray:
    A = _require_symmetric(M, name)
    if A.shape[0] != block.dim:
        raise ValueError(f"{name} has dimension {A.shape[0]}, centre block expects {block.dim}")
    return A


def hessian_bracket(block: CenterBlock, B) -> np.ndarray:
    """B @ J @ D - D @ J @ B for symmetric B: the first-order Hessian of the
    splitting function under a perturbation generated by B.

    The result is symmetric and traceless for every symmetric B.
    """
    Bs = _check_block_input(block, B, "bracket argument")
    X = Bs @ (block.J @ block.D)
    return X + X.T


def hessian_bracket_adjoint(block: CenterBlock, M) -> np.ndarray:
    """Adjoint of the bracket with respect to the trace inner product:
    J @ D @ M - M @ D @ J."""
    Ms = _check_block_input(block, M, "adjoint argument")
    Y = (block.J @ block.D) @ Ms
    return Y + Y.T


def bracket_kernel_basis(block: CenterBlock) -> list[np.ndarray]:
    """The l paired-diagonal indicator matrices diag(e_k, e_k) annihilated by
    the adjoint bracket."""
    l = block.l
    basis = []
    for k in range(l):
        e = np.zeros(2 * l)
        e[k] = 1.0
        e[l + k] = 1.0
        basis.append(np.diag(e))
    return basis


def in_bracket_range(block: CenterBlock, M, tol: float = 1e-8) -> bool:
    """True iff the diagonal of M cancels in conjugate pairs: M_ii + M_{l+i,l+i} = 0."""
    Ms = _check_block_input(block, M, "range candidate")
    dvec = np.diag(Ms)
    l = block.l
    return bool(np.all(np.abs(dvec[:l] + dvec[l:]) <= tol))


def _sym_index_pairs(d: int) -> list[tuple[int, int]]:
    # fixed ordering: row-major upper triangle, diagonal entries included in place
    return [(i, j) for i in range(d) for j in range(i, d)]


def sym_coords(M) -> np.ndarray:
    """Coordinates of a symmetric matrix in the orthonormal basis
    {E_ii} u {(E_ij + E_ji)/sqrt(2)}, row-major upper-triangle order."""
    A = _require_symmetric(M, "symmetric matrix")
    d = A.shape[0]
    root2 = np.sqrt(2.0)
    return np.array([A[i, j] if i == j else root2 * A[i, j] for i, j in _sym_index_pairs(d)])


def sym_from_coords(v, d: int) -> np.ndarray:
    """Inverse of sym_coords for dimension d."""
    vec = np.asarray(v, dtype=float)
    pairs = _sym_index_pairs(d)
    if vec.shape != (len(pairs),):
        raise ValueError(f"expected {len(pairs)} coordinates for dimension {d}, got {vec.shape}")
    A = np.zeros((d, d))
    inv_root2 = 1.0 / np.sqrt(2.0)
    for k, (i, j) in enumerate(pairs):
        if i == j:
            A[i, i] = vec[k]
        else:
            A[i, j] = A[j, i] = vec[k] * inv_root2
    return A


def bracket_matrix(block: CenterBlock) -> np.ndarray:
    """Matricization of the bracket on the space of symmetric matrices."""
    d = block.dim
    pairs = _sym_index_pairs(d)
    N = len(pairs)
    X = np.empty((N, N))
    for k in range(N):
        e = np.zeros(N)
        e[k] = 1.0
        X[:, k] = sym_coords(hessian_bracket(block, sym_from_coords(e, d)))
    return X


def bracket_adjoint_matrix(block: CenterBlock) -> np.ndarray:
    """Matricization of the adjoint bracket; equals bracket_matrix(block).T."""
    d = block.dim
    pairs = _sym_index_pairs(d)
    N = len(pairs)
    X = np.empty((N, N))
    for k in range(N):
        e = np.zeros(N)
        e[k] = 1.0
        X[:, k] = sym_coords(hessian_bracket_adjoint(block, sym_from_coords(e, d)))
    return X


def bracket_adjoint_nullity(block: CenterBlock, rel_tol: float = 1e-8) -> int:
    """Dimension of the numerical nullspace of the matricized adjoint bracket."""
    X = bracket_adjoint_matrix(block)
    w, _ = eigh_jacobi(X.T @ X)
    sv = np.sqrt(np.clip(w, 0.0, None))
    top = sv[0] if sv.size else 0.0
    if top == 0.0:
        return int(sv.size)
    return int(np.sum(sv <= rel_tol * top))


def solve_bracket(block: CenterBlock, G) -> np.ndarray:
    """Minimum-norm symmetric B with bracket(B) = G.

    G must be symmetric and lie in the bracket range (conjugate diagonal
    pairs cancelling).  The l-dimensional kernel makes the preimage
    non-unique; least squares returns the representative orthogonal to it.
    """
    Gs = _check_block_input(block, G, "bracket target")
    tol = 1e-8 * max(1.0, max_abs(Gs))
    if not in_bracket_range(block, Gs, tol):
        raise ValueError(
            "target is outside the bracket range: diagonal entries do not cancel in conjugate pairs"
        )
    X = bracket_matrix(block)
    g = sym_coords(Gs)
    sol, *_ = np.linalg.lstsq(X, g, rcond=None)
    B = sym_from_coords(sol, block.dim)
    residual = max_abs(hessian_bracket(block, B) - Gs)
    if residual > 1e-8 * max(1.0, max_abs(Gs)):
        raise ArithmeticError(f"bracket solve left residual {residual:.3e}")
    return B
