"""Dense symmetric kernel: Cholesky, Schur condensation, generalized eigensolve.

The boundary problems condensed here are at most a few thousand unknowns, so
dense LAPACK-backed methods are sufficient.  Sparse interior solves go
through a deterministic SuperLU factorization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh, solve_triangular
from scipy.sparse.linalg import splu


class NotPositiveDefiniteError(ValueError):
    def __init__(self, pivot):
        self.pivot = pivot
        super().__init__(f"matrix is not positive definite (nonpositive pivot at index {pivot})")


class SingularInteriorError(ValueError):
    pass


@dataclass(frozen=True)
class DenseSymMatrix:
    """Symmetric matrix of order n in packed lower-triangular storage."""

    n: int
    packed: np.ndarray  # length n(n+1)/2, rows of the lower triangle

    def __post_init__(self):
        if self.packed.shape != (self.n * (self.n + 1) // 2,):
            raise ValueError("packed storage has wrong length")
        if not np.all(np.isfinite(self.packed)):
            raise ValueError("matrix entries must be finite")
        self.packed.setflags(write=False)

    @classmethod
    def from_full(cls, a):
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        return cls(n=n, packed=a[np.tril_indices(n)].copy())

    def to_full(self):
        a = np.zeros((self.n, self.n))
        a[np.tril_indices(self.n)] = self.packed
        return a + np.tril(a, -1).T


def cholesky(a: DenseSymMatrix) -> np.ndarray:
    """Lower factor L with L·Lᵀ = A; reports the failing pivot index."""
    full = a.to_full()
    n = a.n
    lower = np.zeros((n, n))
    for j in range(n):
        d = full[j, j] - lower[j, :j] @ lower[j, :j]
        if d <= 0.0:
            raise NotPositiveDefiniteError(j)
        lower[j, j] = np.sqrt(d)
        if j + 1 < n:
            lower[j + 1:, j] = (full[j + 1:, j] - lower[j + 1:, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def schur_condense(k: sp.spmatrix, boundary_dofs, rhs_block=512) -> DenseSymMatrix:
    """Condense a symmetric sparse matrix onto its boundary unknowns.

    Returns S = K_BB − K_BI · K_II⁻¹ · K_IB, symmetrized to packed storage.
    For the Neumann-structure stiffness matrix the result is the discrete
    Dirichlet-to-Neumann operator (positive semidefinite with constant
    kernel).  Interior right-hand sides are solved in fixed-size column
    blocks so the reduction order is deterministic.
    """
    k = k.tocsr()
    boundary_dofs = np.asarray(boundary_dofs, dtype=np.int64)
    n = k.shape[0]
    interior = np.setdiff1d(np.arange(n), boundary_dofs)
    k_bb = k[boundary_dofs][:, boundary_dofs].toarray()
    if interior.size == 0:
        return DenseSymMatrix.from_full(0.5 * (k_bb + k_bb.T))

    k_ii = k[interior][:, interior].tocsc()
    k_ib = k[interior][:, boundary_dofs].toarray()
    try:
        lu = splu(k_ii, permc_spec="COLAMD")
    except RuntimeError as exc:
        raise SingularInteriorError(f"interior block factorization failed: {exc}") from exc
    x = np.empty_like(k_ib)
    for c0 in range(0, k_ib.shape[1], rhs_block):
        x[:, c0:c0 + rhs_block] = lu.solve(k_ib[:, c0:c0 + rhs_block])
    s = k_bb - k[boundary_dofs][:, interior] @ x
    return DenseSymMatrix.from_full(0.5 * (s + s.T))


def sym_generalized_eig(s: DenseSymMatrix, m: DenseSymMatrix, count: int):
    """`count` smallest eigenpairs of S·v = λ·M·v, M symmetric positive definite.

    Reduction via M = L·Lᵀ to a standard symmetric problem; eigenvectors are
    returned M-orthonormal, eigenvalues ascending.
    """
    if s.n != m.n:
        raise ValueError("operand orders differ")
    if count < 1 or count > s.n:
        raise ValueError(f"count must be in [1, {s.n}]")
    lower = cholesky(m)  # raises NotPositiveDefiniteError if M is not SPD
    sl = solve_triangular(lower, s.to_full(), lower=True)
    c = solve_triangular(lower, sl.T, lower=True)
    c = 0.5 * (c + c.T)
    w, y = eigh(c, subset_by_index=[0, count - 1])
    v = solve_triangular(lower.T, y, lower=False)
    return [(float(w[i]), v[:, i].copy()) for i in range(count)]
