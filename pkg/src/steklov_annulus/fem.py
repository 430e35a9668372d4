"""P1 finite elements for the Steklov problem on annular meshes.

The stiffness matrix is assembled from exact element integrals of hat
function gradients; the boundary mass matrix from exact edge integrals
(edge-length/6 times the [[2,1],[1,2]] pattern).  The spectrum comes from
condensing the interior unknowns (discrete Dirichlet-to-Neumann reduction)
and solving the dense generalized problem on the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .geometry import AnnularDomain
from .linalg import DenseSymMatrix, schur_condense, sym_generalized_eig
from .mesher import Mesh, build_annular_mesh


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class AssembledSystem:
    stiffness: sp.csr_matrix
    boundary_mass: DenseSymMatrix       # over boundary dofs, in boundary_dofs order
    boundary_dofs: np.ndarray           # vertex indices, inner loop then outer loop
    mesh: Mesh


@dataclass(frozen=True)
class SteklovSpectrum:
    """Ascending eigenvalues with boundary-trace eigenvectors.

    Eigenvectors are columns of boundary_vectors, in boundary_dofs order and
    normalized to unit discrete boundary L² norm; sign fixed so the trace at
    θ=0 on the outer loop is nonnegative.
    """

    eigenvalues: np.ndarray
    boundary_vectors: np.ndarray
    boundary_dofs: np.ndarray
    mesh: Mesh
    polygonal_perimeter: float

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.boundary_vectors.setflags(write=False)

    def trace_on(self, loop_indices):
        """Eigenvector traces restricted to the given loop's vertex indices."""
        index = {int(d): i for i, d in enumerate(self.boundary_dofs)}
        rows = [index[int(v)] for v in loop_indices]
        return self.boundary_vectors[rows, :]


def element_stiffness(coords):
    """Exact P1 stiffness of a single triangle given its (3, 2) coordinates."""
    x, y = coords[:, 0], coords[:, 1]
    b = np.array([y[1] - y[2], y[2] - y[0], y[0] - y[1]])
    c = np.array([x[2] - x[1], x[0] - x[2], x[1] - x[0]])
    area2 = x @ b
    if area2 <= 0:
        raise AssemblyError("degenerate or inverted triangle")
    return (np.outer(b, b) + np.outer(c, c)) / (2.0 * area2)


def assemble(mesh: Mesh) -> AssembledSystem:
    """Stiffness over all vertices plus boundary mass over boundary dofs."""
    verts, tris = mesh.vertices, mesh.triangles
    p = verts[tris]
    x, y = p[:, :, 0], p[:, :, 1]
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area2 = np.einsum("ti,ti->t", x, b)
    if np.any(area2 <= 0):
        raise AssemblyError("degenerate or inverted triangle in mesh")
    ke = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (2.0 * area2)[:, None, None]
    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    n = len(verts)
    stiffness = sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    stiffness.sum_duplicates()

    boundary_dofs = np.concatenate([mesh.inner_loop, mesh.outer_loop])
    pos = {int(d): i for i, d in enumerate(boundary_dofs)}
    nb = len(boundary_dofs)
    mass = np.zeros((nb, nb))
    for loop in (mesh.inner_loop, mesh.outer_loop):
        pts = verts[loop]
        nxt = np.roll(loop, -1)
        lengths = np.linalg.norm(verts[nxt] - pts, axis=1)
        for v0, v1, ell in zip(loop, nxt, lengths):
            i, j = pos[int(v0)], pos[int(v1)]
            mass[i, i] += ell / 3.0
            mass[j, j] += ell / 3.0
            mass[i, j] += ell / 6.0
            mass[j, i] += ell / 6.0

    return AssembledSystem(stiffness=stiffness,
                           boundary_mass=DenseSymMatrix.from_full(mass),
                           boundary_dofs=boundary_dofs, mesh=mesh)


def solve_spectrum(system: AssembledSystem, count: int) -> SteklovSpectrum:
    """`count` smallest Steklov eigenpairs of the assembled system."""
    if count < 1:
        raise ValueError("count must be >= 1")
    s = schur_condense(system.stiffness, system.boundary_dofs)
    pairs = sym_generalized_eig(s, system.boundary_mass, count)
    eigenvalues = np.array([lam for lam, _ in pairs])
    vectors = np.column_stack([vec for _, vec in pairs])

    # deterministic sign: boundary value at θ=0 on the outer loop >= 0
    outer_start = np.nonzero(system.boundary_dofs == system.mesh.outer_loop[0])[0][0]
    signs = np.where(vectors[outer_start, :] < 0.0, -1.0, 1.0)
    vectors = vectors * signs[None, :]

    mass = system.boundary_mass.to_full()
    perimeter = float(np.sum(mass))
    return SteklovSpectrum(eigenvalues=eigenvalues, boundary_vectors=vectors,
                           boundary_dofs=system.boundary_dofs, mesh=system.mesh,
                           polygonal_perimeter=perimeter)


def solve_domain(domain: AnnularDomain, n_theta: int, n_radial: int,
                 count: int = 3, grading: float = 1.0) -> SteklovSpectrum:
    """Mesh, assemble and solve in one call."""
    mesh = build_annular_mesh(domain, n_theta, n_radial, grading=grading)
    return solve_spectrum(assemble(mesh), count)


def normalized_first(domain: AnnularDomain, n_theta: int, n_radial: int,
                     grading: float = 1.0) -> float:
    """Discrete λ₁ times the exact (non-polygonal) total perimeter."""
    spectrum = solve_domain(domain, n_theta, n_radial, count=2, grading=grading)
    return float(spectrum.eigenvalues[1]) * domain.perimeter()


def convergence_study(domain: AnnularDomain, resolutions, grading: float = 1.0):
    """λ₁ at each (N_θ, N_r) resolution plus a Richardson-extrapolated limit.

    Returns a dict with per-resolution rows (h, λ₁, error vs. the limit) and
    the observed convergence order from the last three values.
    """
    if len(resolutions) < 3:
        raise ValueError("need at least 3 resolutions")
    values = []
    for n_theta, n_radial in resolutions:
        spec = solve_domain(domain, n_theta, n_radial, count=2, grading=grading)
        values.append((2.0 * np.pi / n_theta, float(spec.eigenvalues[1])))

    (h2, l2), (h1, l1), (h0, l0) = values[-3:]
    # Richardson with grid ratio r = h1/h0 assuming e(h) ~ C h^p
    ratio = (l2 - l1) / (l1 - l0) if l1 != l0 else np.inf
    r = h1 / h0
    order = np.log(abs(ratio)) / np.log(r) if np.isfinite(ratio) and ratio > 0 else np.nan
    limit = l0 + (l0 - l1) / (ratio - 1.0) if np.isfinite(ratio) and ratio != 1.0 else l0
    rows = [(h, lam, lam - limit) for h, lam in values]
    return {"rows": rows, "limit": float(limit), "observed_order": float(order)}
