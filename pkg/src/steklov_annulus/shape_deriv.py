"""Shape-derivative matrices for eigenvalue branches and their validation.

For a multiple eigenvalue the branch derivatives under a normal field V_n
are the eigenvalues of a small symmetric matrix built from boundary
integrals of the eigenfunctions.  On the concentric annulus all entries
reduce to exact trigonometric integrals of the band-limited field, so the
matrices here are quadrature-free.  A finite-difference oracle re-solves
the FEM problem on perturbed domains to validate signs and magnitudes.

Orientation convention, fixed against the finite-difference oracle: V_n is
the component of the deformation along the *domain outward* normal, so on
the inner boundary V_n = +k shrinks the hole (dε/dt = −k), and the branch
derivatives are the eigenvalues of M_inner + M_outer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analytic
from .geometry import (INNER, OUTER, TWO_PI, AnnularDomain, BoundaryCurve, Circle,
                       CosinePerturbedCircle, PerturbationField)
from .fem import assemble, solve_domain
from .mesher import build_annular_mesh


class ShapeDerivError(ValueError):
    pass


@dataclass(frozen=True)
class ShapeDerivMatrix:
    entries: np.ndarray  # (m, m) symmetric
    context: str

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def order(self):
        return self.entries.shape[0]

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.entries)

    def trace(self):
        return float(np.trace(self.entries))


@dataclass(frozen=True)
class AnnulusCoeffs:
    """Inner-boundary integrand coefficients for the first eigenvalue pair."""

    c1: float
    c2: float
    c3: float
    lam: float
    eps: float


@dataclass(frozen=True)
class NormalizedDerivResult:
    """Eigenvalues of |∂Ω|·M + K(V)·λ·Id (derivatives of λᵢ·|∂Ω_t|)."""

    derivatives: np.ndarray
    perimeter: float
    perimeter_derivative: float
    lam: float

    def __post_init__(self):
        self.derivatives.setflags(write=False)


def _trig_integrals(field: PerturbationField):
    """Exact ∫V dθ, ∫V cos²θ dθ, ∫V sin²θ dθ, ∫V sinθcosθ dθ."""
    a2 = field.cos_coeffs[1] if field.n_modes >= 2 else 0.0
    b2 = field.sin_coeffs[1] if field.n_modes >= 2 else 0.0
    total = TWO_PI * field.radial
    cos2 = math.pi * field.radial + 0.5 * math.pi * a2
    sin2 = math.pi * field.radial - 0.5 * math.pi * a2
    sincos = 0.5 * math.pi * b2
    return total, cos2, sin2, sincos


def ball_matrix(dim: int, radius: float, beta: float,
                field: PerturbationField) -> ShapeDerivMatrix:
    """Branch-derivative matrix of the first multiple eigenvalue on a ball.

    M_jk = δ_jk/(ω R^{n+1})·(1 + β(n−3)/R)·∫V_n − C(n,R)·∫V_n x_j x_k dσ
    with C(n,R) = (n+1)(1 + β(n−2)/R)/(ω R^{n+3}); only the planar case
    (dim = 2, ω = 2π) is supported, where the integrals are Fourier-exact.
    """
    if dim != 2:
        raise ShapeDerivError(f"only the planar ball is supported, got dimension {dim}")
    omega = TWO_PI
    total, cos2, sin2, sincos = _trig_integrals(field)
    mean_term = (1.0 + beta * (dim - 3) / radius) / (omega * radius ** (dim + 1)) * (radius * total)
    c = (dim + 1) * (1.0 + beta * (dim - 2) / radius) / (omega * radius ** (dim + 3))
    r3 = radius ** 3
    m = np.array([
        [mean_term - c * r3 * cos2, -c * r3 * sincos],
        [-c * r3 * sincos, mean_term - c * r3 * sin2],
    ])
    return ShapeDerivMatrix(entries=m, context=f"Ball(dim={dim}, R={radius}, beta={beta})")


def annulus_coeffs(eps: float) -> AnnulusCoeffs:
    """C-coefficients of the inner-boundary integrand, from the normalized
    harmonic coefficients of the lower first-mode branch (β = 0)."""
    pair = analytic.solve_coeffs(eps, 1, 0.0, "minus")
    lam = pair.lam
    q = pair.a_k * eps + pair.a_mk / eps        # boundary value factor on r = ε
    p = pair.a_k - pair.a_mk / eps ** 2         # radial-derivative factor on r = ε
    c2 = q * q / eps
    c3 = (q * q * lam / eps - p * p) * eps
    return AnnulusCoeffs(c1=c3 - c2, c2=c2, c3=c3, lam=lam, eps=eps)


def _inner_matrix(coeffs: AnnulusCoeffs, field: PerturbationField) -> np.ndarray:
    """Branch-derivative integrand on the inner circle, exactly integrated.

    Entries follow the general multiple-eigenvalue integrand
    V_n(∇_τu_j·∇_τu_k − ∂_nu_j∂_nu_k − λHu_ju_k) specialized to the
    cos/sin eigenfunction pair; the cross coefficient equals C₃ − C₂.
    """
    _, cos2, sin2, sincos = _trig_integrals(field)
    c1, c2, c3 = coeffs.c1, coeffs.c2, coeffs.c3
    return np.array([
        [c2 * sin2 + c3 * cos2, c1 * sincos],
        [c1 * sincos, c3 * sin2 + c2 * cos2],
    ])


def _outer_matrix(eps: float, field: PerturbationField) -> np.ndarray:
    """Branch-derivative integrand on the outer unit circle (β = 0)."""
    pair = analytic.solve_coeffs(eps, 1, 0.0, "minus")
    lam = pair.lam
    q = pair.a_k + pair.a_mk          # boundary value factor on r = 1
    p = pair.a_k - pair.a_mk          # radial-derivative factor on r = 1
    _, cos2, sin2, sincos = _trig_integrals(field)
    # dσ = dθ, H = +1, |∇_τ u|² = (∂_θ u)², ∂_n = +∂_r
    d2 = q * q                        # tangential-gradient coefficient
    d3 = -(p * p) - lam * q * q       # normal-derivative and curvature terms
    return np.array([
        [d2 * sin2 + d3 * cos2, (d3 - d2) * sincos],
        [(d3 - d2) * sincos, d3 * sin2 + d2 * cos2],
    ])


def annulus_matrices(eps: float, field_inner: PerturbationField,
                     field_outer: PerturbationField):
    """Inner- and outer-boundary branch-derivative matrices (M, M̃).

    The branch derivatives of the double first eigenvalue are the
    eigenvalues of M + M̃ (orientation validated by the finite-difference
    oracle).
    """
    if not 0.0 < eps < 1.0:
        raise ShapeDerivError(f"inner radius must lie in (0, 1), got {eps}")
    if field_inner.target != INNER or field_outer.target != OUTER:
        raise ShapeDerivError("field targets must be (inner, outer)")
    coeffs = annulus_coeffs(eps)
    m = ShapeDerivMatrix(entries=_inner_matrix(coeffs, field_inner),
                         context=f"AnnulusInner(eps={eps})")
    mt = ShapeDerivMatrix(entries=_outer_matrix(eps, field_outer),
                          context=f"AnnulusOuter(eps={eps})")
    return m, mt


def split_radial(eps: float, field: PerturbationField):
    """Split the inner-boundary matrix into radial and length-preserving parts.

    M_R comes from the constant part alone and is the scalar matrix
    π(C₂+C₃)·ω_r·Id; M_NR comes from the mean-zero part and is trace-free.
    """
    if field.target != INNER:
        raise ShapeDerivError("split_radial expects an inner-boundary field")
    coeffs = annulus_coeffs(eps)
    radial_only = PerturbationField(radial=field.radial, target=INNER)
    osc_only = PerturbationField(radial=0.0, cos_coeffs=field.cos_coeffs,
                                 sin_coeffs=field.sin_coeffs, target=INNER)
    m_r = ShapeDerivMatrix(entries=_inner_matrix(coeffs, radial_only),
                           context=f"AnnulusInnerRadial(eps={eps})")
    m_nr = ShapeDerivMatrix(entries=_inner_matrix(coeffs, osc_only),
                            context=f"AnnulusInnerOscillatory(eps={eps})")
    return m_r, m_nr


def perimeter_derivative(curve: BoundaryCurve, field: PerturbationField,
                         n_quad: int = 4096) -> float:
    """First-order perimeter variation ∫ H·V_n dσ on one boundary curve.

    For a concentric inner circle of radius ε and V_n = k this gives −2πk
    (the hole of radius ε − tk loses perimeter at rate 2πk).
    """
    theta = TWO_PI * np.arange(n_quad) / n_quad
    h = curve.curvature_at(theta)
    v = field(theta)
    speed = np.linalg.norm(curve.tangent_at(theta), axis=-1)
    return float(np.sum(h * v * speed) * TWO_PI / n_quad)


def normalized_derivative(matrix: ShapeDerivMatrix, perimeter: float,
                          perimeter_deriv: float, lam: float) -> NormalizedDerivResult:
    """Derivatives of the branches of λ·|∂Ω_t|: eig(|∂Ω|·M + K·λ·Id)."""
    shifted = perimeter * matrix.entries + perimeter_deriv * lam * np.eye(matrix.order)
    return NormalizedDerivResult(derivatives=np.linalg.eigvalsh(shifted),
                                 perimeter=perimeter,
                                 perimeter_derivative=perimeter_deriv, lam=lam)


@dataclass(frozen=True)
class BranchDerivatives:
    """Central-difference branch derivatives from the FEM oracle."""

    eigenvalue_derivs: np.ndarray     # ascending
    normalized_derivs: np.ndarray     # d(λᵢ·|∂Ω_t|)/dt, same branch order
    step: float

    def __post_init__(self):
        self.eigenvalue_derivs.setflags(write=False)
        self.normalized_derivs.setflags(write=False)


def _perturbed_inner(curve: Circle, field: PerturbationField, t: float) -> BoundaryCurve:
    """Inner circle moved by t·V_n along the domain outward normal.

    The outward normal on the inner boundary points toward the hole center,
    so the polar graph becomes r(θ) = ε − t·V_n(θ).  Only fields with at
    most one cosine mode map back onto the supported curve kinds.
    """
    radius = curve.radius - t * field.radial
    active = [(m + 1, cm) for m, cm in enumerate(field.cos_coeffs) if cm != 0.0]
    if any(sm != 0.0 for sm in field.sin_coeffs) or len(active) > 1:
        raise ShapeDerivError(
            "finite-difference oracle supports fields with a single cosine mode")
    if not active:
        return Circle(center=curve.center, orientation=INNER, radius=radius)
    mode, amp = active[0]
    return CosinePerturbedCircle(center=curve.center, orientation=INNER,
                                 a=-t * amp, k=mode, b=radius)


def fd_branch_oracle(domain: AnnularDomain, field: PerturbationField, step: float,
                     n_theta: int = 256, n_radial: int = 24,
                     grading: float = 1.0, overlap_tol: float = 0.9) -> BranchDerivatives:
    """Central differences of the two nontrivial eigenvalue branches.

    Solves the FEM problem on domains displaced by ±step along the field,
    matches branches by boundary-trace overlap (sorted order fails when the
    split branches cross t = 0), and differences both λᵢ and λᵢ·|∂Ω_t|.
    """
    if field.target != INNER:
        raise ShapeDerivError("finite-difference oracle supports inner-boundary fields only")
    if not isinstance(domain.inner, Circle):
        raise ShapeDerivError("finite-difference oracle needs a circular inner boundary")

    def solve_at(t):
        inner = _perturbed_inner(domain.inner, field, t)
        moved = AnnularDomain(outer=domain.outer, inner=inner)
        spec = solve_domain(moved, n_theta, n_radial, count=3, grading=grading)
        return spec, moved.perimeter()

    plus, per_plus = solve_at(step)
    minus, per_minus = solve_at(-step)

    # overlap in the boundary L² inner product; meshes share topology
    mesh0 = build_annular_mesh(domain, n_theta, n_radial, grading=grading)
    mass = assemble(mesh0).boundary_mass.to_full()

    vp = plus.boundary_vectors[:, 1:3]
    vm = minus.boundary_vectors[:, 1:3]
    overlap = np.abs(vp.T @ mass @ vm)
    perm = overlap.argmax(axis=1)

    lam_p = plus.eigenvalues[1:3]
    lam_m = minus.eigenvalues[1:3]
    if perm[0] == perm[1] or overlap.max(axis=1).min() < overlap_tol:
        gap_p = abs(lam_p[1] - lam_p[0]) / max(abs(lam_p[0]), 1e-300)
        gap_m = abs(lam_m[1] - lam_m[0]) / max(abs(lam_m[0]), 1e-300)
        if gap_p < 1e-6 and gap_m < 1e-6:
            perm = np.array([0, 1])  # degenerate at both ends: any pairing works
        else:
            raise ShapeDerivError(
                f"branch matching ambiguous (min overlap {overlap.max(axis=1).min():.3f})")

    d_lam = (lam_p - lam_m[perm]) / (2.0 * step)
    d_norm = (lam_p * per_plus - lam_m[perm] * per_minus) / (2.0 * step)
    order = np.argsort(d_lam)
    return BranchDerivatives(eigenvalue_derivs=d_lam[order],
                             normalized_derivs=d_norm[order], step=step)


def consistency_triangle(eps: float, n_theta: int = 256, n_radial: int = 24,
                         step: float = 1e-3) -> dict:
    """Three routes to the radial derivative of λ₁·|∂Ω_t| at a concentric annulus.

    Route 1: central difference of the closed-form curve E (scaled by
    dε/dt = −1 for unit inward radial transport).  Route 2: the matrix
    formula |∂Ω|·M + K·λ·Id on the radial field.  Route 3: the FEM
    finite-difference oracle.  Returns all three plus pairwise relative
    mismatches.
    """
    h = 1e-7
    analytic_route = -(analytic.normalized_first(eps + h)
                       - analytic.normalized_first(eps - h)) / (2.0 * h)

    field = PerturbationField(radial=1.0, target=INNER)
    coeffs = annulus_coeffs(eps)
    m, _ = annulus_matrices(eps, field, PerturbationField(target=OUTER))
    perimeter = TWO_PI * (1.0 + eps)
    k_v = perimeter_derivative(Circle(radius=eps, orientation=INNER), field)
    matrix_route = float(normalized_derivative(m, perimeter, k_v, coeffs.lam)
                         .derivatives[0])

    domain = AnnularDomain(outer=Circle(orientation=OUTER, radius=1.0),
                           inner=Circle(orientation=INNER, radius=eps))
    grading = 1.15 if eps < 0.15 else 1.0
    fd = fd_branch_oracle(domain, field, step, n_theta=n_theta,
                          n_radial=n_radial, grading=grading)
    fd_route = float(np.mean(fd.normalized_derivs))

    scale = max(abs(analytic_route), abs(matrix_route), abs(fd_route), 1e-300)
    return {
        "eps": eps,
        "analytic": analytic_route,
        "matrix": matrix_route,
        "fd": fd_route,
        "rel_analytic_matrix": abs(analytic_route - matrix_route) / scale,
        "rel_analytic_fd": abs(analytic_route - fd_route) / scale,
        "rel_matrix_fd": abs(matrix_route - fd_route) / scale,
    }
