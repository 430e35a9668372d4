"""Closed-form spectrum of the concentric annulus and the critical radius.

The annulus has outer radius 1 and inner radius ε.  For each angular mode
n ≥ 1 the two Steklov eigenvalue branches are roots of a 2×2 linear system
in the harmonic coefficients (A_n, A_{-n}); the normalized first branch
defines the curve E(ε) = λ₁(ε)·2π(1+ε) whose interior maximum ε₀ is also a
root of a sextic polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import TWO_PI


class AnalyticError(ValueError):
    pass


def _check_eps(eps):
    if not 0.0 < eps < 1.0:
        raise AnalyticError(f"inner radius must lie in (0, 1), got {eps}")


def steklov_eig(eps: float, n: int, branch: str) -> float:
    """Steklov eigenvalue of mode n on the annulus, lower or upper branch.

    λ_n = (n/2)·P ± (n/2)·√(P² − 4/ε) with P = ((1+ε)/ε)·((1+ε^{2n})/(1−ε^{2n})).
    """
    _check_eps(eps)
    if n < 1:
        raise AnalyticError(f"mode must be >= 1, got {n}")
    if branch not in ("minus", "plus"):
        raise AnalyticError(f"branch must be 'minus' or 'plus', got {branch!r}")
    e2n = eps ** (2 * n)
    p = ((1.0 + eps) / eps) * ((1.0 + e2n) / (1.0 - e2n))
    root = math.sqrt(p * p - 4.0 / eps)
    if branch == "plus":
        return 0.5 * n * (p + root)
    # conjugate form of (n/2)(p - root): avoids cancellation when p ≫ 1/ε
    return 2.0 * n / (eps * (p + root))


def coeff_system_residual(eps, k, beta, lam, a_k, a_mk):
    """Residuals of the two linear equations the harmonic coefficients satisfy.

    Row 1 collects the boundary condition on the outer circle, row 2 on the
    inner circle (with its powers of ε exactly as used throughout).
    """
    r1 = a_k * (beta * k * k + k - lam) + a_mk * (beta * k * k - k - lam)
    r2 = (a_k * (beta * k * k * eps ** (k - 2) - k * eps ** (k - 1) - lam * eps ** k)
          + a_mk * (beta * k * k * eps ** (-k - 2) + k * eps ** (-k - 1) - lam * eps ** (-k)))
    return r1, r2


def _char_poly(eps, k, beta):
    """Quadratic aλ² + bλ + c whose roots make the 2×2 system singular."""
    # row entries are linear in λ: entry = p - q·λ
    p11, q11 = beta * k * k + k, 1.0
    p12, q12 = beta * k * k - k, 1.0
    p21, q21 = beta * k * k * eps ** (k - 2) - k * eps ** (k - 1), eps ** k
    p22, q22 = beta * k * k * eps ** (-k - 2) + k * eps ** (-k - 1), eps ** (-k)
    a = q11 * q22 - q12 * q21
    b = -(p11 * q22 + p22 * q11) + (p12 * q21 + p21 * q12)
    c = p11 * p22 - p12 * p21
    return a, b, c


@dataclass(frozen=True)
class CoeffPair:
    """Normalized harmonic coefficients of one eigenfunction branch."""

    a_k: float
    a_mk: float
    k: int
    eps: float
    beta: float
    lam: float

    def boundary_norm_sq(self):
        """∫_{∂Ω} g² dσ for g = (A_k r^k + A_{-k} r^{-k})·cos(kθ)."""
        eps, k = self.eps, self.k
        outer = (self.a_k + self.a_mk) ** 2
        inner = eps * (self.a_k * eps ** k + self.a_mk * eps ** (-k)) ** 2
        return math.pi * (outer + inner)


def solve_coeffs(eps: float, k: int, beta: float, branch: str) -> CoeffPair:
    """Eigenvalue branch and unit-boundary-norm null vector of the 2×2 system."""
    _check_eps(eps)
    a, b, c = _char_poly(eps, k, beta)
    if abs(a) < 1e-300:
        raise AnalyticError("defective coefficient system (degenerate characteristic equation)")
    disc = b * b - 4.0 * a * c
    if disc < 0:
        raise AnalyticError("defective coefficient system (complex eigenvalues)")
    sq = math.sqrt(disc)
    roots = sorted(((-b - sq) / (2 * a), (-b + sq) / (2 * a)))
    lam = roots[0] if branch == "minus" else roots[1]

    # null vector from the better-conditioned row
    m11, m12 = beta * k * k + k - lam, beta * k * k - k - lam
    m21 = beta * k * k * eps ** (k - 2) - k * eps ** (k - 1) - lam * eps ** k
    m22 = beta * k * k * eps ** (-k - 2) + k * eps ** (-k - 1) - lam * eps ** (-k)
    if max(abs(m11), abs(m12)) >= max(abs(m21), abs(m22)):
        a_k, a_mk = -m12, m11
    else:
        a_k, a_mk = -m22, m21
    if a_k == 0.0 and a_mk == 0.0:
        raise AnalyticError("defective coefficient system (zero null vector)")

    pair = CoeffPair(a_k=a_k, a_mk=a_mk, k=k, eps=eps, beta=beta, lam=lam)
    scale = 1.0 / math.sqrt(pair.boundary_norm_sq())
    sign = 1.0 if a_k + a_mk >= 0 else -1.0
    return CoeffPair(a_k=a_k * scale * sign, a_mk=a_mk * scale * sign,
                     k=k, eps=eps, beta=beta, lam=lam)


def normalized_first(eps):
    """E(ε): first nontrivial eigenvalue times the total perimeter 2π(1+ε).

    The square-root term 1 − √(1−s) is evaluated in its conjugate form
    s/(1 + √(1−s)), which is stable across the whole interval (the direct
    form cancels near both ends).
    """
    _check_eps(eps)
    s = 4.0 * eps * ((1.0 - eps) / (1.0 + eps * eps)) ** 2
    term = s / (1.0 + math.sqrt(1.0 - s))
    return (1.0 + eps * eps) / (2.0 * eps * (1.0 - eps)) * term * TWO_PI * (1.0 + eps)


# keep the symbol-style short alias used across the shape-derivative code
E = normalized_first

_CRITICAL_POLY = (1.0, -10.0, 23.0, -12.0, 23.0, -10.0, 1.0)


def critical_poly(eps):
    """Horner evaluation of ε⁶ − 10ε⁵ + 23ε⁴ − 12ε³ + 23ε² − 10ε + 1."""
    acc = 0.0
    for coeff in _CRITICAL_POLY:
        acc = acc * eps + coeff
    return acc


Pi = critical_poly

EPS2_PRINTED = (-3.0 + math.sqrt(13.0)) / 2.0   # where E(ε)=2π is claimed to hold
EPS2_ACTUAL = (-3.0 + math.sqrt(17.0)) / 4.0    # where E(ε)=2π actually holds


def _bisect(f, lo, hi, tol):
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise AnalyticError("bisection bracket does not straddle a sign change")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, lo, hi, tol):
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class CriticalRadius:
    root: float          # first sign-change root of the sextic in (0, 1)
    argmax: float        # golden-section maximizer of E on (0, 1)
    slope_at_root: float  # central-difference dE/dε at the root


def find_eps0() -> CriticalRadius:
    """Locate the critical inner radius ε₀ two independent ways.

    Bisects the sextic at its first sign change in (0, 1) to 1e−12 and
    maximizes E by golden section to 1e−10; raises if the two disagree by
    more than 1e−5.  (The sextic is palindromic and has a second root near
    0.3279 whose reciprocal pairing makes it irrelevant here; the first
    sign change is the critical radius.)
    """
    grid = np.arange(1e-3, 1.0, 1e-3)
    vals = critical_poly(grid)
    sign_change = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    if sign_change.size == 0:
        raise AnalyticError("no sign change of the critical polynomial in (0, 1)")
    i = int(sign_change[0])
    root = _bisect(critical_poly, grid[i], grid[i + 1], 1e-12)
    argmax = _golden_max(normalized_first, 1e-3, 1.0 - 1e-3, 1e-10)
    if abs(root - argmax) > 1e-5:
        raise AnalyticError(
            f"polynomial root {root} and E-argmax {argmax} disagree beyond 1e-5")
    h = 1e-6
    slope = (normalized_first(root + h) - normalized_first(root - h)) / (2.0 * h)
    return CriticalRadius(root=root, argmax=argmax, slope_at_root=slope)


def sample_E(eps_values):
    """(ε, E(ε)) rows for curve export."""
    return [(float(e), normalized_first(float(e))) for e in np.asarray(eps_values, dtype=float)]
