"""Parametric boundary curves for annular domains.

Curves are star-shaped polar graphs r(θ) around a center: plain circles and
cosine-perturbed circles r(θ) = a·cos(kθ) + b.  Each curve carries an
orientation flag saying on which side the computational domain lies, which
fixes the sign of the outward normal and of the mean curvature H:
H = +1/R on an outer circle of radius R, H = -1/ε on a concentric inner
circle of radius ε.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

OUTER = "outer"
INNER = "inner"


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class BoundaryCurve:
    """Closed planar curve r(θ) around ``center``, θ ∈ [0, 2π).

    orientation is "outer" (domain inside the curve) or "inner" (domain
    outside the curve, i.e. the curve bounds a hole).
    """

    center: tuple[float, float] = (0.0, 0.0)
    orientation: str = OUTER

    def __post_init__(self):
        if self.orientation not in (OUTER, INNER):
            raise GeometryError(f"orientation must be 'outer' or 'inner', got {self.orientation!r}")

    # polar graph and its θ-derivatives; subclasses override
    def _r(self, theta):
        raise NotImplementedError

    def _dr(self, theta):
        raise NotImplementedError

    def _ddr(self, theta):
        raise NotImplementedError

    def point_at(self, theta):
        """Point on the curve; θ is wrapped mod 2π.  Accepts scalars or arrays."""
        theta = np.mod(theta, TWO_PI)
        r = self._r(theta)
        return np.stack([self.center[0] + r * np.cos(theta),
                         self.center[1] + r * np.sin(theta)], axis=-1)

    def tangent_at(self, theta):
        """Velocity dP/dθ (not normalized)."""
        theta = np.mod(theta, TWO_PI)
        r, dr = self._r(theta), self._dr(theta)
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([dr * c - r * s, dr * s + r * c], axis=-1)

    def outward_normal_at(self, theta):
        """Unit normal pointing out of the annular domain.

        On an outer curve this points away from the enclosed region; on an
        inner curve it points into the hole.
        """
        v = self.tangent_at(theta)
        speed = np.linalg.norm(v, axis=-1, keepdims=True)
        if np.any(speed < 1e-14):
            raise GeometryError("degenerate tangent (zero velocity)")
        # (y', -x')/|v| points away from the center for a CCW polar graph
        n = np.stack([v[..., 1], -v[..., 0]], axis=-1) / speed
        if self.orientation == INNER:
            n = -n
        return n

    def curvature_at(self, theta):
        """Mean curvature H with the signed-distance sign convention.

        Positive on a convex outer boundary, negative on a convex inner
        boundary (H is the Laplacian of the oriented distance function).
        """
        theta = np.mod(theta, TWO_PI)
        r, dr, ddr = self._r(theta), self._dr(theta), self._ddr(theta)
        speed2 = r * r + dr * dr
        if np.any(speed2 < 1e-28):
            raise GeometryError("degenerate tangent (zero velocity)")
        kappa = (r * r + 2.0 * dr * dr - r * ddr) / speed2 ** 1.5
        return kappa if self.orientation == OUTER else -kappa

    def arc_length(self, rtol=1e-12, max_doublings=20):
        """Arc length ∫√(r² + r'²) dθ by panel-doubled Gauss-Legendre."""
        nodes, weights = np.polynomial.legendre.leggauss(16)

        def composite(panels):
            edges = np.linspace(0.0, TWO_PI, panels + 1)
            mid = 0.5 * (edges[:-1] + edges[1:])
            half = 0.5 * (edges[1] - edges[0])
            theta = (mid[:, None] + half * nodes[None, :]).ravel()
            r, dr = self._r(theta), self._dr(theta)
            f = np.sqrt(r * r + dr * dr)
            return half * np.sum(f.reshape(panels, -1) * weights[None, :])

        panels = 4
        prev = composite(panels)
        for _ in range(max_doublings):
            panels *= 2
            cur = composite(panels)
            if abs(cur - prev) <= rtol * abs(cur):
                return cur
            prev = cur
        raise GeometryError("arc_length did not converge")


@dataclass(frozen=True)
class Circle(BoundaryCurve):
    radius: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.radius <= 0:
            raise GeometryError(f"radius must be positive, got {self.radius}")

    def _r(self, theta):
        return np.full_like(np.asarray(theta, dtype=float), self.radius)

    def _dr(self, theta):
        return np.zeros_like(np.asarray(theta, dtype=float))

    _ddr = _dr

    def arc_length(self, rtol=1e-12, max_doublings=20):
        return TWO_PI * self.radius


@dataclass(frozen=True)
class CosinePerturbedCircle(BoundaryCurve):
    """Polar graph r(θ) = a·cos(kθ) + b."""

    a: float = 0.0
    k: int = 1
    b: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.k < 1 or self.k != int(self.k):
            raise GeometryError(f"frequency k must be a positive integer, got {self.k}")
        if self.b - abs(self.a) <= 0:
            raise GeometryError(f"need b - |a| > 0 for a positive-radius graph (a={self.a}, b={self.b})")

    def _r(self, theta):
        return self.a * np.cos(self.k * theta) + self.b

    def _dr(self, theta):
        return -self.a * self.k * np.sin(self.k * theta)

    def _ddr(self, theta):
        return -self.a * self.k * self.k * np.cos(self.k * theta)


def cosine_length_surrogate(a, b, k):
    """Closed form of ∫₀^{2π} (r² + r'²) dθ for r = a·cos(kθ) + b.

    This is the quantity the perimeter-matched amplitude solves against; it
    is *not* the true arc length ∫√(r² + r'²) dθ (the two agree only in the
    circle limit a = 0).  Both are provided so the discrepancy on the
    perturbed domains is measurable.
    """
    return a * a * math.pi + 2.0 * math.pi * b * b + a * a * k * k * math.pi


def amplitude_for_perimeter(k, eps, b):
    """Positive amplitude a with cosine_length_surrogate(a, b, k) = 2πε."""
    disc = 2.0 * (eps - b * b) / (1.0 + k * k)
    if disc < 0:
        raise GeometryError(f"no real amplitude: need eps >= b^2 (eps={eps}, b={b})")
    return math.sqrt(disc)


@dataclass(frozen=True)
class AnnularDomain:
    """Region between an outer and an inner boundary curve."""

    outer: BoundaryCurve
    inner: BoundaryCurve

    def __post_init__(self):
        if self.outer.orientation != OUTER:
            raise GeometryError("outer curve must have 'outer' orientation")
        if self.inner.orientation != INNER:
            raise GeometryError("inner curve must have 'inner' orientation")
        if self.gap() <= 0:
            raise GeometryError("inner curve does not lie strictly inside the outer curve")

    def gap(self, n_samples=720):
        """Minimum radial clearance of inner-curve points to the outer curve."""
        theta = TWO_PI * np.arange(n_samples) / n_samples
        pts = self.inner.point_at(theta)
        rel = pts - np.asarray(self.outer.center)
        rho = np.linalg.norm(rel, axis=-1)
        phi = np.arctan2(rel[:, 1], rel[:, 0])
        return float(np.min(self.outer._r(np.mod(phi, TWO_PI)) - rho))

    def perimeter(self):
        return self.outer.arc_length() + self.inner.arc_length()


@dataclass(frozen=True)
class PerturbationField:
    """Band-limited normal perturbation field V_n(θ) = ω_r + ω_l(θ).

    ω_r is the constant (radial) part; ω_l is a mean-zero finite Fourier
    series stored as cosine/sine coefficient tuples for modes 1..M.  The
    field is measured along the domain's outward normal on the target
    boundary.
    """

    radial: float = 0.0
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()
    target: str = INNER

    def __post_init__(self):
        if self.target not in (INNER, OUTER):
            raise GeometryError(f"target must be 'inner' or 'outer', got {self.target!r}")
        if len(self.cos_coeffs) != len(self.sin_coeffs):
            raise GeometryError("cos_coeffs and sin_coeffs must have equal length")

    @property
    def n_modes(self):
        return len(self.cos_coeffs)

    def oscillatory_at(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for m, (cm, sm) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            out += cm * np.cos(m * theta) + sm * np.sin(m * theta)
        return out

    def __call__(self, theta):
        return self.radial + self.oscillatory_at(theta)


def decompose_field(samples, n_modes, target=INNER):
    """Split uniform-grid samples of V_n into radial and oscillatory parts.

    Requires at least 2·n_modes + 2 samples so modes 1..n_modes are
    alias-free.  The radial part is the sample mean; the oscillatory part is
    the Fourier projection onto modes 1..n_modes.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if n < 2 * n_modes + 2:
        raise GeometryError(f"need at least {2 * n_modes + 2} samples for {n_modes} modes, got {n}")
    spec = np.fft.rfft(samples) / n
    radial = float(spec[0].real)
    cos_c = tuple(2.0 * spec[m].real for m in range(1, n_modes + 1))
    sin_c = tuple(-2.0 * spec[m].imag for m in range(1, n_modes + 1))
    return PerturbationField(radial=radial, cos_coeffs=cos_c, sin_coeffs=sin_c, target=target)


# Plain-text serialization: one record per curve, key=value tokens.

def curve_to_record(curve):
    cx, cy = curve.center
    if isinstance(curve, Circle):
        return f"kind=circle center={cx:.17g},{cy:.17g} radius={curve.radius:.17g} orientation={curve.orientation}"
    if isinstance(curve, CosinePerturbedCircle):
        return (f"kind=cosine center={cx:.17g},{cy:.17g} a={curve.a:.17g} k={curve.k} "
                f"b={curve.b:.17g} orientation={curve.orientation}")
    raise GeometryError(f"cannot serialize {type(curve).__name__}")


def curve_from_record(record):
    fields = {}
    for token in record.split():
        key, _, value = token.partition("=")
        if not _:
            raise GeometryError(f"malformed token {token!r}")
        fields[key] = value
    try:
        kind = fields.pop("kind")
        cx, cy = (float(v) for v in fields.pop("center").split(","))
        orientation = fields.pop("orientation")
        if kind == "circle":
            curve = Circle(center=(cx, cy), orientation=orientation,
                           radius=float(fields.pop("radius")))
        elif kind == "cosine":
            curve = CosinePerturbedCircle(center=(cx, cy), orientation=orientation,
                                          a=float(fields.pop("a")), k=int(fields.pop("k")),
                                          b=float(fields.pop("b")))
        else:
            raise GeometryError(f"unknown curve kind {kind!r}")
    except KeyError as exc:
        raise GeometryError(f"missing field {exc} in curve record") from exc
    if fields:
        raise GeometryError(f"unknown fields in curve record: {sorted(fields)}")
    return curve
