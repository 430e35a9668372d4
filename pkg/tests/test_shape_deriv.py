import math

import numpy as np
import pytest

from steklov_annulus import analytic
from steklov_annulus.geometry import (INNER, OUTER, AnnularDomain, Circle,
                                      PerturbationField)
from steklov_annulus.shape_deriv import (ShapeDerivError, _trig_integrals,
                                         annulus_coeffs, annulus_matrices,
                                         ball_matrix, fd_branch_oracle,
                                         normalized_derivative,
                                         perimeter_derivative, split_radial)

TWO_PI = 2.0 * math.pi


def concentric(eps):
    return AnnularDomain(outer=Circle(radius=1.0, orientation=OUTER),
                         inner=Circle(radius=eps, orientation=INNER))


class TestTrigIntegrals:
    def test_against_quadrature(self):
        field = PerturbationField(radial=0.4, cos_coeffs=(0.2, -0.7, 0.1),
                                  sin_coeffs=(0.5, 0.3, -0.2), target=INNER)
        theta = np.linspace(0, TWO_PI, 200001)
        v = field(theta)
        total, cos2, sin2, sincos = _trig_integrals(field)
        assert total == pytest.approx(np.trapezoid(v, theta), abs=1e-8)
        assert cos2 == pytest.approx(np.trapezoid(v * np.cos(theta) ** 2, theta), abs=1e-8)
        assert sin2 == pytest.approx(np.trapezoid(v * np.sin(theta) ** 2, theta), abs=1e-8)
        assert sincos == pytest.approx(
            np.trapezoid(v * np.sin(theta) * np.cos(theta), theta), abs=1e-8)


class TestBallMatrix:
    def test_zero_trace_for_length_preserving_fields(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            c = rng.standard_normal(4)
            s = rng.standard_normal(4)
            field = PerturbationField(radial=0.0, cos_coeffs=tuple(c),
                                      sin_coeffs=tuple(s), target=OUTER)
            m = ball_matrix(2, 1.0, 0.0, field)
            assert abs(m.trace()) < 1e-12

    def test_vanishes_without_degree_two_harmonics(self):
        field = PerturbationField(radial=0.0, cos_coeffs=(0.3, 0.0, -0.2),
                                  sin_coeffs=(0.1, 0.0, 0.4), target=OUTER)
        m = ball_matrix(2, 1.0, 0.5, field)
        np.testing.assert_allclose(m.entries, 0.0, atol=1e-14)

    def test_degree_two_harmonics_split_branches(self):
        field = PerturbationField(radial=0.0, cos_coeffs=(0.0, 0.3),
                                  sin_coeffs=(0.0, 0.0), target=OUTER)
        eig = ball_matrix(2, 1.0, 0.0, field).eigenvalues()
        assert eig[0] == pytest.approx(-eig[1], abs=1e-14)
        assert eig[1] > 0

    def test_radius_scaling(self):
        field = PerturbationField(radial=0.0, cos_coeffs=(0.0, 1.0),
                                  sin_coeffs=(0.0, 0.0), target=OUTER)
        e1 = ball_matrix(2, 1.0, 0.0, field).eigenvalues()
        e2 = ball_matrix(2, 2.0, 0.0, field).eigenvalues()
        np.testing.assert_allclose(e2, e1 / 4.0, rtol=1e-12)

    def test_only_planar_supported(self):
        with pytest.raises(ShapeDerivError):
            ball_matrix(3, 1.0, 0.0, PerturbationField(target=OUTER))


class TestAnnulusCoefficients:
    @pytest.mark.parametrize("eps", np.linspace(0.05, 0.9, 18))
    def test_c1_identity(self, eps):
        coeffs = annulus_coeffs(float(eps))
        assert abs(coeffs.c1 - (coeffs.c3 - coeffs.c2)) < 1e-12 * max(
            abs(coeffs.c2), abs(coeffs.c3), 1.0)

    def test_radial_matrix_recovers_curve_slope(self):
        """π(C₂+C₃) equals −dλ₁/dε: unit inward motion of the hole (V_n=1
        shrinks it) changes the eigenvalue at that rate."""
        eps, h = 0.3, 1e-6
        coeffs = annulus_coeffs(eps)
        dlam = (analytic.steklov_eig(eps + h, 1, "minus")
                - analytic.steklov_eig(eps - h, 1, "minus")) / (2 * h)
        assert math.pi * (coeffs.c2 + coeffs.c3) == pytest.approx(-dlam, rel=1e-5)


class TestMatrices:
    def test_radial_inner_matrix_is_scalar(self):
        field = PerturbationField(radial=1.0, target=INNER)
        m, _ = annulus_matrices(0.3, field, PerturbationField(target=OUTER))
        assert m.entries[0, 1] == pytest.approx(0.0, abs=1e-15)
        assert m.entries[0, 0] == pytest.approx(m.entries[1, 1], rel=1e-13)

    def test_split_radial_trace_free_oscillatory_part(self):
        field = PerturbationField(radial=0.7, cos_coeffs=(0.1, 0.4),
                                  sin_coeffs=(0.2, -0.3), target=INNER)
        m_r, m_nr = split_radial(0.25, field)
        assert abs(m_nr.trace()) < 1e-12
        total, _ = split_radial(0.25, field)
        m, _ = annulus_matrices(0.25, field, PerturbationField(target=OUTER))
        np.testing.assert_allclose(m_r.entries + m_nr.entries, m.entries,
                                   rtol=1e-12, atol=1e-14)

    def test_field_target_validation(self):
        with pytest.raises(ShapeDerivError):
            annulus_matrices(0.3, PerturbationField(target=OUTER),
                             PerturbationField(target=OUTER))


class TestPerimeterDerivative:
    def test_inner_circle_radial(self):
        k = perimeter_derivative(Circle(radius=0.3, orientation=INNER),
                                 PerturbationField(radial=1.0, target=INNER))
        assert k == pytest.approx(-TWO_PI, rel=1e-12)

    def test_outer_circle_radial(self):
        k = perimeter_derivative(Circle(radius=2.0, orientation=OUTER),
                                 PerturbationField(radial=1.0, target=OUTER))
        assert k == pytest.approx(TWO_PI, rel=1e-12)

    def test_mean_zero_field_preserves_length_of_circle(self):
        field = PerturbationField(radial=0.0, cos_coeffs=(0.5, 0.2),
                                  sin_coeffs=(0.1, 0.3), target=INNER)
        k = perimeter_derivative(Circle(radius=0.3, orientation=INNER), field)
        assert abs(k) < 1e-12


class TestFiniteDifferenceOracle:
    def test_radial_matches_matrix_route(self):
        eps = 0.3
        field = PerturbationField(radial=1.0, target=INNER)
        fd = fd_branch_oracle(concentric(eps), field, 1e-3,
                              n_theta=192, n_radial=20)
        m, _ = annulus_matrices(eps, field, PerturbationField(target=OUTER))
        expected = m.eigenvalues()
        np.testing.assert_allclose(fd.eigenvalue_derivs, expected, rtol=5e-3)

    def test_cos2_field_splits_branches(self):
        eps = 0.3
        field = PerturbationField(radial=0.0, cos_coeffs=(0.0, 1.0),
                                  sin_coeffs=(0.0, 0.0), target=INNER)
        fd = fd_branch_oracle(concentric(eps), field, 1e-3,
                              n_theta=192, n_radial=20)
        m, _ = annulus_matrices(eps, field, PerturbationField(target=OUTER))
        expected = m.eigenvalues()
        assert expected[0] < 0 < expected[1]
        np.testing.assert_allclose(fd.eigenvalue_derivs, expected, rtol=2e-2)

    def test_normalized_derivatives_match_shifted_matrix(self):
        eps = 0.3
        field = PerturbationField(radial=1.0, target=INNER)
        fd = fd_branch_oracle(concentric(eps), field, 1e-3,
                              n_theta=192, n_radial=20)
        coeffs = annulus_coeffs(eps)
        m, _ = annulus_matrices(eps, field, PerturbationField(target=OUTER))
        k_v = perimeter_derivative(Circle(radius=eps, orientation=INNER), field)
        res = normalized_derivative(m, TWO_PI * (1 + eps), k_v, coeffs.lam)
        np.testing.assert_allclose(fd.normalized_derivs, res.derivatives, rtol=5e-3)

    def test_rejects_unsupported_fields(self):
        with pytest.raises(ShapeDerivError):
            fd_branch_oracle(concentric(0.3),
                             PerturbationField(radial=1.0, target=OUTER), 1e-3)
        with pytest.raises(ShapeDerivError):
            fd_branch_oracle(concentric(0.3),
                             PerturbationField(radial=0.0, cos_coeffs=(0.0,),
                                               sin_coeffs=(0.5,), target=INNER), 1e-3)


class TestStationarity:
    def test_normalized_derivative_vanishes_at_critical_radius(self):
        eps0 = analytic.find_eps0().root
        field = PerturbationField(radial=1.0, target=INNER)
        coeffs = annulus_coeffs(eps0)
        m, _ = annulus_matrices(eps0, field, PerturbationField(target=OUTER))
        k_v = perimeter_derivative(Circle(radius=eps0, orientation=INNER), field)
        res = normalized_derivative(m, TWO_PI * (1 + eps0), k_v, coeffs.lam)
        np.testing.assert_allclose(res.derivatives, 0.0, atol=1e-8)
