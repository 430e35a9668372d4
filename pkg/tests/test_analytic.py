import math

import numpy as np
import pytest

from steklov_annulus import analytic
from steklov_annulus.analytic import (EPS2_ACTUAL, EPS2_PRINTED, AnalyticError,
                                      CoeffPair, coeff_system_residual,
                                      critical_poly, find_eps0,
                                      normalized_first, solve_coeffs,
                                      steklov_eig)

TWO_PI = 2.0 * math.pi


class TestSpectrum:
    @pytest.mark.parametrize("eps", [0.05, 0.146721, 0.3, 0.7])
    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_branches_satisfy_coefficient_system(self, eps, n):
        for branch in ("minus", "plus"):
            lam = steklov_eig(eps, n, branch)
            pair = solve_coeffs(eps, n, 0.0, branch)
            assert pair.lam == pytest.approx(lam, rel=1e-10)
            r1, r2 = coeff_system_residual(eps, n, 0.0, lam, pair.a_k, pair.a_mk)
            scale = max(abs(pair.a_k), abs(pair.a_mk)) * (1 + lam)
            assert abs(r1) < 1e-10 * scale
            assert abs(r2) < 1e-10 * scale / eps ** (n + 1)

    def test_minus_below_plus(self):
        assert steklov_eig(0.3, 1, "minus") < steklov_eig(0.3, 1, "plus")

    def test_mode_one_product_of_roots(self):
        # characteristic quadratic has constant term 1/ε: λ₋·λ₊ = 1/ε
        eps = 0.2
        prod = steklov_eig(eps, 1, "minus") * steklov_eig(eps, 1, "plus")
        assert prod == pytest.approx(1.0 / eps, rel=1e-12)

    def test_invalid_arguments(self):
        with pytest.raises(AnalyticError):
            steklov_eig(1.5, 1, "minus")
        with pytest.raises(AnalyticError):
            steklov_eig(0.3, 0, "minus")
        with pytest.raises(AnalyticError):
            steklov_eig(0.3, 1, "down")


class TestCoefficients:
    def test_unit_boundary_norm(self):
        pair = solve_coeffs(0.25, 1, 0.0, "minus")
        assert pair.boundary_norm_sq() == pytest.approx(1.0, rel=1e-12)

    def test_norm_formula_against_quadrature(self):
        pair = CoeffPair(a_k=0.7, a_mk=-0.2, k=2, eps=0.3, beta=0.0, lam=0.0)
        theta = np.linspace(0, TWO_PI, 20001)

        def trace_sq(r):
            g = (0.7 * r ** 2 - 0.2 * r ** -2) * np.cos(2 * theta)
            return np.trapezoid(g * g, theta)

        ref = trace_sq(1.0) + 0.3 * trace_sq(0.3)
        assert pair.boundary_norm_sq() == pytest.approx(ref, rel=1e-6)

    def test_wentzell_beta_shifts_eigenvalue(self):
        lam0 = solve_coeffs(0.3, 1, 0.0, "minus").lam
        lam1 = solve_coeffs(0.3, 1, 0.5, "minus").lam
        assert lam1 > lam0


class TestNormalizedCurve:
    def test_matches_spectrum_times_perimeter(self):
        eps_grid = np.linspace(0.01, 0.99, 1000)
        for eps in eps_grid:
            direct = steklov_eig(eps, 1, "minus") * TWO_PI * (1.0 + eps)
            assert abs(normalized_first(eps) - direct) < 1e-12 * direct

    def test_disk_limit(self):
        # ε → 0: first eigenvalue → 1, perimeter → 2π
        assert normalized_first(1e-9) == pytest.approx(TWO_PI, rel=1e-6)

    def test_crossing_of_disk_value(self):
        """E = 2π exactly at (−3+√17)/4; the nearby closed form (−3+√13)/2
        printed elsewhere does not satisfy the equation."""
        assert normalized_first(EPS2_ACTUAL) == pytest.approx(TWO_PI, abs=1e-10)
        assert abs(normalized_first(EPS2_PRINTED) - TWO_PI) > 1e-2


class TestCriticalPolynomial:
    def test_palindromic_root_pairing(self):
        # coefficients are palindromic, so roots come in reciprocal pairs
        root = find_eps0().root
        assert critical_poly(1.0 / root) == pytest.approx(0.0, abs=1e-6 / root ** 6)

    def test_two_sign_changes_in_unit_interval(self):
        grid = np.linspace(1e-4, 1 - 1e-4, 20000)
        vals = critical_poly(grid)
        changes = np.count_nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
        assert changes == 2

    def test_second_root_is_not_the_maximizer(self):
        grid = np.linspace(0.2, 0.5, 20000)
        vals = critical_poly(grid)
        i = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0][0]
        second = 0.5 * (grid[i] + grid[i + 1])
        assert abs(second - 0.327879) < 1e-3
        assert normalized_first(second) < normalized_first(find_eps0().root)


class TestCriticalRadius:
    def test_reference_value(self):
        assert find_eps0().root == pytest.approx(0.146721, abs=5e-6)

    def test_root_equals_argmax(self):
        cr = find_eps0()
        assert abs(cr.root - cr.argmax) < 1e-6

    def test_stationary_slope(self):
        cr = find_eps0()
        assert abs(cr.slope_at_root) < 1e-5 * normalized_first(cr.root)

    def test_maximum_value(self):
        assert normalized_first(find_eps0().root) == pytest.approx(6.8064, abs=1e-4)
