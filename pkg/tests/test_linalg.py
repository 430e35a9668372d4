import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sp

from steklov_annulus.linalg import (DenseSymMatrix, NotPositiveDefiniteError,
                                    SingularInteriorError, cholesky,
                                    schur_condense, sym_generalized_eig)


def random_spd(n, rng, shift=1.0):
    a = rng.standard_normal((n, n))
    return a @ a.T + shift * np.eye(n)


class TestDenseSymMatrix:
    def test_roundtrip(self):
        rng = np.random.default_rng(0)
        a = random_spd(7, rng)
        m = DenseSymMatrix.from_full(a)
        np.testing.assert_allclose(m.to_full(), a, atol=1e-15)

    def test_wrong_packed_length_rejected(self):
        with pytest.raises(ValueError):
            DenseSymMatrix(n=3, packed=np.zeros(5))

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            DenseSymMatrix(n=2, packed=np.array([1.0, np.nan, 1.0]))


class TestCholesky:
    def test_matches_scipy(self):
        rng = np.random.default_rng(1)
        a = random_spd(10, rng)
        lower = cholesky(DenseSymMatrix.from_full(a))
        np.testing.assert_allclose(lower, scipy.linalg.cholesky(a, lower=True),
                                   rtol=1e-10, atol=1e-12)

    def test_reports_failing_pivot(self):
        a = np.diag([1.0, 2.0, -1.0, 3.0])
        with pytest.raises(NotPositiveDefiniteError) as exc:
            cholesky(DenseSymMatrix.from_full(a))
        assert exc.value.pivot == 2


class TestSchurCondense:
    def test_matches_dense_formula(self):
        rng = np.random.default_rng(2)
        n, boundary = 30, np.array([0, 3, 7, 8, 15, 29])
        a = random_spd(n, rng, shift=float(n))
        k = sp.csr_matrix(a)
        s = schur_condense(k, boundary).to_full()
        interior = np.setdiff1d(np.arange(n), boundary)
        ref = (a[np.ix_(boundary, boundary)]
               - a[np.ix_(boundary, interior)]
               @ np.linalg.solve(a[np.ix_(interior, interior)], a[np.ix_(interior, boundary)]))
        np.testing.assert_allclose(s, ref, rtol=1e-10, atol=1e-12)

    def test_empty_interior_returns_block(self):
        rng = np.random.default_rng(3)
        a = random_spd(5, rng)
        s = schur_condense(sp.csr_matrix(a), np.arange(5)).to_full()
        np.testing.assert_allclose(s, a, atol=1e-14)

    def test_block_size_does_not_change_result(self):
        rng = np.random.default_rng(4)
        a = random_spd(40, rng, shift=40.0)
        boundary = np.arange(0, 40, 3)
        s1 = schur_condense(sp.csr_matrix(a), boundary, rhs_block=2).to_full()
        s2 = schur_condense(sp.csr_matrix(a), boundary, rhs_block=512).to_full()
        np.testing.assert_allclose(s1, s2, rtol=1e-12, atol=1e-14)

    def test_singular_interior_reported(self):
        a = np.zeros((3, 3))
        a[0, 0] = 1.0
        with pytest.raises(SingularInteriorError):
            schur_condense(sp.csr_matrix(a), np.array([0]))


class TestGeneralizedEig:
    def test_determinant_scan_oracle(self):
        """Returned eigenvalues are roots of det(S − λM) and vectors are
        M-orthonormal, for a random symmetric pair with SPD M."""
        rng = np.random.default_rng(5)
        s_full = random_spd(6, rng) - 3.0 * np.eye(6)  # indefinite is fine
        m_full = random_spd(6, rng)
        pairs = sym_generalized_eig(DenseSymMatrix.from_full(s_full),
                                    DenseSymMatrix.from_full(m_full), 6)
        lams = np.array([lam for lam, _ in pairs])
        vecs = np.column_stack([v for _, v in pairs])
        # oracle 1: determinant vanishes at each eigenvalue (scaled)
        scale = abs(np.linalg.det(s_full - (lams[0] - 1.0) * m_full))
        for lam in lams:
            assert abs(np.linalg.det(s_full - lam * m_full)) < 1e-8 * scale
        # oracle 2: residual and M-orthonormality
        np.testing.assert_allclose(s_full @ vecs, m_full @ vecs @ np.diag(lams),
                                   atol=1e-9)
        np.testing.assert_allclose(vecs.T @ m_full @ vecs, np.eye(6), atol=1e-10)
        # oracle 3: agrees with LAPACK's generalized driver
        ref = scipy.linalg.eigh(s_full, m_full, eigvals_only=True)
        np.testing.assert_allclose(lams, ref, rtol=1e-10, atol=1e-12)

    def test_subset_is_smallest(self):
        rng = np.random.default_rng(6)
        s_full, m_full = random_spd(8, rng), random_spd(8, rng)
        pairs = sym_generalized_eig(DenseSymMatrix.from_full(s_full),
                                    DenseSymMatrix.from_full(m_full), 3)
        lams = [lam for lam, _ in pairs]
        ref = scipy.linalg.eigh(s_full, m_full, eigvals_only=True)
        np.testing.assert_allclose(lams, ref[:3], rtol=1e-10)
        assert lams == sorted(lams)

    def test_indefinite_mass_rejected(self):
        s = DenseSymMatrix.from_full(np.eye(3))
        m = DenseSymMatrix.from_full(np.diag([1.0, -1.0, 1.0]))
        with pytest.raises(NotPositiveDefiniteError):
            sym_generalized_eig(s, m, 1)

    def test_count_validation(self):
        s = DenseSymMatrix.from_full(np.eye(3))
        with pytest.raises(ValueError):
            sym_generalized_eig(s, s, 4)
