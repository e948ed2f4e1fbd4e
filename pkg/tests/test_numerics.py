import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secrecy_pa.exceptions import DegenerateChannelError, NotPSDError, PreconditionError
from secrecy_pa.numerics import (
    hermitian_eig,
    inv_sqrt_psd,
    null_space_projector,
    sample_complex_gaussian,
)

from conftest import random_hermitian


class TestHermitianEig:
    def test_identity(self):
        U, lam = hermitian_eig(np.eye(2))
        np.testing.assert_allclose(lam, [1.0, 1.0])
        np.testing.assert_allclose(np.abs(U), np.eye(2), atol=1e-12)

    def test_diagonal(self):
        _, lam = hermitian_eig(np.diag([4.0, 1.0]))
        np.testing.assert_allclose(lam, [1.0, 4.0])

    def test_random_reconstruction(self, rng):
        A = random_hermitian(rng, 4)
        U, lam = hermitian_eig(A)
        rebuilt = U @ np.diag(lam) @ U.conj().T
        assert np.linalg.norm(A - rebuilt) <= 1e-10 * np.linalg.norm(A)
        np.testing.assert_allclose(U.conj().T @ U, np.eye(4), atol=1e-10)
        assert np.all(np.diff(lam) >= 0)

    def test_rejects_non_square(self):
        with pytest.raises(PreconditionError):
            hermitian_eig(np.ones((2, 3)))

    def test_rejects_non_hermitian(self):
        with pytest.raises(PreconditionError):
            hermitian_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestInvSqrtPsd:
    def test_identity(self):
        np.testing.assert_allclose(inv_sqrt_psd(np.eye(3)), np.eye(3), atol=1e-14)

    def test_diagonal(self):
        np.testing.assert_allclose(inv_sqrt_psd(np.diag([4.0, 9.0])), np.diag([0.5, 1 / 3]), atol=1e-14)

    @pytest.mark.parametrize("beta", [0.0, 0.3, 0.8, 1.0])
    def test_whitening_covariance(self, rng, beta):
        G = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
        C = G @ G.conj().T
        W = (1 - beta) * 4.0 * C + 0.4 * np.eye(2)
        B = inv_sqrt_psd(W)
        np.testing.assert_allclose(B @ W @ B, np.eye(2), atol=1e-8)
        np.testing.assert_allclose(B, B.conj().T, atol=1e-10)

    def test_not_psd(self):
        with pytest.raises(NotPSDError):
            inv_sqrt_psd(np.diag([1.0, -0.5]))

    def test_floor_applied(self):
        B = inv_sqrt_psd(np.diag([1.0, 0.0]), eps=1e-4)
        np.testing.assert_allclose(np.diag(B).real, [1.0, 100.0])


class TestNullSpaceProjector:
    def test_axis_aligned(self):
        np.testing.assert_allclose(null_space_projector(np.array([[1.0, 0.0]])), np.diag([0.0, 1.0]), atol=1e-15)

    def test_projector_identities(self, rng):
        H = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
        P = null_space_projector(H)
        assert np.linalg.norm(H @ P) <= 1e-9 * np.linalg.norm(H)
        np.testing.assert_allclose(P @ P, P, atol=1e-10)
        assert abs(np.trace(P) - 2) <= 1e-8

    def test_square_has_no_null_space(self, rng):
        with pytest.raises(DegenerateChannelError):
            null_space_projector(rng.standard_normal((3, 3)))

    def test_rank_deficient(self):
        H = np.array([[1.0, 1.0, 0.0, 0.0], [2.0, 2.0, 0.0, 0.0]])
        with pytest.raises(DegenerateChannelError):
            null_space_projector(H)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_trace_is_nullity(self, rows, seed):
        rng = np.random.default_rng(seed)
        cols = rows + 1 + seed % 3
        H = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
        P = null_space_projector(H)
        assert abs(np.trace(P).real - (cols - rows)) <= 1e-8
        np.testing.assert_allclose(P, P.conj().T, atol=1e-12)


class TestComplexGaussian:
    def test_zero_variance(self, rng):
        np.testing.assert_array_equal(sample_complex_gaussian(rng, 4, 0.0), np.zeros(4))

    def test_moments(self):
        rng = np.random.default_rng(7)
        x = np.stack([sample_complex_gaussian(rng, 4, 1.0) for _ in range(100_000)])
        assert np.all(np.abs(x.mean(axis=0)) <= 0.02)
        var = np.mean(np.abs(x) ** 2, axis=0)
        np.testing.assert_allclose(var, 1.0, atol=0.03)
        # circular symmetry: real and imaginary halves share the power
        np.testing.assert_allclose(np.var(x.real, axis=0), 0.5, atol=0.02)

    def test_deterministic(self):
        a = sample_complex_gaussian(np.random.default_rng(3), 5)
        b = sample_complex_gaussian(np.random.default_rng(3), 5)
        np.testing.assert_array_equal(a, b)

    def test_negative_variance(self, rng):
        with pytest.raises(PreconditionError):
            sample_complex_gaussian(rng, 2, -1.0)
