import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hamspca.core import (
    ConvergenceError,
    DataMatrix,
    DegenerateVectorError,
    DimensionError,
    InsufficientSamplesError,
    center,
    covariance,
    power_iteration,
    project_unit_sphere,
)
from oracles import covariance_entrywise, jacobi_eigh, random_psd

finite = st.floats(-1e3, 1e3, allow_nan=False)


class TestDataMatrix:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            DataMatrix([[1.0, np.nan]])

    def test_label_length(self):
        with pytest.raises(DimensionError):
            DataMatrix([[1.0], [2.0]], labels=[0])

    def test_negative_labels(self):
        with pytest.raises(ValueError):
            DataMatrix([[1.0]], labels=[-1])

    def test_immutable(self):
        m = DataMatrix([[1.0, 2.0]])
        with pytest.raises(ValueError):
            m.values[0, 0] = 3.0


class TestCenter:
    def test_means(self):
        train = DataMatrix([[1.0, 3.0], [3.0, 5.0]])
        test = DataMatrix([[2.0, 4.0]])
        tr, te, mean = center(train, test)
        assert np.array_equal(tr.values, [[-1, -1], [1, 1]])
        assert np.array_equal(mean, [2, 4])
        assert np.array_equal(te.values, [[0, 0]])

    def test_idempotent(self):
        X = DataMatrix([[-1.0, 2.0], [1.0, -2.0]])
        tr, _, _ = center(X, X)
        assert np.allclose(tr.values, X.values, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            center(DataMatrix([[1.0, 2.0]]), DataMatrix([[1.0]]))

    @given(arrays(float, (6, 3), elements=finite))
    def test_column_means_vanish(self, X):
        tr, _, _ = center(DataMatrix(X), DataMatrix(X[:1]))
        assert np.all(np.abs(tr.values.mean(axis=0)) <= 1e-10 * max(1.0, np.abs(X).max()))


class TestCovariance:
    def test_two_rows(self):
        assert np.array_equal(covariance(DataMatrix([[1.0, -1.0], [-1.0, 1.0]])), [[2, -2], [-2, 2]])

    def test_zero_rows(self):
        assert np.array_equal(covariance(DataMatrix(np.zeros((3, 2)))), np.zeros((2, 2)))

    def test_matches_entrywise(self):
        X = np.random.default_rng(5).standard_normal((5, 3))
        X -= X.mean(axis=0)
        S = covariance(DataMatrix(X))
        assert np.allclose(S, covariance_entrywise(X.tolist()), atol=1e-12, rtol=0)

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientSamplesError):
            covariance(DataMatrix([[1.0, 2.0]]))

    @given(arrays(float, (7, 4), elements=finite))
    def test_exactly_symmetric_and_psd(self, X):
        X = X - X.mean(axis=0)
        S = covariance(DataMatrix(X))
        assert np.array_equal(S, S.T)
        v = np.random.default_rng(0).standard_normal((4, 20))
        v /= np.linalg.norm(v, axis=0)
        rayleigh = np.einsum("ik,ij,jk->k", v, S, v)
        assert np.all(rayleigh >= -1e-8 * max(np.trace(S), 1e-300))


class TestProjectUnitSphere:
    def test_three_four(self):
        assert np.allclose(project_unit_sphere([3.0, 4.0]), [0.6, 0.8])

    def test_unit_vector_fixed(self):
        v = np.array([0.6, 0.8])
        assert np.allclose(project_unit_sphere(v), v, atol=1e-15)

    def test_zero(self):
        with pytest.raises(DegenerateVectorError):
            project_unit_sphere([0.0, 0.0])

    def test_tiny(self):
        with pytest.raises(DegenerateVectorError):
            project_unit_sphere([1e-310, 0.0])

    @given(arrays(float, 5, elements=st.floats(-1e6, 1e6, allow_nan=False)))
    def test_norm_and_direction(self, x):
        if np.linalg.norm(x) < 1e-100:
            return
        u = project_unit_sphere(x)
        assert abs(np.linalg.norm(u) - 1) <= 1e-12
        assert abs(u @ x / np.linalg.norm(x) - 1) <= 1e-12


class TestPowerIteration:
    def test_diagonal(self):
        v, lam = power_iteration(np.diag([3.0, 1.0]))
        assert np.allclose(v, [1, 0])
        assert lam == pytest.approx(3.0)

    def test_identity_residual(self):
        v, lam = power_iteration(np.eye(2), tol=1e-12)
        assert lam == pytest.approx(1.0)
        assert np.linalg.norm(v - lam * v) <= 1e-12

    def test_matches_jacobi(self):
        rng = np.random.default_rng(11)
        A = rng.standard_normal((8, 8))
        S = A + A.T + 20 * np.diag(np.arange(8))  # positive definite, clear gap
        w, V = jacobi_eigh(S)
        v, lam = power_iteration(S, seed=3)
        assert abs(lam - w[0]) <= 1e-8
        assert abs(v @ V[:, 0]) >= 1 - 1e-8

    def test_sign_convention(self):
        v, _ = power_iteration(np.diag([1.0, 5.0]), seed=1)
        assert v[np.argmax(np.abs(v))] > 0

    def test_deterministic(self):
        S = random_psd(np.random.default_rng(2), 6)
        a = power_iteration(S, seed=9)
        b = power_iteration(S, seed=9)
        assert a[0].tobytes() == b[0].tobytes() and a[1] == b[1]

    def test_zero_matrix(self):
        v, lam = power_iteration(np.zeros((3, 3)))
        assert lam == 0.0 and abs(np.linalg.norm(v) - 1) < 1e-12

    def test_non_convergence(self):
        # rotation-like spectrum: +1 and -1 never separate
        with pytest.raises(ConvergenceError) as info:
            power_iteration(np.diag([1.0, -1.0]), seed=0, max_iter=50)
        assert info.value.residual > 0

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_residual_bound_with_gap(self, seed):
        S = random_psd(np.random.default_rng(seed), 6, gap=0.1)
        v, lam = power_iteration(S, seed=seed, tol=1e-10)
        assert np.linalg.norm(S @ v - lam * v) <= 1e-10 * max(1.0, lam)
