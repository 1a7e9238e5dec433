import numpy as np

from oracles import gauss_solve, jacobi_eigh, knn_exhaustive


def test_jacobi_diagonal():
    w, V = jacobi_eigh(np.diag([1.0, 3.0, 2.0]))
    assert np.allclose(w, [3, 2, 1])
    assert np.allclose(np.abs(V[:, 0]), [0, 1, 0])


def test_jacobi_reconstructs():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((6, 6))
    S = A + A.T
    w, V = jacobi_eigh(S)
    assert np.allclose(V @ np.diag(w) @ V.T, S, atol=1e-12)
    assert np.allclose(V.T @ V, np.eye(6), atol=1e-12)


def test_gauss_solve():
    A = [[2.0, 1.0], [1.0, 3.0]]
    X = gauss_solve(A, [[3.0], [5.0]])
    assert np.allclose(X, [[0.8], [1.4]])


def test_knn_exhaustive_tie_rule():
    assert knn_exhaustive([[0.0], [2.0]], [5, 7], [[1.0]], 1) == [5]
