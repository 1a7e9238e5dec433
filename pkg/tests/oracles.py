"""Slow, independent reference implementations used only by the tests."""

import math
from collections import Counter

import numpy as np


def jacobi_eigh(S, tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns eigenvalues in descending order and the matching eigenvectors as
    columns.
    """
    A = np.array(S, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(np.abs(A).max(), 1e-300)
    for _ in range(max_sweeps):
        off = math.sqrt(sum(A[i, j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if A[p, q] == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                V = V @ J
    else:
        raise RuntimeError("Jacobi sweeps did not converge")
    w = np.diag(A).copy()
    order = np.argsort(-w)
    return w[order], V[:, order]


def covariance_entrywise(X):
    n, d = len(X), len(X[0])
    return [
        [sum(X[k][i] * X[k][j] for k in range(n)) / (n - 1) for j in range(d)] for i in range(d)
    ]


def transform_entrywise(X, mean, W):
    n, d, k = len(X), len(mean), len(W[0])
    return [[sum((X[i][j] - mean[j]) * W[j][c] for j in range(d)) for c in range(k)] for i in range(n)]


def knn_exhaustive(train, labels, queries, k):
    """Sort every (distance, index) pair and vote among the first k."""
    out = []
    for q in queries:
        ranked = sorted(
            (math.sqrt(sum((a - b) ** 2 for a, b in zip(row, q))), i) for i, row in enumerate(train)
        )[:k]
        votes = [labels[i] for _, i in ranked]
        counts = Counter(votes)
        top = max(counts.values())
        out.append(next(v for v in votes if counts[v] == top))
    return out


def gauss_solve(A, B):
    """Gaussian elimination with partial pivoting on plain Python lists."""
    n = len(A)
    M = [list(map(float, A[i])) + list(map(float, B[i])) for i in range(n)]
    m = len(B[0])
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(M[r][col]))
        M[col], M[piv] = M[piv], M[col]
        for r in range(col + 1, n):
            f = M[r][col] / M[col][col]
            if f:
                for c in range(col, n + m):
                    M[r][c] -= f * M[col][c]
    X = [[0.0] * m for _ in range(n)]
    for r in range(n - 1, -1, -1):
        for c in range(m):
            acc = M[r][n + c] - sum(M[r][j] * X[j][c] for j in range(r + 1, n))
            X[r][c] = acc / M[r][r]
    return X


def random_psd(rng, d, gap=None):
    """Random PSD matrix; with ``gap``, resample until lam1 - lam2 >= gap * lam1."""
    while True:
        A = rng.standard_normal((d, d))
        S = A @ A.T / d
        if gap is None:
            return S
        w = np.linalg.eigvalsh(S)
        if w[-1] - w[-2] >= gap * w[-1]:
            return S
