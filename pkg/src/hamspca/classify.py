"""Brute-force k-NN, one-vs-all kernel ridge regression and the accuracy score."""

from dataclasses import dataclass

import numpy as np

from .core import DimensionError


def _as_features(features):
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = features[:, None]
    return features


@dataclass(frozen=True)
class KnnModel:
    features: np.ndarray
    labels: np.ndarray
    k_neighbors: int = 1


def knn_fit(features, labels, k_neighbors=1):
    features = _as_features(features)
    labels = np.asarray(labels)
    if labels.shape != (features.shape[0],):
        raise DimensionError(f"{labels.shape[0]} labels for {features.shape[0]} samples")
    if not 1 <= k_neighbors <= features.shape[0]:
        raise ValueError(f"k_neighbors must lie in [1, {features.shape[0]}], got {k_neighbors}")
    return KnnModel(features, labels, int(k_neighbors))


def knn_predict(model, queries):
    """Majority vote over the ``k`` nearest training points.

    Distance ties go to the lower training index; vote ties go to whichever
    tied class owns the nearest of the selected neighbours.
    """
    queries = _as_features(queries)
    if queries.shape[1] != model.features.shape[1]:
        raise DimensionError(
            f"queries have {queries.shape[1]} features, model has {model.features.shape[1]}"
        )
    out = np.empty(queries.shape[0], dtype=model.labels.dtype)
    for i, q in enumerate(queries):
        diff = model.features - q
        dist = np.einsum("ij,ij->i", diff, diff)
        nearest = np.argsort(dist, kind="stable")[: model.k_neighbors]
        votes = model.labels[nearest]
        classes, counts = np.unique(votes, return_counts=True)
        tied = classes[counts == counts.max()]
        # votes is ordered nearest-first, so the first tied label wins
        out[i] = votes[np.isin(votes, tied)][0]
    return out


@dataclass(frozen=True)
class KrrModel:
    train_features: np.ndarray
    dual_weights: np.ndarray  # n x C
    classes: np.ndarray
    kernel: str = "rbf"
    bandwidth: float = 1.0
    ridge: float = 1e-3


def median_bandwidth(features):
    """Median pairwise Euclidean distance; 1.0 if every point coincides."""
    features = _as_features(features)
    diff = features[:, None, :] - features[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    upper = dist[np.triu_indices(features.shape[0], 1)]
    med = float(np.median(upper)) if upper.size else 0.0
    return med if med > 0 else 1.0


def kernel_matrix(A, B, kernel="rbf", bandwidth=1.0):
    A = _as_features(A)
    B = _as_features(B)
    if kernel == "linear":
        return A @ B.T
    if kernel == "rbf":
        diff = A[:, None, :] - B[None, :, :]
        sq = np.einsum("ijk,ijk->ij", diff, diff)
        return np.exp(-sq / (2.0 * bandwidth**2))
    raise ValueError(f"unknown kernel {kernel!r}")


def krr_fit(features, labels, kernel="rbf", bandwidth=None, ridge=1e-3):
    """Solve ``(K + ridge I) W = Y`` against one-hot targets."""
    features = _as_features(features)
    labels = np.asarray(labels)
    n = features.shape[0]
    if n < 1 or labels.shape != (n,):
        raise DimensionError(f"{labels.shape} labels for {n} samples")
    if not ridge > 0:
        raise ValueError(f"ridge must be > 0, got {ridge}")
    if kernel == "rbf":
        bandwidth = median_bandwidth(features) if bandwidth is None else float(bandwidth)
        if not bandwidth > 0:
            raise ValueError(f"bandwidth must be > 0, got {bandwidth}")
    classes, index = np.unique(labels, return_inverse=True)
    Y = np.zeros((n, classes.size))
    Y[np.arange(n), index] = 1.0

    A = kernel_matrix(features, features, kernel, bandwidth) + ridge * np.eye(n)
    W = np.linalg.solve(A, Y)
    residual = np.abs(A @ W - Y).max()
    if residual > 1e-8:
        # one round of iterative refinement before giving up
        W = W + np.linalg.solve(A, Y - A @ W)
        residual = np.abs(A @ W - Y).max()
    if not residual <= 1e-8:
        raise np.linalg.LinAlgError(f"kernel system solved with residual {residual:.3e}")
    return KrrModel(features, W, classes, kernel, bandwidth if kernel == "rbf" else None, ridge)


def krr_scores(model, queries):
    queries = _as_features(queries)
    if queries.shape[1] != model.train_features.shape[1]:
        raise DimensionError(
            f"queries have {queries.shape[1]} features, model has {model.train_features.shape[1]}"
        )
    return kernel_matrix(queries, model.train_features, model.kernel, model.bandwidth) @ model.dual_weights


def krr_predict(model, queries):
    # np.argmax returns the first maximum, i.e. the lower class index on ties
    return model.classes[np.argmax(krr_scores(model, queries), axis=1)]


def accuracy(predicted, actual):
    """Fraction of positions where the prediction matches."""
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.ndim != 1 or predicted.shape != actual.shape:
        raise DimensionError(f"shapes {predicted.shape} and {actual.shape} differ")
    if predicted.size == 0:
        raise ValueError("accuracy of an empty prediction")
    return float(np.count_nonzero(predicted == actual)) / predicted.size
