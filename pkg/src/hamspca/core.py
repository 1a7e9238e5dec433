"""Dense numerical primitives shared by the solvers and the pipeline."""

from dataclasses import dataclass
from typing import Optional

import numpy as np


class DimensionError(ValueError):
    pass


class InsufficientSamplesError(ValueError):
    pass


class DegenerateVectorError(ArithmeticError):
    pass


class ConvergenceError(ArithmeticError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class DataMatrix:
    """Row-sample matrix with optional integer labels."""

    values: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise DimensionError(f"expected a non-empty 2-D matrix, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("data contains non-finite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.ndim != 1 or labels.shape[0] != values.shape[0]:
                raise DimensionError(
                    f"{labels.shape[0] if labels.ndim else 0} labels for {values.shape[0]} rows"
                )
            if labels.size and (not np.issubdtype(labels.dtype, np.integer) or labels.min() < 0):
                raise ValueError("labels must be non-negative integers")
            labels = labels.astype(np.int64)
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]


def center(train, test):
    """Subtract the train column means from both sets.

    Returns ``(train_centered, test_centered, mean)``. The test set never
    contributes to the mean.
    """
    if train.d != test.d:
        raise DimensionError(f"train has {train.d} features, test has {test.d}")
    mean = train.values.mean(axis=0)
    return (
        DataMatrix(train.values - mean, train.labels),
        DataMatrix(test.values - mean, test.labels),
        mean,
    )


def covariance(centered):
    """Sample covariance ``X^T X / (n - 1)`` of a centered matrix."""
    X = centered.values if isinstance(centered, DataMatrix) else np.asarray(centered, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise InsufficientSamplesError(f"covariance needs at least 2 samples, got {n}")
    S = X.T @ X / (n - 1)
    # symmetric by construction, not just within rounding
    return np.triu(S) + np.triu(S, 1).T


def project_unit_sphere(x):
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if not norm > 1e-300:
        raise DegenerateVectorError("cannot normalize a zero vector")
    return x / norm


def sign_fix(v):
    """Flip ``v`` so its largest-magnitude entry is positive."""
    return -v if v[np.argmax(np.abs(v))] < 0 else v


def power_iteration(S, seed=0, max_iter=20000, tol=1e-10):
    """Dominant eigenpair of a symmetric matrix.

    Stops once ``||Sv - lam v|| <= tol * max(1, lam)``. The returned vector
    has its largest-magnitude entry positive.
    """
    S = np.asarray(S, dtype=float)
    rng = np.random.default_rng(seed)
    v = project_unit_sphere(rng.standard_normal(S.shape[0]))
    residual = np.inf
    for _ in range(max_iter):
        Sv = S @ v
        lam = float(v @ Sv)
        residual = float(np.linalg.norm(Sv - lam * v))
        if residual <= tol * max(1.0, abs(lam)):
            return sign_fix(v), lam
        norm = np.linalg.norm(Sv)
        if norm == 0.0:
            # v lies in the null space; the residual test above already passed
            return sign_fix(v), 0.0
        v = Sv / norm
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations (residual {residual:.3e})",
        residual,
    )
