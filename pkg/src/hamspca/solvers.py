"""Single-component extractors and the deflation driver.

Three ways to get a component out of a covariance matrix ``S``:

* ``solve_leapfrog`` simulates a damped Hamiltonian system whose potential is
  the negative variance plus a smoothed L1 penalty, integrating it with
  leapfrog steps and re-projecting the position onto the unit sphere;
* ``solve_ista`` does projected proximal gradient on the same objective with
  the exact L1 penalty;
* ``method="pca"`` in ``extract_components`` uses plain power iteration.

``extract_components`` chains any of them with Hotelling deflation.
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from .core import (
    ConvergenceError,
    DataMatrix,
    DegenerateVectorError,
    DimensionError,
    power_iteration,
    project_unit_sphere,
    sign_fix,
)

METHODS = ("pca", "ista", "leapfrog")


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 0.0
    delta: float = 1e-4
    dt: float = 0.05
    damping: float = 0.95
    ista_step: Optional[float] = None  # None: 0.9 / (2 * rough top eigenvalue)
    max_iter: int = 5000
    x_tol: float = 1e-7
    seed: int = 0
    restarts: int = 3
    pca_tol: float = 1e-10
    pca_max_iter: int = 100000

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")
        if self.ista_step is not None and not self.ista_step > 0:
            raise ValueError(f"ista_step must be > 0, got {self.ista_step}")
        if self.max_iter < 1 or self.restarts < 1 or self.pca_max_iter < 1:
            raise ValueError("max_iter, restarts and pca_max_iter must be >= 1")
        if not self.x_tol > 0 or not self.pca_tol > 0:
            raise ValueError("tolerances must be > 0")


@dataclass(frozen=True)
class HamiltonianState:
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if x.shape != p.shape:
            raise DimensionError(f"position {x.shape} and momentum {p.shape} differ")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)


@dataclass
class SolverTrace:
    """Per-iteration observables of the winning run."""

    potential: np.ndarray
    hamiltonian: np.ndarray
    objective_l1: np.ndarray
    grad_norm: np.ndarray
    step: np.ndarray
    termination: str
    restart: int = 0
    dt: Optional[float] = None  # step actually integrated with (leapfrog only)

    @property
    def iterations(self):
        return len(self.potential)


@dataclass
class LoadingsMatrix:
    components: np.ndarray  # d x k, unit-norm columns
    explained: np.ndarray  # x_j^T S_j x_j on the deflated matrix seen by x_j
    traces: List[Optional[SolverTrace]] = field(default_factory=list)

    @property
    def d(self):
        return self.components.shape[0]

    @property
    def k(self):
        return self.components.shape[1]


def _check_square(x, S):
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] != x.shape[0]:
        raise DimensionError(f"vector of length {x.shape[0]} against matrix {S.shape}")


def smooth_l1(x, delta):
    """Differentiable stand-in for ``||x||_1``: ``sum sqrt(x_i^2 + delta)``."""
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    x = np.asarray(x, dtype=float)
    return float(np.sum(np.sqrt(x * x + delta)))


def potential(x, S, lam, delta):
    x = np.asarray(x, dtype=float)
    S = np.asarray(S, dtype=float)
    _check_square(x, S)
    return float(-(x @ S @ x) + lam * smooth_l1(x, delta))


def grad_potential(x, S, lam, delta):
    """Gradient of ``potential`` on all of R^d (not restricted to the sphere)."""
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    x = np.asarray(x, dtype=float)
    S = np.asarray(S, dtype=float)
    _check_square(x, S)
    return -2.0 * (S @ x) + lam * x / np.sqrt(x * x + delta)


def leapfrog_update(x, p, grad, dt, damping=1.0, project=True, tangent=True):
    """One kick-drift-kick step for an arbitrary gradient callable.

    With ``damping=1``, ``project=False`` and ``tangent=False`` this is the
    textbook symplectic leapfrog.
    """
    p_half = damping * p - 0.5 * dt * grad(x)
    x_new = x + dt * p_half
    if project:
        x_new = project_unit_sphere(x_new)
        if tangent:
            p_half = p_half - (p_half @ x_new) * x_new
    p_new = p_half - 0.5 * dt * grad(x_new)
    return x_new, p_new


def leapfrog_step(state, S, config, literal=False):
    """Advance ``state`` by one damped, sphere-constrained leapfrog step.

    ``literal=True`` drops the damping and the tangent projection of the
    momentum, leaving only the re-normalization of the position.
    """
    S = np.asarray(S, dtype=float)

    def grad(x):
        return grad_potential(x, S, config.lam, config.delta)

    x, p = leapfrog_update(
        state.x,
        state.p,
        grad,
        config.dt,
        damping=1.0 if literal else config.damping,
        project=True,
        tangent=not literal,
    )
    return HamiltonianState(x, p)


def _objective_l1(x, S, lam):
    return float(-(x @ S @ x) + lam * np.sum(np.abs(x)))


def _initial_point(d, seed):
    return project_unit_sphere(np.random.default_rng(seed).standard_normal(d))


def _run_restarts(S, config, run_once):
    """Run ``run_once(x0)`` for each restart seed and keep the lowest potential."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"expected a square matrix, got {S.shape}")
    d = S.shape[0]
    best = None
    fallback = None
    for r in range(config.restarts):
        x0 = _initial_point(d, config.seed + r)
        if fallback is None:
            fallback = x0
        try:
            x, trace = run_once(x0)
        except DegenerateVectorError:
            continue
        trace.restart = r
        v = potential(x, S, config.lam, config.delta)
        if best is None or v < best[0]:
            best = (v, x, trace)
    if best is None:
        v = potential(fallback, S, config.lam, config.delta)
        empty = np.empty(0)
        trace = SolverTrace(empty, empty, empty, empty, empty, "restart_exhausted")
        return sign_fix(fallback), trace
    return sign_fix(best[1]), best[2]


def _pack_trace(records, termination):
    arr = np.array(records, dtype=float).reshape(-1, 5)
    return SolverTrace(
        potential=arr[:, 0],
        hamiltonian=arr[:, 1],
        objective_l1=arr[:, 2],
        grad_norm=arr[:, 3],
        step=arr[:, 4],
        termination=termination,
    )


def stable_dt(S, lam, delta, dt):
    """Cap ``dt`` at ``1 / sqrt(L)`` for a curvature bound ``L`` of the potential.

    ``L = 2 ||S||_F + lam / sqrt(delta)``; the second term is the peak
    curvature of the smoothed penalty at zero, which dominates for large
    ``lam`` and makes the fixed default step unstable.
    """
    curvature = 2.0 * float(np.linalg.norm(S)) + lam / np.sqrt(delta)
    return min(dt, 1.0 / np.sqrt(curvature)) if curvature > 0 else dt


def solve_leapfrog(S, config):
    """Leading sparse component via damped Hamiltonian dynamics on the sphere.

    The integration step is ``stable_dt(S, lam, delta, config.dt)``.
    """
    S = np.asarray(S, dtype=float)
    dt = stable_dt(S, config.lam, config.delta, config.dt)
    step_config = replace(config, dt=dt)

    def run_once(x0):
        state = HamiltonianState(x0, np.zeros_like(x0))
        records = []
        termination = "max_iter"
        for _ in range(config.max_iter):
            new = leapfrog_step(state, S, step_config)
            moved = float(np.linalg.norm(new.x - state.x))
            state = new
            v = potential(state.x, S, config.lam, config.delta)
            g = grad_potential(state.x, S, config.lam, config.delta)
            records.append(
                (
                    v,
                    0.5 * float(state.p @ state.p) + v,
                    _objective_l1(state.x, S, config.lam),
                    float(np.linalg.norm(g)),
                    moved,
                )
            )
            if not np.all(np.isfinite(state.p)):
                raise DegenerateVectorError("momentum diverged")
            if moved < config.x_tol:
                termination = "converged"
                break
        trace = _pack_trace(records, termination)
        trace.dt = dt
        return state.x, trace

    return _run_restarts(S, config, run_once)


def soft_threshold(z, t):
    if t < 0:
        raise ValueError(f"threshold must be >= 0, got {t}")
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def sphere_prox(z, t):
    """Maximize ``x.z - t ||x||_1`` over unit vectors ``x``.

    Equals the normalized soft-threshold whenever that is nonzero. When every
    ``|z_i| <= t`` the maximizer is the signed axis of the largest ``|z_i|``.
    """
    shrunk = soft_threshold(z, t)
    if np.any(shrunk != 0.0):
        return project_unit_sphere(shrunk)
    j = int(np.argmax(np.abs(z)))
    if z[j] == 0.0:
        raise DegenerateVectorError("proximal step collapsed to the zero vector")
    out = np.zeros_like(z)
    out[j] = np.sign(z[j])
    return out


def default_ista_step(S, seed=0):
    """``0.9 / (2 * lam1)`` with ``lam1`` from 20 unchecked power steps."""
    S = np.asarray(S, dtype=float)
    v = _initial_point(S.shape[0], seed)
    for _ in range(20):
        w = S @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            break
        v = w / norm
    lam1 = float(v @ S @ v)
    return 0.9 / (2.0 * lam1) if lam1 > 0 else 1.0


def solve_ista(S, config):
    """Leading sparse component via projected proximal gradient (ISTA)."""
    S = np.asarray(S, dtype=float)
    eta = config.ista_step if config.ista_step is not None else default_ista_step(S, config.seed)
    threshold = eta * config.lam

    def run_once(x0):
        x = x0
        records = []
        termination = "max_iter"
        for _ in range(config.max_iter):
            x_new = sphere_prox(x + 2.0 * eta * (S @ x), threshold)
            moved = float(np.linalg.norm(x_new - x))
            x = x_new
            v = potential(x, S, config.lam, config.delta)
            g = grad_potential(x, S, config.lam, config.delta)
            records.append((v, v, _objective_l1(x, S, config.lam), float(np.linalg.norm(g)), moved))
            if moved < config.x_tol:
                termination = "converged"
                break
        return x, _pack_trace(records, termination)

    return _run_restarts(S, config, run_once)


def deflate(S, x):
    """Hotelling deflation ``S - (x^T S x) x x^T``, symmetrized."""
    S = np.asarray(S, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_square(x, S)
    out = S - float(x @ S @ x) * np.outer(x, x)
    return 0.5 * (out + out.T)


def extract_components(S, k, method, config=None):
    """Extract ``k`` components one at a time, deflating ``S`` in between.

    Component ``j`` is solved with seed ``config.seed + j * config.restarts``.
    Solver errors are re-raised with ``component`` set to ``j``.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    config = config or SolverConfig()
    S = np.asarray(S, dtype=float)
    d = S.shape[0]
    if not 1 <= k <= d:
        raise ValueError(f"k must lie in [1, {d}], got {k}")

    columns, explained, traces = [], [], []
    for j in range(k):
        seed = config.seed + j * config.restarts
        try:
            if method == "pca":
                x, _ = power_iteration(S, seed=seed, max_iter=config.pca_max_iter, tol=config.pca_tol)
                trace = None
            elif method == "ista":
                x, trace = solve_ista(S, replace(config, seed=seed))
            else:
                x, trace = solve_leapfrog(S, replace(config, seed=seed))
        except (ConvergenceError, DegenerateVectorError, DimensionError) as exc:
            exc.component = j
            exc.args = (f"component {j}: {exc.args[0]}",) + exc.args[1:]
            raise
        columns.append(x)
        explained.append(float(x @ S @ x))
        traces.append(trace)
        S = deflate(S, x)
    return LoadingsMatrix(np.column_stack(columns), np.array(explained), traces)


def transform(data, mean, W):
    """Project ``data`` (centered with ``mean``) onto the loadings ``W``."""
    components = W.components if isinstance(W, LoadingsMatrix) else np.asarray(W, dtype=float)
    mean = np.asarray(mean, dtype=float)
    if data.d != components.shape[0] or mean.shape != (data.d,):
        raise DimensionError(
            f"data has {data.d} features, mean {mean.shape}, loadings {components.shape}"
        )
    return DataMatrix((data.values - mean) @ components, data.labels)
