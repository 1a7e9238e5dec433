"""
One sparse component, three ways
================================

Build a small covariance matrix, then pull its leading direction out with
power iteration, ISTA and damped leapfrog dynamics while the sparsity
weight grows.
"""

import numpy as np

from hamspca import SolverConfig, potential, power_iteration, solve_ista, solve_leapfrog

rng = np.random.default_rng(8)
A = rng.standard_normal((8, 8))
S = A.T @ A / 8

# %%
# Plain PCA direction for reference
v, lam1 = power_iteration(S)
print("top eigenvalue", round(lam1, 4))
print("dense loading ", np.round(v, 3))

# %%
# Sweep the penalty. Both sparse solvers shrink the L1 norm of the loading
# until, for a large weight, only one coordinate survives.
for lam in (0.0, 0.1, 1.0, 10.0):
    x_ista, _ = solve_ista(S, SolverConfig(lam=lam))
    x_lf, trace = solve_leapfrog(S, SolverConfig(lam=lam))
    print(f"lam={lam:5.1f}  ista |x|_1={np.abs(x_ista).sum():.3f}  "
          f"leapfrog |x|_1={np.abs(x_lf).sum():.3f}  "
          f"({trace.termination} after {trace.iterations} steps, dt={trace.dt:.4f})")
    print("    leapfrog loading", np.round(x_lf, 3))

# %%
# The trace records the potential along the winning run; with damping it
# settles rather than oscillating forever.
x, trace = solve_leapfrog(S, SolverConfig(lam=1.0))
for i in (0, 10, 50, 100, trace.iterations - 1):
    print(f"step {i:4d}  V={trace.potential[i]: .6f}  H={trace.hamiltonian[i]: .6f}  |dx|={trace.step[i]:.2e}")
print("V at the returned loading", potential(x, S, 1.0, 1e-4))
