"""
Leapfrog energy behaviour
=========================

Without damping or sphere projection the update is the classic symplectic
leapfrog: on a harmonic potential the energy error stays bounded and
shrinks with the square of the step.
"""

import numpy as np

from hamspca.solvers import leapfrog_update


def max_energy_error(dt, steps=10_000):
    x, p = np.array([1.0, 0.0]), np.array([0.0, 0.7])
    h0 = 0.5 * (p @ p + x @ x)
    worst = 0.0
    for _ in range(steps):
        x, p = leapfrog_update(x, p, lambda q: q, dt, damping=1.0, project=False, tangent=False)
        worst = max(worst, abs(0.5 * (p @ p + x @ x) - h0))
    return worst


for dt in (0.1, 0.05, 0.025, 0.0125):
    print(f"dt={dt:<7} max|H - H0| = {max_energy_error(dt):.3e}")

# %%
# With damping the same step bleeds energy every iteration, which is what
# lets the sparse PCA solver come to rest in a minimum.
x, p = np.array([1.0, 0.0]), np.array([0.0, 0.7])
for k in range(201):
    if k % 50 == 0:
        print(f"step {k:3d}  H = {0.5 * (p @ p + x @ x):.6f}")
    x, p = leapfrog_update(x, p, lambda q: q, 0.05, damping=0.95, project=False, tangent=False)
