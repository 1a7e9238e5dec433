"""Sparse PCA by damped Hamiltonian dynamics, with ISTA and plain PCA baselines."""

from .core import (
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
from .solvers import (
    HamiltonianState,
    LoadingsMatrix,
    SolverConfig,
    SolverTrace,
    deflate,
    extract_components,
    grad_potential,
    leapfrog_step,
    potential,
    smooth_l1,
    soft_threshold,
    solve_ista,
    solve_leapfrog,
    transform,
)
from .classify import (
    KnnModel,
    KrrModel,
    accuracy,
    knn_fit,
    knn_predict,
    krr_fit,
    krr_predict,
)
from .data import DatasetPair, load_csv, load_pgm_dir, synth_dataset, write_csv

__version__ = "0.1.0"
