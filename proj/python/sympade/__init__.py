"""Padé-based symplectic integrators for linear stochastic Hamiltonian systems."""

from ._core import (
    DEFAULT_SEED,
    SympadeError,
    builtin_experiments,
    matrix_exp,
    pade_coefficients,
    pade_transfer_matrix,
    run_experiment,
    symplectic_defect,
)

__all__ = [
    "DEFAULT_SEED",
    "SympadeError",
    "builtin_experiments",
    "matrix_exp",
    "pade_coefficients",
    "pade_transfer_matrix",
    "run_experiment",
    "symplectic_defect",
]
