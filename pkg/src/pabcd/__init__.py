"""Parallel randomized coordinate descent with active-set identification for the Lasso."""

from .generator import GeneratorSpec, describe, generate
from .problem import CompositeProblem, SolverState, build_lasso, default_lambda
from .sampler import SamplerSpec
from .solvers import RunRecord, SolverParams, solve
from .sparse import SparseMatrix, load_libsvm, load_matrix_market

__all__ = [
    "CompositeProblem",
    "GeneratorSpec",
    "RunRecord",
    "SamplerSpec",
    "SolverParams",
    "SolverState",
    "SparseMatrix",
    "build_lasso",
    "default_lambda",
    "describe",
    "generate",
    "load_libsvm",
    "load_matrix_market",
    "solve",
]

__version__ = "0.1.0"
