"""Rank-simulated grid partitioning, sparse linear algebra and Krylov solvers."""

import json

import numpy as np

from . import _core
from ._core import Error, partition, partition_quality, sfc_encode, sfc_index

__all__ = [
    "Error",
    "generate",
    "partition",
    "partition_experiment",
    "partition_quality",
    "sfc_encode",
    "sfc_index",
    "solve",
    "solve_experiment",
    "spmv",
    "to_scipy",
]


def _csr_parts(a):
    """(shape, indptr, indices, data) from a scipy sparse matrix or a dict from generate()."""
    if isinstance(a, dict):
        return a["shape"], a["indptr"], a["indices"], a["data"]
    a = a.tocsr()
    return a.shape, a.indptr, a.indices, a.data


def generate(problem, nx, ny, nz, contrast=1.0, seed=1, coupling=0.1):
    return _core.generate(problem, nx, ny, nz, contrast, seed, coupling)


def to_scipy(system):
    import scipy.sparse as sp

    return sp.csr_matrix((system["data"], system["indices"], system["indptr"]), shape=system["shape"])


def spmv(a, x, np_ranks=1):
    (n, m), indptr, indices, data = _csr_parts(a)
    return _core.spmv(n, m, indptr, indices, data, np.asarray(x, dtype=float), np_ranks)


def solve(a, b, np_ranks=1, **options):
    """Solve a x = b on np_ranks simulated ranks; options mirror _core.solve."""
    (n, m), indptr, indices, data = _csr_parts(a)
    if n != m:
        raise ValueError("matrix must be square")
    return _core.solve(n, indptr, indices, data, np.asarray(b, dtype=float), np_ranks, **options)


def solve_experiment(problem, nx, ny, nz, **options):
    return json.loads(_core.run_solver_experiment(problem, nx, ny, nz, **options))


def partition_experiment(nx, ny, nz, methods=("hsfc", "morton", "block"), np_list=(2, 4, 8)):
    return json.loads(_core.run_partition_experiment(nx, ny, nz, list(methods), list(np_list)))
