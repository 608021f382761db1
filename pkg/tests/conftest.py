"""Shared fixtures and brute-force oracles for the test suite.

The oracle helpers here enumerate matrices and row spaces directly, without
going through the package's RREF/enumeration code paths, so counting and law
tests check the implementation against independent computations.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from subchan import _kernels
from subchan.gf import GF


def all_matrices(q: int, n: int, m: int):
    """Every n x m matrix over GF(q), as uint8 arrays, in lexicographic order."""
    for flat in itertools.product(range(q), repeat=n * m):
        yield np.array(flat, dtype=np.uint8).reshape(n, m)


def naive_row_space(field: GF, mat: np.ndarray) -> frozenset[tuple[int, ...]]:
    """Row space of mat as a frozenset of vectors, by brute-force closure:
    all GF(q)-linear combinations of the rows, using scalar table ops only."""
    n, m = mat.shape
    vectors = set()
    for coeffs in itertools.product(range(field.q), repeat=n):
        vec = [0] * m
        for c, row in zip(coeffs, mat):
            for j in range(m):
                vec[j] = field.add(vec[j], field.mul(c, int(row[j])))
        vectors.add(tuple(vec))
    return frozenset(vectors)


def brute_force_subspaces(q: int, n: int, ell: int) -> set[frozenset[tuple[int, ...]]]:
    """All ell-dimensional subspaces of F_q^n as vector sets, found by
    collecting the row spaces of every ell x n matrix whose row space has
    q^ell elements."""
    field = GF(q)
    found = set()
    size = q**ell
    for mat in all_matrices(q, ell, n):
        space = naive_row_space(field, mat)
        if len(space) == size:
            found.add(space)
    return found


def subspace_vectors(s) -> frozenset[tuple[int, ...]]:
    """All member vectors of a Subspace, by brute-force combination of its
    canonical basis rows."""
    return naive_row_space(s.field, s.basis.array)


def matrices_by_rank(q: int, n: int, m: int) -> dict[int, list[np.ndarray]]:
    """All n x m matrices over GF(q), grouped by rank (rank measured by
    brute-force row-space size, not the package's elimination)."""
    field = GF(q)
    groups: dict[int, list[np.ndarray]] = {}
    for mat in all_matrices(q, n, m):
        size = len(naive_row_space(field, mat))
        r = 0
        while q**r < size:
            r += 1
        groups.setdefault(r, []).append(mat)
    return groups


# Critical values of the chi-square distribution at significance 0.001.
CHI2_CRIT_P001 = {1: 10.828, 2: 13.816, 3: 16.266, 4: 18.467, 5: 20.515, 6: 22.458}


def chi2_statistic(counts, expected) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    return float(((counts - expected) ** 2 / expected).sum())


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    """Trigger kernel compilation once so timed tests measure algorithms,
    not JIT warmup."""
    f = GF(2)
    t = (f.add_table, f.mul_table, f.inv_table, f.neg_table)
    a = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    for name in _kernels.BACKENDS:
        impl = _kernels.BACKENDS[name]
        impl.matmul(a, a, *t[:2])
        impl.rref(a, *t)
        impl.matmul_batch(a[None], a[None], *t[:2])
        impl.rank_batch(a[None], *t)
        impl.rref_batch(a[None], *t)
    yield
