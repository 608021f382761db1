"""Dense matrices over GF(q): product, RREF, rank, and rank-prescribed sampling.

A Mat is an immutable pairing of a GF(q) field with a 2-D uint8 array of
element encodings.  Degenerate shapes (0 rows or 0 columns) are legal and
represent bases of the zero space.

Sampling takes a numpy ``Generator`` (``np.random.default_rng(seed)``); all
randomness flows through it, so a fixed seed gives a fixed draw sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _kernels
from .errors import DimensionMismatchError, FieldMismatchError, InvalidRankError
from .gf import GF

__all__ = [
    "Mat",
    "matmul",
    "rref",
    "rank",
    "sample_full_rank",
    "sample_matrix_with_rank",
]


@dataclass(frozen=True, eq=False)
class Mat:
    """Immutable dense matrix over GF(q)."""

    field: GF
    array: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.array, dtype=np.uint8)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"matrix must be 2-D, got shape {arr.shape}")
        if arr.size and arr.max() >= self.field.q:
            raise ValueError(f"entry {arr.max()} outside GF({self.field.q})")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "array", arr)

    @property
    def rows(self) -> int:
        return self.array.shape[0]

    @property
    def cols(self) -> int:
        return self.array.shape[1]

    @classmethod
    def from_rows(cls, field: GF, rows) -> "Mat":
        arr = np.array(rows, dtype=np.uint8)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        return cls(field, arr)

    @classmethod
    def zeros(cls, field: GF, n: int, m: int) -> "Mat":
        return cls(field, np.zeros((n, m), dtype=np.uint8))

    @classmethod
    def identity(cls, field: GF, n: int) -> "Mat":
        return cls(field, np.eye(n, dtype=np.uint8))

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and other.field == self.field
            and other.array.shape == self.array.shape
            and np.array_equal(other.array, self.array)
        )

    def __hash__(self):
        return hash((self.field.q, self.array.shape, self.array.tobytes()))

    def __repr__(self):
        return f"Mat({self.field!r}, {self.array.tolist()})"


def _check_same_field(a: Mat, b: Mat) -> None:
    if a.field != b.field:
        raise FieldMismatchError(f"operands over {a.field} and {b.field}")


def matmul(g: Mat, x: Mat) -> Mat:
    """Matrix product over GF(q)."""
    _check_same_field(g, x)
    if g.cols != x.rows:
        raise DimensionMismatchError(f"cannot multiply {g.rows}x{g.cols} by {x.rows}x{x.cols}")
    f = g.field
    out = _kernels.matmul(g.array, x.array, f.add_table, f.mul_table)
    return Mat(f, out)


def rref(m: Mat) -> tuple[Mat, tuple[int, ...]]:
    """Unique reduced row echelon form and its pivot columns."""
    f = m.field
    r, piv = _kernels.rref(m.array, f.add_table, f.mul_table, f.inv_table, f.neg_table)
    return Mat(f, r), tuple(int(c) for c in piv)


def rank(m: Mat) -> int:
    f = m.field
    ranks = _kernels.rank_batch(
        m.array[None, :, :], f.add_table, f.mul_table, f.inv_table, f.neg_table
    )
    return int(ranks[0])


def sample_full_rank(field: GF, n: int, m: int, rng: np.random.Generator) -> Mat:
    """Uniform draw over full-rank n x m matrices, by rejection.

    Acceptance probability is prod_{i=1}^{min(n,m)} (1 - q^{i - min(n,m) - 1})
    over uniform candidates, bounded below by ~0.288 at q = 2.
    """
    if n < 0 or m < 0:
        raise DimensionMismatchError("negative matrix dimension")
    target = min(n, m)
    if target == 0:
        return Mat.zeros(field, n, m)
    f = field
    while True:
        cand = rng.integers(0, field.q, size=(n, m), dtype=np.uint8)
        r = _kernels.rank_batch(cand[None], f.add_table, f.mul_table, f.inv_table, f.neg_table)
        if int(r[0]) == target:
            return Mat(field, cand)


def sample_matrix_with_rank(
    field: GF, n: int, m: int, rank_: int, rng: np.random.Generator
) -> Mat:
    """Random n x m matrix of exactly the requested rank.

    Built as A @ B with A (n x rank) and B (rank x m) each uniform over
    full-rank matrices of their shape.  The composite is not uniform over all
    rank-r matrices, which is acceptable here: the subspace channel law is
    identical for every rank-r realization, so only the rank matters.
    """
    if not 0 <= rank_ <= min(n, m):
        raise InvalidRankError(f"rank {rank_} not in [0, {min(n, m)}] for {n}x{m}")
    if rank_ == 0:
        return Mat.zeros(field, n, m)
    a = sample_full_rank(field, n, rank_, rng)
    b = sample_full_rank(field, rank_, m, rng)
    return matmul(a, b)
