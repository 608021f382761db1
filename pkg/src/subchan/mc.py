"""Monte Carlo verification harness for the subspace channel.

Simulates batches of channel uses per input subspace, tabulates empirical
output frequencies, and scores them against the analytical transition law
under the binomial model.

Determinism contract: a master seed expands into one substream per input via
``SeedSequence(entropy=seed, spawn_key=(input_index,))``, and each substream
is consumed in a fixed documented order (deficiency draws, then basis
selectors, then transfer-matrix factors grouped by ascending deficiency).
Identical (spec, draws, seed) therefore reproduce the identical report, on
either kernel backend: all randomness is drawn through numpy Generators at
the orchestration layer and the kernels are exact integer functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .capacity import CapacityReport, capacity_closed_form
from .channel import ChannelSpec, RankDefDist, build_dmc, estimate_rank_def_dist
from .errors import InsufficientDataError
from .gf import GF
from .grassmann import Subspace, enumerate_grassmannian, subspace_label
from .matrix import Mat

__all__ = [
    "McCell",
    "McReport",
    "PipelineReport",
    "empirical_capacity_pipeline",
    "mc_report_to_csv",
    "mc_report_to_dict",
    "run_mc",
]


def _substream(seed: int, input_index: int) -> np.random.Generator:
    """Per-input random stream: the master seed with the input index mixed in."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(input_index),)))


def _tables(field: GF):
    return field.add_table, field.mul_table, field.inv_table, field.neg_table


def _batch_full_rank(field: GF, n: int, m: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """count uniform full-rank n x m matrices, by chunked rejection: draw
    exactly as many candidates as are still missing, keep the full-rank ones."""
    out = np.zeros((count, n, m), dtype=np.uint8)
    target = min(n, m)
    if count == 0 or target == 0:
        return out
    tables = _tables(field)
    filled = 0
    while filled < count:
        cand = rng.integers(0, field.q, size=(count - filled, n, m), dtype=np.uint8)
        good = cand[_kernels.rank_batch(cand, *tables) == target]
        out[filled : filled + good.shape[0]] = good
        filled += good.shape[0]
    return out


def _batch_with_rank(field: GF, n: int, m: int, rank_: int, count: int, rng) -> np.ndarray:
    """count matrices of exactly the requested rank, as products of uniform
    full-rank factors (same law as matrix.sample_matrix_with_rank)."""
    if rank_ == 0:
        return np.zeros((count, n, m), dtype=np.uint8)
    a = _batch_full_rank(field, n, rank_, count, rng)
    b = _batch_full_rank(field, rank_, m, count, rng)
    return _kernels.matmul_batch(a, b, field.add_table, field.mul_table)


def _simulate_outputs(
    spec: ChannelSpec, u: Subspace, draws: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Batched channel uses: returns (draws, h, T) canonical RREF output
    bases (zero-padded) and the (draws,) output dimensions."""
    f, h, T = spec.field, spec.h, spec.T
    cdf = np.cumsum(spec.rank_def.probs)
    defs = np.minimum(np.searchsorted(cdf, rng.random(draws), side="right"), h).astype(np.int64)
    selectors = _batch_full_rank(f, h, h, draws, rng)
    x = _kernels.matmul_batch(
        selectors, np.repeat(u.basis.array[None, :, :], draws, axis=0), f.add_table, f.mul_table
    )
    g = np.zeros((draws, h, h), dtype=np.uint8)
    for d in range(h + 1):
        idx = np.nonzero(defs == d)[0]
        if idx.size:
            g[idx] = _batch_with_rank(f, h, h, h - d, idx.size, rng)
    y = _kernels.matmul_batch(g, x, f.add_table, f.mul_table)
    canon, dims = _kernels.rref_batch(y, *_tables(f))
    return canon, dims


@dataclass(frozen=True)
class McCell:
    """One (input, output) tally with its binomial z-score against the law."""

    input_index: int
    output_index: int
    input_label: str
    output_label: str
    count: int
    expected_prob: float
    z_score: float


@dataclass(frozen=True, eq=False)
class McReport:
    spec: ChannelSpec
    draws_per_input: int
    seed: int
    cells: tuple[McCell, ...]
    max_abs_deviation: float
    worst_z_score: float
    off_support_hits: int

    @property
    def empirical(self) -> dict[tuple[int, int], int]:
        """Sparse (input, output) -> count map of observed transitions."""
        return {
            (c.input_index, c.output_index): c.count for c in self.cells if c.count > 0
        }


def _cell_z(count: int, draws: int, p: float) -> float:
    if p <= 0.0:
        return math.inf if count > 0 else 0.0
    if p >= 1.0:
        return 0.0 if count == draws else math.inf
    return (count - draws * p) / math.sqrt(draws * p * (1.0 - p))


def run_mc(spec: ChannelSpec, draws_per_input: int, seed: int) -> McReport:
    """Simulate draws_per_input channel uses for every input subspace and
    score the empirical law against the analytical one."""
    if draws_per_input < 1:
        raise InsufficientDataError(f"draws_per_input must be >= 1, got {draws_per_input}")
    dmc = build_dmc(spec)
    f, h, T = spec.field, spec.h, spec.T
    n = draws_per_input

    cells: list[McCell] = []
    max_dev = 0.0
    worst_z = 0.0
    off_support = 0
    input_labels = [subspace_label(u) for u in dmc.input_index]
    output_labels = dmc.output_index.labels()

    for i, u in enumerate(dmc.input_index):
        canon, _dims = _simulate_outputs(spec, u, n, _substream(seed, i))
        uniq, counts = np.unique(canon.reshape(n, h * T), axis=0, return_counts=True)
        observed: dict[int, int] = {}
        for row, cnt in zip(uniq, counts):
            mat = row.reshape(h, T)
            dim = int(np.count_nonzero(mat.any(axis=1)))
            sub = Subspace(f, T, Mat(f, mat[:dim]))
            observed[dmc.output_index.position(sub)] = int(cnt)
        support = set(np.nonzero(dmc.trans[i])[0].tolist())
        for j in sorted(support | set(observed)):
            p = float(dmc.trans[i, j])
            cnt = observed.get(j, 0)
            z = _cell_z(cnt, n, p)
            cells.append(
                McCell(i, j, input_labels[i], output_labels[j], cnt, p, z)
            )
            max_dev = max(max_dev, abs(cnt / n - p))
            if p == 0.0:
                off_support += cnt
            else:
                worst_z = max(worst_z, abs(z))
    if off_support:
        worst_z = math.inf
    return McReport(spec, n, seed, tuple(cells), max_dev, worst_z, off_support)


@dataclass(frozen=True, eq=False)
class PipelineReport:
    """End-to-end result: the estimated rank-deficiency distribution and the
    capacities computed from the estimate and from the true distribution."""

    estimated_dist: RankDefDist
    capacity_estimated: CapacityReport
    capacity_true: CapacityReport
    deficiency_counts: tuple[int, ...]
    draws: int
    seed: int


def empirical_capacity_pipeline(
    spec: ChannelSpec, draws: int, seed: int, log_base: float = 2.0
) -> tuple[RankDefDist, PipelineReport]:
    """Simulate, estimate the rank-deficiency distribution from observed
    output dimensions, and compute capacity from the estimate.

    All draws use the first Grassmannian input subspace: the output-dimension
    law is the same for every input, so any fixed input estimates the same
    distribution.
    """
    if draws < 1:
        raise InsufficientDataError(f"draws must be >= 1, got {draws}")
    first = enumerate_grassmannian(spec.field, spec.T, spec.h)[0]
    _canon, dims = _simulate_outputs(spec, first, draws, _substream(seed, 0))
    deficiencies = (spec.h - dims).astype(np.int64)
    est = estimate_rank_def_dist(deficiencies.tolist(), spec.h, kind="deficiency")
    counts = np.bincount(deficiencies, minlength=spec.h + 1)
    report = PipelineReport(
        estimated_dist=est,
        capacity_estimated=capacity_closed_form(replace(spec, rank_def=est), log_base),
        capacity_true=capacity_closed_form(spec, log_base),
        deficiency_counts=tuple(int(c) for c in counts),
        draws=draws,
        seed=seed,
    )
    return est, report


def _json_float(x: float):
    return float(x) if math.isfinite(x) else None


def mc_report_to_dict(report: McReport) -> dict:
    return {
        "format_version": 1,
        "q": report.spec.field.q,
        "T": report.spec.T,
        "h": report.spec.h,
        "rank_def": [float(p) for p in report.spec.rank_def.probs],
        "draws_per_input": report.draws_per_input,
        "seed": report.seed,
        "max_abs_deviation": report.max_abs_deviation,
        "worst_z_score": _json_float(report.worst_z_score),
        "off_support_hits": report.off_support_hits,
        "cells": [
            {
                "input": c.input_label,
                "output": c.output_label,
                "count": c.count,
                "expected_prob": c.expected_prob,
                "z": _json_float(c.z_score),
            }
            for c in report.cells
        ],
    }


def mc_report_to_csv(report: McReport, fileobj) -> None:
    import csv

    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(["input", "output", "count", "expected_prob", "z"])
    for c in report.cells:
        writer.writerow(
            [c.input_label, c.output_label, c.count, repr(c.expected_prob), repr(c.z_score)]
        )
