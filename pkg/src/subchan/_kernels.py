"""Table-driven GF(q) matrix kernels: numba-jitted loops with a numpy fallback.

Every kernel exists twice with identical semantics and bit-identical results:

* scalar-loop implementations, compiled with ``numba.njit`` when available
  (these dominate the Monte Carlo hot path);
* vectorized pure-numpy implementations used as the fallback.

Backend selection happens once at import time from the ``SUBCHAN_BACKEND``
environment variable: ``numba`` forces the jitted path (raises if numba is
missing), ``numpy`` forces the fallback, unset/``auto`` picks numba when
importable.  ``use_backend`` swaps the active implementation at runtime,
which the benchmark and the cross-backend tests rely on.

All kernels take matrices as 2-D/3-D uint8 arrays of element encodings plus
the field's operation tables (see gf.GF): ``add_t``/``mul_t`` are (q, q)
uint8, ``inv_t``/``neg_t`` are (q,) uint8.
"""

from __future__ import annotations

import contextlib
import os
from types import SimpleNamespace

import numpy as np

__all__ = ["BACKEND", "BACKENDS", "use_backend"]

_ENV_VAR = "SUBCHAN_BACKEND"


# ---------------------------------------------------------------------------
# Scalar-loop implementations (numba sources; also the plain-python reference)
# ---------------------------------------------------------------------------

def _matmul_loops(a, b, add_t, mul_t):
    n, kk = a.shape
    m = b.shape[1]
    out = np.zeros((n, m), dtype=np.uint8)
    for i in range(n):
        for j in range(m):
            acc = np.uint8(0)
            for t in range(kk):
                acc = add_t[acc, mul_t[a[i, t], b[t, j]]]
            out[i, j] = acc
    return out


def _rref_loops(mat, add_t, mul_t, inv_t, neg_t):
    r = mat.copy()
    rows, cols = r.shape
    piv_cols = np.empty(min(rows, cols), dtype=np.int64)
    npiv = 0
    for c in range(cols):
        if npiv == rows:
            break
        sel = -1
        for i in range(npiv, rows):
            if r[i, c] != 0:
                sel = i
                break
        if sel < 0:
            continue
        if sel != npiv:
            for j in range(c, cols):
                tmp = r[npiv, j]
                r[npiv, j] = r[sel, j]
                r[sel, j] = tmp
        inv = inv_t[r[npiv, c]]
        if inv != 1:
            for j in range(c, cols):
                r[npiv, j] = mul_t[inv, r[npiv, j]]
        for i in range(rows):
            if i != npiv and r[i, c] != 0:
                f = neg_t[r[i, c]]
                for j in range(c, cols):
                    r[i, j] = add_t[r[i, j], mul_t[f, r[npiv, j]]]
        piv_cols[npiv] = c
        npiv += 1
    return r, piv_cols[:npiv].copy()


def _matmul_batch_loops(a, b, add_t, mul_t):
    nmat, n, kk = a.shape
    m = b.shape[2]
    out = np.zeros((nmat, n, m), dtype=np.uint8)
    for s in range(nmat):
        for i in range(n):
            for j in range(m):
                acc = np.uint8(0)
                for t in range(kk):
                    acc = add_t[acc, mul_t[a[s, i, t], b[s, t, j]]]
                out[s, i, j] = acc
    return out


def _rank_batch_loops(mats, add_t, mul_t, inv_t, neg_t):
    nmat, rows, cols = mats.shape
    ranks = np.empty(nmat, dtype=np.int64)
    work = mats.copy()
    for s in range(nmat):
        npiv = 0
        for c in range(cols):
            if npiv == rows:
                break
            sel = -1
            for i in range(npiv, rows):
                if work[s, i, c] != 0:
                    sel = i
                    break
            if sel < 0:
                continue
            if sel != npiv:
                for j in range(c, cols):
                    tmp = work[s, npiv, j]
                    work[s, npiv, j] = work[s, sel, j]
                    work[s, sel, j] = tmp
            inv = inv_t[work[s, npiv, c]]
            if inv != 1:
                for j in range(c, cols):
                    work[s, npiv, j] = mul_t[inv, work[s, npiv, j]]
            for i in range(npiv + 1, rows):
                if work[s, i, c] != 0:
                    f = neg_t[work[s, i, c]]
                    for j in range(c, cols):
                        work[s, i, j] = add_t[work[s, i, j], mul_t[f, work[s, npiv, j]]]
            npiv += 1
        ranks[s] = npiv
    return ranks


def _rref_batch_loops(mats, add_t, mul_t, inv_t, neg_t):
    nmat, rows, cols = mats.shape
    out = mats.copy()
    ranks = np.empty(nmat, dtype=np.int64)
    for s in range(nmat):
        npiv = 0
        for c in range(cols):
            if npiv == rows:
                break
            sel = -1
            for i in range(npiv, rows):
                if out[s, i, c] != 0:
                    sel = i
                    break
            if sel < 0:
                continue
            if sel != npiv:
                for j in range(c, cols):
                    tmp = out[s, npiv, j]
                    out[s, npiv, j] = out[s, sel, j]
                    out[s, sel, j] = tmp
            inv = inv_t[out[s, npiv, c]]
            if inv != 1:
                for j in range(c, cols):
                    out[s, npiv, j] = mul_t[inv, out[s, npiv, j]]
            for i in range(rows):
                if i != npiv and out[s, i, c] != 0:
                    f = neg_t[out[s, i, c]]
                    for j in range(c, cols):
                        out[s, i, j] = add_t[out[s, i, j], mul_t[f, out[s, npiv, j]]]
            npiv += 1
        ranks[s] = npiv
    return out, ranks


# ---------------------------------------------------------------------------
# Vectorized pure-numpy implementations
# ---------------------------------------------------------------------------

def _matmul_numpy(a, b, add_t, mul_t):
    n, kk = a.shape
    m = b.shape[1]
    out = np.zeros((n, m), dtype=np.uint8)
    for t in range(kk):
        out = add_t[out, mul_t[a[:, t][:, None], b[t, :][None, :]]]
    return out


def _rref_numpy(mat, add_t, mul_t, inv_t, neg_t):
    r = mat.copy()
    rows, cols = r.shape
    piv_cols = []
    npiv = 0
    for c in range(cols):
        if npiv == rows:
            break
        nz = np.nonzero(r[npiv:, c])[0]
        if nz.size == 0:
            continue
        sel = npiv + int(nz[0])
        if sel != npiv:
            r[[npiv, sel]] = r[[sel, npiv]]
        inv = inv_t[r[npiv, c]]
        if inv != 1:
            r[npiv] = mul_t[inv, r[npiv]]
        factors = r[:, c].copy()
        factors[npiv] = 0
        r = add_t[r, mul_t[neg_t[factors][:, None], r[npiv][None, :]]]
        piv_cols.append(c)
        npiv += 1
    return r, np.array(piv_cols, dtype=np.int64)


def _matmul_batch_numpy(a, b, add_t, mul_t):
    nmat, n, kk = a.shape
    m = b.shape[2]
    out = np.zeros((nmat, n, m), dtype=np.uint8)
    for t in range(kk):
        out = add_t[out, mul_t[a[:, :, t][:, :, None], b[:, t, :][:, None, :]]]
    return out


def _eliminate_batch_numpy(mats, add_t, mul_t, inv_t, neg_t, full):
    """Shared batched Gaussian elimination; full=True reduces above pivots too."""
    r = mats.copy()
    nmat, rows, cols = r.shape
    if nmat == 0 or rows == 0 or cols == 0:
        return r, np.zeros(nmat, dtype=np.int64)
    pr = np.zeros(nmat, dtype=np.int64)
    row_ids = np.arange(rows)
    for c in range(cols):
        colv = r[:, :, c]
        eligible = (row_ids[None, :] >= pr[:, None]) & (colv != 0)
        has = eligible.any(axis=1)
        sel = np.nonzero(has)[0]
        if sel.size == 0:
            continue
        first = eligible[sel].argmax(axis=1)
        prs = pr[sel]
        tmp = r[sel, first].copy()
        r[sel, first] = r[sel, prs]
        r[sel, prs] = tmp
        piv_rows = mul_t[inv_t[r[sel, prs, c]][:, None], r[sel, prs]]
        r[sel, prs] = piv_rows
        factors = r[sel, :, c].copy()
        if full:
            factors[np.arange(sel.size), prs] = 0
        else:
            factors[row_ids[None, :] <= prs[:, None]] = 0
        r[sel] = add_t[r[sel], mul_t[neg_t[factors][:, :, None], piv_rows[:, None, :]]]
        pr[sel] += 1
        if np.all(pr == rows):
            break
    return r, pr


def _rank_batch_numpy(mats, add_t, mul_t, inv_t, neg_t):
    return _eliminate_batch_numpy(mats, add_t, mul_t, inv_t, neg_t, full=False)[1]


def _rref_batch_numpy(mats, add_t, mul_t, inv_t, neg_t):
    return _eliminate_batch_numpy(mats, add_t, mul_t, inv_t, neg_t, full=True)


# ---------------------------------------------------------------------------
# Backend registry and selection
# ---------------------------------------------------------------------------

_KERNEL_NAMES = ("matmul", "rref", "matmul_batch", "rank_batch", "rref_batch")

NUMPY_IMPL = SimpleNamespace(
    name="numpy",
    matmul=_matmul_numpy,
    rref=_rref_numpy,
    matmul_batch=_matmul_batch_numpy,
    rank_batch=_rank_batch_numpy,
    rref_batch=_rref_batch_numpy,
)

#: Plain-python (un-jitted) loop kernels; slow, used as a reference in tests.
REFERENCE_IMPL = SimpleNamespace(
    name="reference",
    matmul=_matmul_loops,
    rref=_rref_loops,
    matmul_batch=_matmul_batch_loops,
    rank_batch=_rank_batch_loops,
    rref_batch=_rref_batch_loops,
)

BACKENDS: dict[str, SimpleNamespace] = {"numpy": NUMPY_IMPL}


def _try_build_numba() -> SimpleNamespace | None:
    try:
        from numba import njit
    except ImportError:
        return None
    jit = lambda f: njit(cache=True, nogil=True)(f)  # noqa: E731
    return SimpleNamespace(
        name="numba",
        matmul=jit(_matmul_loops),
        rref=jit(_rref_loops),
        matmul_batch=jit(_matmul_batch_loops),
        rank_batch=jit(_rank_batch_loops),
        rref_batch=jit(_rref_batch_loops),
    )


def _select_backend() -> str:
    requested = os.environ.get(_ENV_VAR, "auto").strip().lower() or "auto"
    if requested not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be 'numba', 'numpy' or 'auto', got {requested!r}")
    if requested == "numpy":
        return "numpy"
    numba_impl = _try_build_numba()
    if numba_impl is not None:
        BACKENDS["numba"] = numba_impl
        return "numba"
    if requested == "numba":
        raise RuntimeError(f"{_ENV_VAR}=numba but numba is not importable")
    return "numpy"


BACKEND = _select_backend()


def _activate(name: str) -> None:
    impl = BACKENDS[name]
    g = globals()
    g["BACKEND"] = name
    for kernel in _KERNEL_NAMES:
        g[kernel] = getattr(impl, kernel)


_activate(BACKEND)


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily activate a backend ('numba' or 'numpy') in this process."""
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {sorted(BACKENDS)}")
    previous = BACKEND
    _activate(name)
    try:
        yield BACKENDS[name]
    finally:
        _activate(previous)
