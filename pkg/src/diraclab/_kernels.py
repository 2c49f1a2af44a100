"""Hot numeric kernels: CSR matvec and the operator-norm power iteration.

Two interchangeable implementations live here.  When numba is importable the
@njit versions are used; setting the environment variable DIRACLAB_NO_JIT=1
(before import) forces the vectorized numpy fallback.  Signatures and
semantics are identical on both paths.
"""

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

USE_JIT = HAS_NUMBA and os.environ.get("DIRACLAB_NO_JIT", "") != "1"


# ---------------------------------------------------------------- numpy path

def _csr_matvec_np(data, indices, indptr, n_rows, x):
    if data.size == 0:
        return np.zeros(n_rows)
    rows = np.repeat(np.arange(n_rows), np.diff(indptr))
    return np.bincount(rows, weights=data * x[indices], minlength=n_rows)


def _power_np(data, indices, indptr, n_rows, n_cols,
              tdata, tindices, tindptr, tol, max_iter, floor):
    rows = np.repeat(np.arange(n_rows), np.diff(indptr))
    trows = np.repeat(np.arange(n_cols), np.diff(tindptr))
    x = np.full(n_cols, 1.0 / np.sqrt(n_cols))
    sig = 0.0
    k = 0
    while k < max_iter:
        if data.size:
            y = np.bincount(rows, weights=data * x[indices], minlength=n_rows)
        else:
            y = np.zeros(n_rows)
        if tdata.size:
            z = np.bincount(trows, weights=tdata * y[tindices], minlength=n_cols)
        else:
            z = np.zeros(n_cols)
        new = float(np.sqrt(np.sum(y * y)))
        nz = float(np.sqrt(np.sum(z * z)))
        k += 1
        if nz <= floor * floor:
            return new, k, True, x
        x = z / nz
        if abs(new - sig) <= tol * max(new, floor):
            return new, k, True, x
        sig = new
    return sig, k, False, x


# ----------------------------------------------------------------- jit path

if USE_JIT:

    @njit(cache=True)
    def _csr_matvec_jit(data, indices, indptr, n_rows, x):
        out = np.zeros(n_rows)
        for r in range(n_rows):
            acc = 0.0
            for p in range(indptr[r], indptr[r + 1]):
                acc += data[p] * x[indices[p]]
            out[r] = acc
        return out

    @njit(cache=True)
    def _power_jit(data, indices, indptr, n_rows, n_cols,
                   tdata, tindices, tindptr, tol, max_iter, floor):
        x = np.full(n_cols, 1.0 / np.sqrt(n_cols))
        sig = 0.0
        k = 0
        while k < max_iter:
            y = np.zeros(n_rows)
            for r in range(n_rows):
                acc = 0.0
                for p in range(indptr[r], indptr[r + 1]):
                    acc += data[p] * x[indices[p]]
                y[r] = acc
            z = np.zeros(n_cols)
            for r in range(n_cols):
                acc = 0.0
                for p in range(tindptr[r], tindptr[r + 1]):
                    acc += tdata[p] * y[tindices[p]]
                z[r] = acc
            new = np.sqrt(np.sum(y * y))
            nz = np.sqrt(np.sum(z * z))
            k += 1
            if nz <= floor * floor:
                return new, k, True, x
            x = z / nz
            if abs(new - sig) <= tol * max(new, floor):
                return new, k, True, x
            sig = new
        return sig, k, False, x


def csr_matvec(data, indices, indptr, n_rows, x):
    """y = A @ x for A in CSR pieces."""
    if USE_JIT:
        return _csr_matvec_jit(data, indices, indptr, n_rows, x)
    return _csr_matvec_np(data, indices, indptr, n_rows, x)


def power_iteration(data, indices, indptr, n_rows, n_cols,
                    tdata, tindices, tindptr,
                    tol=1e-10, max_iter=100000, floor=1e-14):
    """Largest singular value of A by power iteration on A*A.

    Starts from the normalized all-ones vector (deterministic).  Returns
    (sigma, iterations, converged, last_iterate).  The ``floor`` terminates
    immediately on operators that are zero at working precision, where the
    relative-change test would otherwise chatter on roundoff noise; reported
    values below ~1e-13 mean exactly that.
    """
    args = (np.ascontiguousarray(data, dtype=np.float64),
            np.ascontiguousarray(indices, dtype=np.int64),
            np.ascontiguousarray(indptr, dtype=np.int64),
            int(n_rows), int(n_cols),
            np.ascontiguousarray(tdata, dtype=np.float64),
            np.ascontiguousarray(tindices, dtype=np.int64),
            np.ascontiguousarray(tindptr, dtype=np.int64),
            float(tol), int(max_iter), float(floor))
    if USE_JIT:
        sig, k, ok, x = _power_jit(*args)
        return float(sig), int(k), bool(ok), x
    sig, k, ok, x = _power_np(*args)
    return float(sig), int(k), bool(ok), x
