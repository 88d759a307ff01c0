"""Sparse-operator kernels for applying the GKSL generator to a dense state.

The generator is dominated by products of very sparse operators (ladder
operators embedded in a big tensor product) with a dense density matrix.
Both products needed by the right-hand side are covered by one CSR
representation per operator:

  left:   A @ rho          (CSR rows of A against rows of rho)
  right:  rho @ A^dagger   (CSR rows of conj(A) dotted with rows of rho)

Kernels are numba-jitted by default. Set PROBESIM_DISABLE_NUMBA=1 to use
the scipy.sparse fallback instead; `benchmarks/bench_kernels.py` compares
the two paths.
"""
from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

_DISABLED = os.environ.get("PROBESIM_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")

if not _DISABLED:
    try:
        from numba import njit, prange

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False

USING_NUMBA = _HAVE_NUMBA


if USING_NUMBA:

    @njit(parallel=True, fastmath=True, cache=True)
    def _csr_dense(indptr, indices, data, b, out):
        # out = A @ b with A in CSR form
        n = indptr.shape[0] - 1
        ncol = b.shape[1]
        for i in prange(n):
            row = out[i]
            for j in range(ncol):
                row[j] = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                a = data[k]
                src = b[indices[k]]
                for j in range(ncol):
                    row[j] += a * src[j]

    @njit(parallel=True, fastmath=True, cache=True)
    def _dense_csr_dag(b, indptr, indices, data_conj, out):
        # out = b @ A^dagger with A in CSR form:
        # out[i, k] = sum_j b[i, j] conj(A[k, j]), walking row k of A.
        # Iterating over rows of b keeps every access within one cached row.
        m = b.shape[0]
        n = indptr.shape[0] - 1
        for i in prange(m):
            brow = b[i]
            orow = out[i]
            for k in range(n):
                acc = 0.0 + 0.0j
                for idx in range(indptr[k], indptr[k + 1]):
                    acc += data_conj[idx] * brow[indices[idx]]
                orow[k] = acc


class SparseOp:
    """CSR form of one operator, supporting A @ rho and rho @ A^dagger."""

    def __init__(self, matrix):
        if sp.issparse(matrix):
            csr = sp.csr_matrix(matrix, dtype=complex)
        else:
            csr = sp.csr_matrix(np.asarray(matrix, dtype=complex))
        csr.sum_duplicates()
        csr.eliminate_zeros()
        self.shape = csr.shape
        self.indptr = csr.indptr.astype(np.int64)
        self.indices = csr.indices.astype(np.int64)
        self.data = np.ascontiguousarray(csr.data)
        self.data_conj = self.data.conj()
        if not USING_NUMBA:
            self._csr = csr
            self._dag_csr = sp.csr_matrix(csr.conj().T)

    def left(self, rho: np.ndarray, out: np.ndarray) -> np.ndarray:
        """out = A @ rho"""
        if USING_NUMBA:
            _csr_dense(self.indptr, self.indices, self.data, rho, out)
            return out
        out[:] = self._csr @ rho
        return out

    def right_dag(self, rho: np.ndarray, out: np.ndarray) -> np.ndarray:
        """out = rho @ A^dagger, reusing the CSR structure of A with
        conjugated data (row k of A is column k of A^dagger)."""
        if USING_NUMBA:
            _dense_csr_dag(rho, self.indptr, self.indices, self.data_conj, out)
            return out
        out[:] = rho @ self._dag_csr
        return out


def warmup():
    """Trigger JIT compilation outside of timed sections."""
    if not USING_NUMBA:
        return
    op = SparseOp(np.eye(2, dtype=complex))
    buf = np.zeros((2, 2), dtype=complex)
    rho = np.eye(2, dtype=complex)
    op.left(rho, buf)
    op.right_dag(rho, buf)
