"""Sparse operator algebra between truncated spaces.

A :class:`SparseOp` is an explicit sparse coefficient table with domain and
codomain metadata.  All algebra enforces space compatibility; entries below
1e-15 are pruned at construction.  Scalars are real doubles throughout (every
displayed coefficient in this problem is real), so the adjoint is the
transpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .hilbert import TruncatedSpace, interior

PRUNE_TOL = 1e-15


class SpaceMismatchError(ValueError):
    """Domain/codomain incompatibility in an operator expression."""


class PowerIterationError(RuntimeError):
    """Operator-norm iteration hit its cap without meeting tolerance.

    Carries the last estimate, the iteration count and the last iterate so
    the caller can diagnose (or accept) the partial result.
    """

    def __init__(self, estimate, iterations, last_iterate):
        super().__init__(
            f"power iteration did not converge: estimate {estimate!r} "
            f"after {iterations} iterations")
        self.estimate = estimate
        self.iterations = iterations
        self.last_iterate = last_iterate


def _prune(mat: sp.csr_matrix) -> sp.csr_matrix:
    mat = mat.tocsr()
    if mat.nnz:
        mat.data[np.abs(mat.data) < PRUNE_TOL] = 0.0
        mat.eliminate_zeros()
    mat.sort_indices()
    return mat


@dataclass(frozen=True, eq=False)
class SparseOp:
    dom: TruncatedSpace
    cod: TruncatedSpace
    mat: sp.csr_matrix

    # ---------------------------------------------------------- constructors

    @staticmethod
    def from_coo(dom, cod, rows, cols, vals) -> "SparseOp":
        m = sp.csr_matrix(
            (np.asarray(vals, dtype=np.float64),
             (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=(cod.dim, dom.dim))
        m.sum_duplicates()
        return SparseOp(dom, cod, _prune(m))

    @staticmethod
    def identity(space) -> "SparseOp":
        return SparseOp(space, space, sp.identity(space.dim, format="csr"))

    @staticmethod
    def zero(dom, cod=None) -> "SparseOp":
        cod = dom if cod is None else cod
        return SparseOp(dom, cod, sp.csr_matrix((cod.dim, dom.dim)))

    @staticmethod
    def diagonal(space, values) -> "SparseOp":
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (space.dim,):
            raise SpaceMismatchError(
                f"diagonal needs {space.dim} values, got {values.shape}")
        return SparseOp(space, space, _prune(sp.diags(values).tocsr()))

    # --------------------------------------------------------------- algebra

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.dom.dim,):
            raise SpaceMismatchError(
                f"vector of length {v.shape} applied to operator with "
                f"domain dim {self.dom.dim}")
        return self.mat @ v

    def compose(self, other: "SparseOp") -> "SparseOp":
        """self after other (matrix product self @ other)."""
        if other.cod.signature != self.dom.signature:
            raise SpaceMismatchError(
                f"compose: domain {self.dom.kind}/{self.dom.n_max} does not "
                f"match codomain {other.cod.kind}/{other.cod.n_max}")
        return SparseOp(other.dom, self.cod, _prune(self.mat @ other.mat))

    def add(self, other: "SparseOp") -> "SparseOp":
        if (other.dom.signature != self.dom.signature
                or other.cod.signature != self.cod.signature):
            raise SpaceMismatchError("add: operators live on different spaces")
        return SparseOp(self.dom, self.cod, _prune(self.mat + other.mat))

    def scale(self, c: float) -> "SparseOp":
        return SparseOp(self.dom, self.cod, _prune(self.mat * float(c)))

    def adjoint(self) -> "SparseOp":
        return SparseOp(self.cod, self.dom, _prune(self.mat.T.tocsr()))

    def __matmul__(self, other):
        return self.compose(other)

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.add(other.scale(-1.0))

    # ------------------------------------------------------------- accessors

    @property
    def nnz(self) -> int:
        return self.mat.nnz

    def entries(self):
        """Yield (row, col, value) triplets in row-major order."""
        coo = self.mat.tocoo()
        for r, c, v in zip(coo.row, coo.col, coo.data):
            yield int(r), int(c), float(v)

    def max_abs(self) -> float:
        return float(np.abs(self.mat.data).max()) if self.mat.nnz else 0.0

    def to_dense(self) -> np.ndarray:
        return self.mat.toarray()


def op_norm(T: SparseOp, tol: float = 1e-10, max_iter: int = 100000) -> float:
    """Largest singular value of T by deterministic power iteration on T*T.

    The start vector is the normalized all-ones vector and the iteration cap
    is 1e5; non-convergence raises :class:`PowerIterationError` with the last
    iterate attached.  Values below ~1e-13 mean "zero at working precision".
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if T.dom.dim == 0 or T.cod.dim == 0 or T.mat.nnz == 0:
        return 0.0
    A = T.mat
    At = A.T.tocsr()
    sigma, iters, converged, last = _kernels.power_iteration(
        A.data, A.indices, A.indptr, A.shape[0], A.shape[1],
        At.data, At.indices, At.indptr, tol=tol, max_iter=max_iter)
    if not converged:
        raise PowerIterationError(sigma, iters, last)
    return sigma


def block_norm(T: SparseOp, n) -> float:
    """Norm of the level-n row block of T (dense SVD; blocks are small)."""
    rows = T.cod.level_ordinals(n)
    block = T.mat[rows, :].toarray()
    if block.size == 0 or not block.any():
        return 0.0
    return float(np.linalg.norm(block, 2))


def interior_projector(space: TruncatedSpace, margin) -> SparseOp:
    """Orthogonal projection onto the interior(margin) subspace."""
    d = np.zeros(space.dim)
    d[interior(space, margin)] = 1.0
    return SparseOp.diagonal(space, d)


def dump(T: SparseOp, path) -> None:
    """Write the operator as coordinate triplets with a space-naming header."""
    with open(path, "w") as fh:
        fh.write(f"# dom kind={T.dom.kind} n_max_twice={T.dom.n_max.twice} "
                 f"dim={T.dom.dim}\n")
        fh.write(f"# cod kind={T.cod.kind} n_max_twice={T.cod.n_max.twice} "
                 f"dim={T.cod.dim}\n")
        fh.write("# row col value\n")
        for r, c, v in T.entries():
            fh.write(f"{r} {c} {v!r}\n")
