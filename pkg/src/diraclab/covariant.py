"""Minimality via cyclicity of the ground vector.

The doubled representation is minimal iff the invariant-mean projection has
rank one, which on the truncations reduces to a checkable statement: the
span of words of length <= L in the generators, applied to the seed vector,
exhausts the n <= L/2 subspace.  ``cyclic_dimension`` measures that span by
breadth-first Gram-Schmidt: only the directions new at depth d need their
generator images examined at depth d+1, since images of older directions
already lie in the current span.

Saturation is an empirical observation, not a theorem asserted by the code:
when a run falls short, the report carries the per-level shortfall instead
of raising.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .linop import SpaceMismatchError, SparseOp

GRAM_TOL = 1e-8


class CyclicityReport(NamedTuple):
    depth: int
    reached: int        # orthonormal directions found
    target: int         # dim of the n <= depth/2 subspace
    saturated: bool     # reached == target
    gram_tol: float
    discarded: int      # candidate images that added no new direction
    history: tuple      # reached dimension after each depth 0..depth
    deficiency: tuple   # (twice-level, missing dims) pairs; () when saturated


class _Frame:
    """Growing orthonormal frame with twice-reorthogonalized insertion."""

    def __init__(self, dim: int, tol: float):
        self.buf = np.zeros((dim, 16))
        self.k = 0
        self.tol = tol

    def try_add(self, w: np.ndarray) -> bool:
        Q = self.buf[:, :self.k]
        for _ in range(2):
            w = w - Q @ (Q.T @ w)
        nw = np.linalg.norm(w)
        if nw <= self.tol:
            return False
        if self.k == self.buf.shape[1]:
            self.buf = np.concatenate(
                [self.buf, np.zeros_like(self.buf)], axis=1)
        self.buf[:, self.k] = w / nw
        self.k += 1
        return True

    def matrix(self) -> np.ndarray:
        return self.buf[:, :self.k]


def cyclic_dimension(generators, seed, depth: int,
                     gram_tol: float = GRAM_TOL) -> CyclicityReport:
    """Dimension of span{(words of length <= depth in generators) seed}.

    generators: square SparseOps on a common space.  seed: either an ordinal
    into that space's basis or an explicit vector.  Requires
    depth/2 <= n_max, so that the target subspace exists in the truncation;
    a candidate image whose component orthogonal to the current span falls
    below gram_tol is discarded and counted.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("cyclic_dimension: need at least one generator")
    space = gens[0].dom
    for g in gens:
        if g.dom.signature != space.signature \
                or g.cod.signature != space.signature:
            raise SpaceMismatchError(
                "cyclic_dimension: generators must be square operators on "
                f"one space; got {g.dom.signature} -> {g.cod.signature} "
                f"alongside {space.signature}")
    depth = int(depth)
    if depth < 0:
        raise ValueError("cyclic_dimension: depth must be >= 0")
    if depth > space.n_max.twice:
        raise ValueError(
            f"cyclic_dimension: depth {depth} reaches level {depth / 2}, "
            f"beyond the truncation n_max = {space.n_max}")

    if isinstance(seed, (int, np.integer)):
        v0 = np.zeros(space.dim)
        v0[int(seed)] = 1.0
    else:
        v0 = np.asarray(seed, dtype=float).copy()
        if v0.shape != (space.dim,):
            raise ValueError(f"cyclic_dimension: seed has shape {v0.shape}, "
                             f"expected ({space.dim},)")
        nv = np.linalg.norm(v0)
        if nv == 0.0:
            raise ValueError("cyclic_dimension: zero seed vector")
        v0 /= nv

    frame = _Frame(space.dim, gram_tol)
    frame.try_add(v0)
    frontier = [v0]
    discarded = 0
    history = [frame.k]
    for _ in range(depth):
        fresh = []
        for v in frontier:
            for g in gens:
                w = g.apply(v)
                if frame.try_add(w):
                    fresh.append(frame.matrix()[:, frame.k - 1].copy())
                else:
                    discarded += 1
        frontier = fresh
        history.append(frame.k)

    reached = frame.k
    target = sum(len(space.levels[tn]) for tn in space.levels if tn <= depth)
    saturated = reached == target
    deficiency = ()
    if not saturated:
        Q = frame.matrix()
        short = []
        for tn in sorted(space.levels):
            if tn > depth:
                continue
            rows = space.levels[tn]
            rank = np.linalg.matrix_rank(Q[rows, :], tol=gram_tol) if reached else 0
            miss = len(rows) - rank
            if miss:
                short.append((tn, miss))
        deficiency = tuple(short)
    return CyclicityReport(depth, reached, target, saturated, gram_tol,
                           discarded, tuple(history), deficiency)
