#!/usr/bin/env python3
"""Time the jit and pure-numpy power-iteration kernels on real workloads.

The matrices are the relation-defect operators of the scalar representation
(realistic band sparsity), so the comparison reflects what op_norm actually
spends its time on.  Run with a plain interpreter; numba must be importable
for the jit column to appear.
"""

import argparse
import time

import numpy as np

from diraclab import (D1_PARAMS, HalfInt, dirac_family, enumerate_space,
                      hat_generators, interior_projector, pi_hat,
                      relation_words)
from diraclab import _kernels


def workload(tnmax: int, q: float):
    """Two relation defects (nearly empty) and four Dirac commutators
    (full band sparsity) — the two extremes op_norm meets in practice."""
    l2 = enumerate_space("L2", HalfInt(tnmax))
    ops = hat_generators(l2, q)
    P = interior_projector(l2, 1)
    words = relation_words(q)
    out = []
    for name in ("unit_left", "beta_normal"):
        out.append((f"defect:{name}", (pi_hat(words[name], l2, q, ops=ops)
                                       @ P).mat))
    d1 = dirac_family(D1_PARAMS, l2)
    for g, T in ops.items():
        out.append((f"[D1,{g}]", ((d1 @ T - T @ d1) @ P).mat))
    return out


def csr_args(m):
    mt = m.T.tocsr()
    return (np.ascontiguousarray(m.data, dtype=np.float64),
            np.ascontiguousarray(m.indices, dtype=np.int64),
            np.ascontiguousarray(m.indptr, dtype=np.int64),
            m.shape[0], m.shape[1],
            np.ascontiguousarray(mt.data, dtype=np.float64),
            np.ascontiguousarray(mt.indices, dtype=np.int64),
            np.ascontiguousarray(mt.indptr, dtype=np.int64),
            1e-10, 100000, 1e-14)


def best_time(fn, args, repeat):
    best, sigma = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        sigma = fn(*args)[0]
        best = min(best, time.perf_counter() - t0)
    return best, float(sigma)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nmax", type=int, default=24,
                    help="truncation as doubled integer (default 24)")
    ap.add_argument("--q", type=float, default=0.5)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    mats = workload(args.nmax, args.q)
    dim = mats[0][1].shape[0]
    print(f"workload: {len(mats)} operators (2 relation defects, "
          f"4 Dirac commutators), dim {dim}, q={args.q}, "
          f"best of {args.repeat}")
    if not _kernels.HAS_NUMBA:
        print("numba not importable: timing the numpy path only")
    elif not _kernels.USE_JIT:
        print("DIRACLAB_NO_JIT=1: the jit kernels are not compiled in this "
              "process; unset it to benchmark both paths")

    have_jit = _kernels.HAS_NUMBA and _kernels.USE_JIT
    if have_jit:  # compile outside the timed region
        _kernels._power_jit(*csr_args(mats[0][1]))

    header = f"{'matrix':18s} {'nnz':>8s} {'numpy ms':>10s}"
    if have_jit:
        header += f" {'jit ms':>10s} {'speedup':>8s}"
    print(header)
    for name, m in mats:
        a = csr_args(m)
        t_np, s_np = best_time(_kernels._power_np, a, args.repeat)
        line = f"{name:18s} {m.nnz:8d} {t_np * 1e3:10.2f}"
        if have_jit:
            t_jit, s_jit = best_time(_kernels._power_jit, a, args.repeat)
            if abs(s_np - s_jit) > 1e-9 * max(1.0, s_np):
                raise SystemExit(f"kernel disagreement on {name}: "
                                 f"{s_np} vs {s_jit}")
            line += f" {t_jit * 1e3:10.2f} {t_np / t_jit:8.2f}x"
        print(line)


if __name__ == "__main__":
    main()
