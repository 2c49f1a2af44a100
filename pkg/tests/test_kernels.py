import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.sparse as sp

from diraclab import _kernels


def _random_csr(rng, shape, density=0.2):
    arr = np.where(rng.random(shape) < density, rng.standard_normal(shape), 0.0)
    return sp.csr_matrix(arr), arr


def _csr_args(mat):
    return (np.ascontiguousarray(mat.data, dtype=np.float64),
            np.ascontiguousarray(mat.indices, dtype=np.int64),
            np.ascontiguousarray(mat.indptr, dtype=np.int64))


def test_matvec_matches_dense():
    rng = np.random.default_rng(0)
    for shape in [(1, 1), (7, 3), (40, 40), (12, 60)]:
        mat, arr = _random_csr(rng, shape)
        x = rng.standard_normal(shape[1])
        data, indices, indptr = _csr_args(mat)
        got = _kernels.csr_matvec(data, indices, indptr, shape[0], x)
        np.testing.assert_allclose(got, arr @ x, rtol=1e-12, atol=1e-12)


def test_jit_and_numpy_paths_agree_in_process():
    rng = np.random.default_rng(1)
    mat, arr = _random_csr(rng, (30, 30))
    x = rng.standard_normal(30)
    data, indices, indptr = _csr_args(mat)
    a = _kernels.csr_matvec(data, indices, indptr, 30, x)
    b = _kernels._csr_matvec_np(data, indices, indptr, 30, x)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)


def test_power_iteration_matches_svd():
    rng = np.random.default_rng(2)
    mat, arr = _random_csr(rng, (50, 35))
    t = mat.T.tocsr()
    sigma, iters, converged, last = _kernels.power_iteration(
        *_csr_args(mat), 50, 35, *_csr_args(t))
    assert converged
    # the stopping rule is a Cauchy criterion, so allow a bit more than tol
    assert sigma == pytest.approx(np.linalg.norm(arr, 2), rel=1e-6)
    assert last.shape == (35,)
    # the numpy fallback gives the same answer to tight tolerance
    s2 = _kernels._power_np(*_csr_args(mat), 50, 35, *_csr_args(t),
                            1e-10, 100000, 1e-14)[0]
    assert sigma == pytest.approx(s2, rel=1e-9)


def test_power_iteration_zero_floor():
    mat = sp.csr_matrix((8, 8))
    t = mat.T.tocsr()
    sigma, iters, converged, last = _kernels.power_iteration(
        *_csr_args(mat), 8, 8, *_csr_args(t))
    assert converged
    assert sigma <= 1e-13
    assert iters == 1


def test_power_iteration_cap():
    mat = sp.csr_matrix(np.diag([1.0, 2.0, 3.0]))
    t = mat.T.tocsr()
    sigma, iters, converged, last = _kernels.power_iteration(
        *_csr_args(mat), 3, 3, *_csr_args(t), max_iter=1)
    assert not converged
    assert iters == 1


def test_env_flag_disables_jit():
    env = dict(os.environ, DIRACLAB_NO_JIT="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from diraclab import _kernels; print(_kernels.USE_JIT)"],
        env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"


def test_env_flag_absent_follows_numba():
    env = {k: v for k, v in os.environ.items() if k != "DIRACLAB_NO_JIT"}
    out = subprocess.run(
        [sys.executable, "-c",
         "from diraclab import _kernels; "
         "print(_kernels.USE_JIT == _kernels.HAS_NUMBA)"],
        env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "True"


def test_fallback_norm_value_matches_jit_across_processes():
    # the same operator-norm computation, one subprocess per path
    code = (
        "import numpy as np, scipy.sparse as sp\n"
        "from diraclab import _kernels\n"
        "rng = np.random.default_rng(9)\n"
        "arr = np.where(rng.random((40, 40)) < 0.25,"
        " rng.standard_normal((40, 40)), 0.0)\n"
        "m = sp.csr_matrix(arr); t = m.T.tocsr()\n"
        "s = _kernels.power_iteration(m.data, m.indices, m.indptr, 40, 40,"
        " t.data, t.indices, t.indptr)[0]\n"
        "print(repr(s))\n"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, DIRACLAB_NO_JIT=flag)
        r = subprocess.run([sys.executable, "-c", code], env=env,
                           capture_output=True, text=True, check=True)
        outs.append(float(r.stdout.strip()))
    assert outs[0] == pytest.approx(outs[1], rel=1e-12)
