import numpy as np
import pytest

from diraclab.hilbert import enumerate_space
from diraclab.linop import (
    PowerIterationError,
    SparseOp,
    SpaceMismatchError,
    block_norm,
    dump,
    interior_projector,
    op_norm,
)
from diraclab.qnum import half


def _toy_space(dim_levels):
    """A stand-in space: use L2 truncations whose dims we know."""
    return enumerate_space("L2", half(dim_levels))


def _dense_op(space_a, space_b, arr):
    arr = np.asarray(arr, dtype=float)
    rows, cols = np.nonzero(arr)
    return SparseOp.from_coo(space_a, space_b, rows, cols, arr[rows, cols])


def test_identity_and_apply():
    sp = _toy_space(1)  # dim 14
    ident = SparseOp.identity(sp)
    v = np.arange(sp.dim, dtype=float)
    assert np.array_equal(ident.apply(v), v)
    with pytest.raises(SpaceMismatchError):
        ident.apply(np.ones(sp.dim + 1))


def test_zero_and_diagonal():
    sp = _toy_space(0.5)  # dim 5
    z = SparseOp.zero(sp)
    assert z.nnz == 0 and op_norm(z) == 0.0
    d = SparseOp.diagonal(sp, [1.0, 2.0, 3.0, 4.0, 5.0])
    assert d.apply(np.ones(5)).tolist() == [1.0, 2.0, 3.0, 4.0, 5.0]
    with pytest.raises(SpaceMismatchError):
        SparseOp.diagonal(sp, [1.0, 2.0])


def test_prune_tolerance():
    sp = _toy_space(0.5)
    T = SparseOp.from_coo(sp, sp, [0, 1], [0, 1], [1e-16, 1.0])
    assert T.nnz == 1


def test_adjoint_involution_and_shift():
    sp = _toy_space(1)
    rng = np.random.default_rng(7)
    arr = np.where(rng.random((sp.dim, sp.dim)) < 0.2,
                   rng.standard_normal((sp.dim, sp.dim)), 0.0)
    T = _dense_op(sp, sp, arr)
    assert np.array_equal(T.adjoint().adjoint().to_dense(), T.to_dense())
    # <Tx, y> = <x, T*y> on a few random pairs
    for _ in range(5):
        x = rng.standard_normal(sp.dim)
        y = rng.standard_normal(sp.dim)
        lhs = float(T.apply(x) @ y)
        rhs = float(x @ T.adjoint().apply(y))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_compose_identity_and_mismatch():
    a = _toy_space(1)
    b = _toy_space(2)
    T = SparseOp.from_coo(a, b, range(a.dim), range(a.dim), np.ones(a.dim))
    assert np.array_equal((T @ SparseOp.identity(a)).to_dense(), T.to_dense())
    assert np.array_equal((SparseOp.identity(b) @ T).to_dense(), T.to_dense())
    with pytest.raises(SpaceMismatchError):
        T @ T
    with pytest.raises(SpaceMismatchError):
        T + SparseOp.identity(a)


def test_op_norm_examples():
    sp3 = _toy_space(0.5)
    ident = SparseOp.identity(sp3)
    assert op_norm(ident) == pytest.approx(1.0, abs=1e-10)
    diag = SparseOp.diagonal(sp3, [1.0, 2.0, 3.0, 0.0, 0.0])
    assert op_norm(diag) == pytest.approx(3.0, rel=1e-9)
    # a nilpotent single-entry operator still has norm 1
    nil = SparseOp.from_coo(sp3, sp3, [0], [1], [1.0])
    assert op_norm(nil) == pytest.approx(1.0, rel=1e-9)


def test_op_norm_matches_dense_svd():
    sp = _toy_space(1)
    rng = np.random.default_rng(3)
    arr = np.where(rng.random((sp.dim, sp.dim)) < 0.3,
                   rng.standard_normal((sp.dim, sp.dim)), 0.0)
    T = _dense_op(sp, sp, arr)
    assert op_norm(T) == pytest.approx(np.linalg.norm(arr, 2), rel=1e-8)


def test_op_norm_nonconvergence_diagnostic():
    sp = _toy_space(0.5)
    diag = SparseOp.diagonal(sp, [1.0, 2.0, 3.0, 4.0, 5.0])
    with pytest.raises(PowerIterationError) as exc:
        op_norm(diag, max_iter=1)
    err = exc.value
    assert err.iterations == 1
    assert err.estimate > 0
    assert err.last_iterate.shape == (sp.dim,)
    assert "did not converge" in str(err)


def test_norm_equals_adjoint_norm_randomized():
    # dim <= 500; dim(L2, 4) = 285
    sp = _toy_space(4)
    rng = np.random.default_rng(11)
    k = 2000
    rows = rng.integers(0, sp.dim, size=k)
    cols = rng.integers(0, sp.dim, size=k)
    vals = rng.standard_normal(k)
    T = SparseOp.from_coo(sp, sp, rows, cols, vals)
    a, b = op_norm(T), op_norm(T.adjoint())
    assert abs(a - b) <= 1e-9 * max(a, 1.0)


def test_submultiplicativity():
    sp = _toy_space(1)
    rng = np.random.default_rng(5)
    arrs = [np.where(rng.random((sp.dim, sp.dim)) < 0.3,
                     rng.standard_normal((sp.dim, sp.dim)), 0.0)
            for _ in range(2)]
    S, T = (_dense_op(sp, sp, a) for a in arrs)
    assert op_norm(S @ T) <= op_norm(S) * op_norm(T) * (1 + 1e-9)


def test_block_norm_examples():
    sp = _toy_space(2)
    ident = SparseOp.identity(sp)
    for tn in range(5):
        assert block_norm(ident, half(tn / 2)) == pytest.approx(1.0)
    z = SparseOp.zero(sp)
    assert block_norm(z, half(1)) == 0.0
    # diagonal with value q^n on level n: block norm at level 2 is q^2
    q = 0.5
    vals = np.array([q ** lab.n.value for lab in sp.basis])
    d = SparseOp.diagonal(sp, vals)
    assert block_norm(d, half(2)) == pytest.approx(0.25, rel=1e-12)
    with pytest.raises(ValueError):
        block_norm(d, half(7))


def test_block_norm_brackets_op_norm():
    # for a banded operator: max_n block_norm <= op_norm <= sum_n block_norm
    from diraclab.rep_l2 import hat_generators

    sp = _toy_space(3)
    ops = hat_generators(sp, 0.5)
    T = ops["alpha"]
    blocks = [block_norm(T, half(tn / 2)) for tn in range(sp.n_max.twice + 1)]
    # dense SVD as the exact reference; the operator has near-degenerate top
    # singular values, so the power-iteration estimate is only checked to 1e-6
    exact = float(np.linalg.norm(T.to_dense(), 2))
    assert max(blocks) <= exact * (1 + 1e-12)
    assert exact <= sum(blocks) * (1 + 1e-12)
    assert op_norm(T) == pytest.approx(exact, rel=1e-6)


def test_scale_sub_max_abs():
    sp = _toy_space(0.5)
    T = SparseOp.diagonal(sp, [1.0, -2.0, 0.5, 0.0, 0.0])
    assert T.scale(2.0).max_abs() == 4.0
    diff = T - T
    assert diff.nnz == 0 and diff.max_abs() == 0.0


def test_interior_projector():
    sp = _toy_space(1)
    P = interior_projector(sp, half(0.5))
    v = np.ones(sp.dim)
    out = P.apply(v)
    assert out.sum() == 5.0
    assert set(np.nonzero(out)[0]) == {0, 1, 2, 3, 4}


def test_dump_format(tmp_path):
    sp = _toy_space(0.5)
    T = SparseOp.from_coo(sp, sp, [0, 2], [1, 3], [0.5, -1.25])
    path = tmp_path / "op.txt"
    dump(T, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# dom kind=L2")
    assert lines[2] == "# row col value"
    assert lines[3] == "0 1 0.5"
    assert lines[4] == "2 3 -1.25"
