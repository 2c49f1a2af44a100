"""Spinorial representation on the doubled space, and the isospectral D.

Every level-n vector pair is written as a coefficient column
v^n_{ij} = (u^n_{ij}, d^n_{ij})^T, with the convention d^n_{ij} = 0 for
j = +-(n+1/2).  The four generator images are assembled from 2x2 coefficient
matrices:

    pi'(alpha*) v^n_{ij} = a+_{nij} v^{n+1/2}_{i+1/2, j+1/2} + a-_{nij} v^{n-1/2}_{i+1/2, j+1/2}
    pi'(-beta)  v^n_{ij} = b+_{nij} v^{n+1/2}_{i+1/2, j-1/2} + b-_{nij} v^{n-1/2}_{i+1/2, j-1/2}
    pi'(alpha)  v^n_{ij} = ta+_{nij} v^{n+1/2}_{i-1/2, j-1/2} + ta-_{nij} v^{n-1/2}_{i-1/2, j-1/2}
    pi'(-beta*) v^n_{ij} = tb+_{nij} v^{n+1/2}_{i-1/2, j+1/2} + tb-_{nij} v^{n-1/2}_{i-1/2, j+1/2}

(the beta displays carry the minus sign, so pi'(beta) and pi'(beta*) negate
them).  The matrices act on the coefficient column: rows address the target
band, columns the source band, i.e. the entry routed into band t from band s
of the source is M[t, s].  Any coefficient matrix referenced at labels
outside the valid range is the zero matrix, mirroring the d-vector
convention.

Transcription of the four displays is isolated in one leaf function per
matrix below — it is the highest-risk step of the whole build, and each leaf
is pinned against independent evaluation oracles in the tests.
"""

from __future__ import annotations

import math

import numpy as np

from .hilbert import DoubleIndex, TruncatedSpace
from .linop import SparseOp
from .qnum import HalfInt, half, q_number, validate_q

_BAND = {"up": 0, "down": 1}
_BAND_NAME = ("up", "down")


def _sqrt0(x: float) -> float:
    return math.sqrt(x) if x > 0.0 else 0.0


def a_plus(n, i, j, q: float) -> np.ndarray:
    """2x2 coefficient matrix a+_{nij}.

        q^{(i+j-1/2)/2} [n+i+1]^{1/2} *
            [ q^{-n-1/2} [n+j+3/2]^{1/2} / [2n+2]        0                              ]
            [ q^{1/2} [n-j+1/2]^{1/2} / ([2n+1][2n+2])   q^{-n} [n+j+1/2]^{1/2} / [2n+1] ]
    """
    q = validate_q(q)
    tn, ti, tj = half(n).twice, half(i).twice, half(j).twice
    nv = tn / 2.0
    qn = lambda t: q_number(HalfInt(t), q)
    pref = q ** ((ti / 2.0 + tj / 2.0 - 0.5) / 2.0) * _sqrt0(qn(tn + ti + 2))
    uu = q ** (-nv - 0.5) * _sqrt0(qn(tn + tj + 3)) / qn(2 * tn + 4)
    du = q ** 0.5 * _sqrt0(qn(tn - tj + 1)) / (qn(2 * tn + 2) * qn(2 * tn + 4))
    dd = q ** (-nv) * _sqrt0(qn(tn + tj + 1)) / qn(2 * tn + 2)
    return pref * np.array([[uu, 0.0], [du, dd]])


def a_minus(n, i, j, q: float) -> np.ndarray:
    """2x2 coefficient matrix a-_{nij}.

        q^{(i+j-1/2)/2} [n-i]^{1/2} *
            [ q^{n+1} [n-j+1/2]^{1/2} / [2n+1]   -q^{1/2} [n+j+1/2]^{1/2} / ([2n][2n+1]) ]
            [ 0                                   q^{n+1/2} [n-j-1/2]^{1/2} / [2n]       ]

    The prefactor [n-i]^{1/2} vanishes at i = n (in particular everywhere at
    n = 0, where the [2n] denominators would be singular), giving the zero
    matrix there.
    """
    q = validate_q(q)
    tn, ti, tj = half(n).twice, half(i).twice, half(j).twice
    nv = tn / 2.0
    qn = lambda t: q_number(HalfInt(t), q)
    pref = q ** ((ti / 2.0 + tj / 2.0 - 0.5) / 2.0) * _sqrt0(qn(tn - ti))
    if pref == 0.0:
        return np.zeros((2, 2))
    uu = q ** (nv + 1) * _sqrt0(qn(tn - tj + 1)) / qn(2 * tn + 2)
    ud = -q ** 0.5 * _sqrt0(qn(tn + tj + 1)) / (qn(2 * tn) * qn(2 * tn + 2))
    dd = q ** (nv + 0.5) * _sqrt0(qn(tn - tj - 1)) / qn(2 * tn)
    return pref * np.array([[uu, ud], [0.0, dd]])


def b_plus(n, i, j, q: float) -> np.ndarray:
    """2x2 coefficient matrix b+_{nij}.

        q^{(i+j-1/2)/2} [n+i+1]^{1/2} *
            [ [n-j+3/2]^{1/2} / [2n+2]                      0                               ]
            [ -q^{-n-1} [n+j+1/2]^{1/2} / ([2n+1][2n+2])    q^{-1/2} [n-j+1/2]^{1/2} / [2n+1] ]

    The prefactor [n+i+1]^{1/2} never vanishes on valid labels.
    """
    q = validate_q(q)
    tn, ti, tj = half(n).twice, half(i).twice, half(j).twice
    nv = tn / 2.0
    qn = lambda t: q_number(HalfInt(t), q)
    pref = q ** ((ti / 2.0 + tj / 2.0 - 0.5) / 2.0) * _sqrt0(qn(tn + ti + 2))
    uu = _sqrt0(qn(tn - tj + 3)) / qn(2 * tn + 4)
    du = -q ** (-nv - 1) * _sqrt0(qn(tn + tj + 1)) / (qn(2 * tn + 2) * qn(2 * tn + 4))
    dd = q ** (-0.5) * _sqrt0(qn(tn - tj + 1)) / qn(2 * tn + 2)
    return pref * np.array([[uu, 0.0], [du, dd]])


def b_minus(n, i, j, q: float) -> np.ndarray:
    """2x2 coefficient matrix b-_{nij}.

        q^{(i+j-1/2)/2} [n-i]^{1/2} *
            [ -q^{-1/2} [n+j+1/2]^{1/2} / [2n+1]   -q^{n} [n-j+1/2]^{1/2} / ([2n][2n+1]) ]
            [ 0                                     -[n+j-1/2]^{1/2} / [2n]              ]

    Zero matrix at i = n, as for a-.
    """
    q = validate_q(q)
    tn, ti, tj = half(n).twice, half(i).twice, half(j).twice
    nv = tn / 2.0
    qn = lambda t: q_number(HalfInt(t), q)
    pref = q ** ((ti / 2.0 + tj / 2.0 - 0.5) / 2.0) * _sqrt0(qn(tn - ti))
    if pref == 0.0:
        return np.zeros((2, 2))
    uu = -q ** (-0.5) * _sqrt0(qn(tn + tj + 1)) / qn(2 * tn + 2)
    ud = -q ** nv * _sqrt0(qn(tn - tj + 1)) / (qn(2 * tn) * qn(2 * tn + 2))
    dd = -_sqrt0(qn(tn + tj - 1)) / qn(2 * tn)
    return pref * np.array([[uu, ud], [0.0, dd]])


def valid_v_label(n, i, j) -> bool:
    """Whether (n, i, j) is a valid spinor-pair label: i in {-n..n},
    j in {-n-1/2..n+1/2} (integer steps in both)."""
    tn, ti, tj = half(n).twice, half(i).twice, half(j).twice
    if tn < 0:
        return False
    if abs(ti) > tn or (ti - tn) % 2 != 0:
        return False
    if abs(tj) > tn + 1 or (tj - tn - 1) % 2 != 0:
        return False
    return True


def tilde_coeffs(kind: str, sign: int, n, i, j, q: float) -> np.ndarray:
    """Hermitian conjugates of the displayed matrices:

        ta+-_{nij} = (a-+_{n +- 1/2, i-1/2, j-1/2})*
        tb+-_{nij} = (b-+_{n +- 1/2, i-1/2, j+1/2})*

    (real entries, so conjugate-transpose = transpose).  A referenced label
    outside the valid range yields the zero matrix.
    """
    if kind not in ("a", "b") or sign not in (+1, -1):
        raise ValueError(f"tilde_coeffs: bad kind/sign {kind!r}/{sign!r}")
    tn, ti, tj = half(n).twice, half(i).twice, half(j).twice
    if kind == "a":
        ref = (tn + sign, ti - 1, tj - 1)
        base = a_minus if sign > 0 else a_plus
    else:
        ref = (tn + sign, ti - 1, tj + 1)
        base = b_minus if sign > 0 else b_plus
    if not valid_v_label(HalfInt(ref[0]), HalfInt(ref[1]), HalfInt(ref[2])):
        return np.zeros((2, 2))
    return base(HalfInt(ref[0]), HalfInt(ref[1]), HalfInt(ref[2]), q).T.copy()


_MOVES = {
    # gen: (matrix pair at +1/2 and -1/2, (di, dj) target shift, overall sign)
    "alpha*": ((lambda n, i, j, q: a_plus(n, i, j, q),
                lambda n, i, j, q: a_minus(n, i, j, q)), (+1, +1), +1.0),
    "beta": ((lambda n, i, j, q: b_plus(n, i, j, q),
              lambda n, i, j, q: b_minus(n, i, j, q)), (+1, -1), -1.0),
    "alpha": ((lambda n, i, j, q: tilde_coeffs("a", +1, n, i, j, q),
               lambda n, i, j, q: tilde_coeffs("a", -1, n, i, j, q)), (-1, -1), +1.0),
    "beta*": ((lambda n, i, j, q: tilde_coeffs("b", +1, n, i, j, q),
               lambda n, i, j, q: tilde_coeffs("b", -1, n, i, j, q)), (-1, +1), -1.0),
}


def pi_prime(gen: str, space: TruncatedSpace, q: float) -> SparseOp:
    """One generator of the spinorial representation on a Double space.

    Band structure: level n is connected to levels n +- 1/2 only.  Rows that
    would target d^n_{i, +-(n+1/2)} never appear (those labels are not in the
    basis).  pi_prime('alpha') is the exact adjoint of pi_prime('alpha*'),
    and likewise for beta; all five defining relations hold on interior
    vectors at machine precision.
    """
    q = validate_q(q)
    if space.kind != "Double":
        raise ValueError(f"expected a Double space, got kind {space.kind!r}")
    if gen not in _MOVES:
        raise ValueError(f"unknown generator {gen!r}")
    (mat_up, mat_dn), (di, dj), sgn = _MOVES[gen]
    rows, cols, vals = [], [], []
    for col, lab in enumerate(space.basis):
        sb = _BAND[lab.band]
        tn, ti, tj = lab.n.twice, lab.i.twice, lab.j.twice
        for mat_fn, dn in ((mat_up, +1), (mat_dn, -1)):
            M = mat_fn(lab.n, lab.i, lab.j, q)
            rn, ri, rj = tn + dn, ti + di, tj + dj
            for tb in (0, 1):
                c = sgn * M[tb, sb]
                if c == 0.0:
                    continue
                tgt = DoubleIndex(_BAND_NAME[tb], HalfInt(rn), HalfInt(ri),
                                  HalfInt(rj))
                row = space.lookup.get(tgt)
                if row is not None:
                    rows.append(row)
                    cols.append(col)
                    vals.append(c)
    return SparseOp.from_coo(space, space, rows, cols, vals)


def pi_prime_generators(space: TruncatedSpace, q: float) -> dict:
    return {g: pi_prime(g, space, q) for g in ("alpha", "alpha*", "beta", "beta*")}


def dirac_D(space: TruncatedSpace) -> SparseOp:
    """The isospectral Dirac operator: u^n -> (2n+1) u^n, d^n -> -2n d^n.

    Integer eigenvalues; positive exactly on the up band.
    """
    if space.kind != "Double":
        raise ValueError(f"expected a Double space, got kind {space.kind!r}")
    diag = [float(lab.n.twice + 1) if lab.band == "up" else float(-lab.n.twice)
            for lab in space.basis]
    return SparseOp.diagonal(space, diag)
