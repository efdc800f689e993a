"""Canonical band forms relative to a fixed r-dimensional subspace.

:func:`band_jacobi_form` brings a self-adjoint matrix to a (2r+1)-diagonal
form ``B = U A U^dagger`` with ``U = I_r (+) U~`` and nonnegative outermost
diagonals, by a sequence of Householder steps.  :func:`lower_band_form` is the
singular-value analogue for a p x n data matrix, alternating column and row
reflections so that ``L = V X U`` is lower banded with ``V = I_r (+) V~``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    ConfigurationError,
    SelfAdjointMatrix,
    block_size,
    coerce_self_adjoint,
    identity,
    pad_top_left,
    real_dtype,
    reflector,
)
from .banded import BandedHermitian

ZERO_PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class BandJacobiResult:
    """``B = U A U^dagger`` in band Jacobi form.

    Attributes
    ----------
    B : BandedHermitian
        Band form of bandwidth r.
    U : ndarray
        Embedded unitary of the form ``I_r (+) U~``.
    uniqueness_flag : bool
        True when every outer-diagonal entry is strictly positive, in which
        case the form is unique.
    """

    B: BandedHermitian
    U: np.ndarray
    uniqueness_flag: bool


@dataclass(frozen=True)
class LowerBandResult:
    """``L = V X U`` in lower band form (embedded arrays)."""

    L: np.ndarray
    U: np.ndarray
    V: np.ndarray
    uniqueness_flag: bool
    r: int
    beta: int


def _matrix_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def band_jacobi_form(A: SelfAdjointMatrix, r: int) -> BandJacobiResult:
    """Reduce ``A`` to band Jacobi form of bandwidth ``r``.

    Step k reflects rows/columns ``r+k, ..., n-1`` so that column k has a
    single nonnegative entry below the band.  A pivot vector of norm below
    ``1e-12 |A|`` is left alone (``U~ = I`` for that step) and the result is
    flagged as non-unique.
    """
    n = A.n
    if not 1 <= r <= max(n, 1):
        raise ConfigurationError(f"need 1 <= r <= n, got r={r}, n={n}")
    beta = A.beta
    d = block_size(beta)
    a = np.array(A.data, dtype=real_dtype(beta))
    u = identity(n, beta)
    tol = ZERO_PIVOT_RTOL * _matrix_norm(a)
    unique = True
    for k in range(max(n - r, 0)):
        lo = (r + k) * d
        col = slice(k * d, (k + 1) * d)
        v = a[lo:, col] if beta == 4 else a[lo:, k]
        ref = reflector(v, beta, tol)
        if ref is None:
            unique = False
            continue
        # rows below the band are already zero left of column k
        c0 = k * d
        a[lo:, c0:] = ref.apply_left(a[lo:, c0:])
        a[c0:, lo:] = ref.apply_left(a[c0:, lo:].conj().T).conj().T
        u[lo:, r * d :] = ref.apply_left(u[lo:, r * d :])
        # the pivot is |v| by construction; clean the roundoff below it
        a[lo + d :, col] = 0.0
        a[col, lo + d :] = 0.0
        if not np.real(a[lo, k * d]) > tol:
            unique = False
    a = 0.5 * (a + a.conj().T)
    B = BandedHermitian.from_dense(beta, a, r, tol=10.0 * tol + 1e-300)
    if n - r <= 0:
        unique = True
    return BandJacobiResult(B, u, unique)


def perturbation_commutes(A: SelfAdjointMatrix, P_tilde, r: int) -> float:
    """Max entrywise deviation between ``band(A + P~ (+) 0)`` and ``band(A) + P~ (+) 0``.

    The transforms ``U`` of both reductions are compared as well; the returned
    value is the larger of the two deviations.
    """
    p = coerce_self_adjoint(A.beta, P_tilde, r)
    base = band_jacobi_form(A, r)
    pert = band_jacobi_form(A + SelfAdjointMatrix(A.beta, pad_top_left(p, A.n, A.beta)), r)
    expected = base.B.add_top_left(p)
    dev_b = float(np.abs(pert.B.ab - expected.ab).max(initial=0.0))
    dev_u = float(np.abs(pert.U - base.U).max(initial=0.0))
    return max(dev_b, dev_u)


def _reflect_rows(mat: np.ndarray, lo: int, ref) -> None:
    mat[lo:, :] = ref.apply_left(mat[lo:, :])


def _reflect_cols(mat: np.ndarray, lo: int, ref) -> None:
    # right multiplication by ref^dagger
    mat[:, lo:] = ref.apply_left(mat[:, lo:].conj().T).conj().T


def lower_band_form(X: np.ndarray, beta: int, r: int) -> LowerBandResult:
    """Lower band form ``L = V X U`` of an embedded p x n data matrix.

    Alternately, row t is rotated onto the positive first coordinate of
    columns t..n-1 (right factor ``U``) and column t is rotated onto the
    positive first coordinate of rows r+t..p-1 (left factor ``V``).  The
    result is zero off the main and first r subdiagonals.
    """
    d = block_size(beta)
    x = np.array(X, dtype=real_dtype(beta))
    p, n = x.shape[0] // d, x.shape[1] // d
    if not 1 <= r <= min(n, p):
        raise ConfigurationError(f"need 1 <= r <= min(n, p), got r={r}, n={n}, p={p}")
    tol = ZERO_PIVOT_RTOL * _matrix_norm(x)
    u = identity(n, beta)
    v = identity(p, beta)
    unique = True
    for t in range(max(n, p)):
        if t < n and t < p:
            row = x[t * d : (t + 1) * d, t * d :]
            vec = row.conj().T if beta == 4 else np.conj(row[0])
            ref = reflector(vec, beta, tol)
            if ref is None:
                unique = False
            else:
                _reflect_cols(x, t * d, ref)
                _reflect_cols(u, t * d, ref)
                x[t * d : (t + 1) * d, (t + 1) * d :] = 0.0
        if t < n and r + t < p:
            lo = (r + t) * d
            col = x[lo:, t * d : (t + 1) * d] if beta == 4 else x[lo:, t]
            ref = reflector(col, beta, tol)
            if ref is None:
                unique = False
            else:
                _reflect_rows(x, lo, ref)
                _reflect_rows(v, lo, ref)
                x[lo + d :, t * d : (t + 1) * d] = 0.0
    return LowerBandResult(x, u, v, unique, r, beta)


def lower_band_shape(n: int, p: int, r: int) -> tuple[int, int]:
    """Rows and columns of the nonzero part of a lower band form."""
    return min(n + r, p), min(n, p)
