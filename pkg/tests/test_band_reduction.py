"""Band storage, band Jacobi form and lower band form."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spiked_edge.algebra import (
    ConfigurationError,
    DomainError,
    SelfAdjointMatrix,
    block_size,
    embed,
    quaternion_structure_defect,
)
from spiked_edge.band_reduction import (
    band_jacobi_form,
    lower_band_form,
    lower_band_shape,
    perturbation_commutes,
)
from spiked_edge.banded import BandedHermitian

BETAS = (1, 2, 4)


def random_self_adjoint(seed: int, beta: int, n: int) -> SelfAdjointMatrix:
    rng = np.random.default_rng(seed)
    x = embed(rng.standard_normal((n, n, beta)), beta)
    return SelfAdjointMatrix(beta, x + x.conj().T)


def random_data(seed: int, beta: int, p: int, n: int) -> np.ndarray:
    return embed(np.random.default_rng(seed).standard_normal((p, n, beta)), beta)


# -- band storage -----------------------------------------------------------


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("r", [1, 2, 3])
def test_banded_dense_roundtrip(beta, r):
    rng = np.random.default_rng(r)
    n = 6
    subs = [np.concatenate([rng.standard_normal((n, 1)), np.zeros((n, beta - 1))], axis=1)]
    subs += [rng.standard_normal((n - k, beta)) for k in range(1, r + 1)]
    B = BandedHermitian.from_subdiagonals(beta, subs)
    dense = B.dense()
    assert np.allclose(dense, dense.conj().T)
    if beta == 4:
        assert quaternion_structure_defect(dense) == 0.0
    again = BandedHermitian.from_dense(beta, dense, r)
    assert np.array_equal(again.ab, B.ab)
    for k in range(r + 1):
        assert np.allclose(B.subdiagonal(k), subs[k])


def test_banded_rejects_wide_matrix():
    A = random_self_adjoint(0, 1, 5)
    with pytest.raises(DomainError):
        BandedHermitian.from_self_adjoint(A, 1)


@pytest.mark.parametrize("beta", BETAS)
def test_gershgorin_encloses_spectrum(beta):
    B = band_jacobi_form(random_self_adjoint(3, beta, 8), 2).B
    lo, hi = B.gershgorin()
    ev = np.linalg.eigvalsh(B.dense())
    assert lo <= ev.min() and ev.max() <= hi
    assert np.abs(ev).max() <= B.norm_bound() + 1e-12


# -- band Jacobi form -------------------------------------------------------


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("n,r", [(1, 1), (2, 1), (5, 1), (7, 2), (9, 3), (4, 4)])
def test_band_jacobi_form_contract(beta, n, r):
    A = random_self_adjoint(100 * n + r + beta, beta, n)
    res = band_jacobi_form(A, r)
    d = block_size(beta)
    B, U = res.B.dense(), res.U
    assert np.allclose(U @ A.data @ U.conj().T, B, atol=1e-11 * max(1.0, A.norm()))
    assert np.allclose(U.conj().T @ U, np.eye(n * d), atol=1e-12)
    # U = I_r (+) U~
    k = min(r, n) * d
    assert np.allclose(U[:k, :k], np.eye(k))
    assert np.allclose(U[:k, k:], 0.0) and np.allclose(U[k:, :k], 0.0)
    ev_a = np.linalg.eigvalsh(A.data)
    assert np.allclose(np.linalg.eigvalsh(B), ev_a, atol=1e-11 * max(1.0, np.abs(ev_a).max()))
    outer = res.B.outer_diagonal()
    assert np.all(outer >= 0)
    assert np.allclose(res.B.subdiagonal(r)[:, 1:], 0.0, atol=1e-13)
    assert res.uniqueness_flag


def test_band_jacobi_tridiagonal_example():
    # already tridiagonal with a negative off-diagonal: only signs change
    a = np.array([[2.0, -1.0, 0.0], [-1.0, 3.0, 0.5], [0.0, 0.5, 1.0]])
    res = band_jacobi_form(SelfAdjointMatrix(1, a), 1)
    assert np.allclose(res.B.dense(), [[2.0, 1.0, 0.0], [1.0, 3.0, 0.5], [0.0, 0.5, 1.0]])
    assert np.allclose(np.abs(res.U), np.eye(3))


def test_band_jacobi_flags_zero_outer_entry():
    a = np.diag([1.0, 2.0, 3.0, 4.0])
    res = band_jacobi_form(SelfAdjointMatrix(1, a), 1)
    assert not res.uniqueness_flag
    assert np.allclose(res.B.dense(), a)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(BETAS), st.integers(1, 3), st.integers(0, 6), st.integers(0, 2**31 - 1))
def test_perturbation_commutes(beta, r, extra, seed):
    n = r + extra
    if n < 1:
        return
    A = random_self_adjoint(seed, beta, n)
    P = random_self_adjoint(seed + 1, beta, r)
    assert perturbation_commutes(A, P, r) <= 1e-10 * max(1.0, A.norm())


# -- lower band form --------------------------------------------------------


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("p,n,r", [(8, 5, 1), (5, 8, 2), (6, 6, 3), (9, 3, 2), (3, 3, 1)])
def test_lower_band_form_contract(beta, p, n, r):
    X = random_data(p * 17 + n + r + beta, beta, p, n)
    res = lower_band_form(X, beta, r)
    d = block_size(beta)
    L, U, V = res.L, res.U, res.V
    assert np.allclose(V @ X @ U, L, atol=1e-11 * np.linalg.norm(X, 2))
    assert np.allclose(U.conj().T @ U, np.eye(n * d), atol=1e-12)
    assert np.allclose(V.conj().T @ V, np.eye(p * d), atol=1e-12)
    # V = I_r (+) V~
    k = min(r, p) * d
    assert np.allclose(V[:k, :k], np.eye(k))
    # zero above the diagonal and below the r-th subdiagonal
    for i in range(p):
        for j in range(n):
            if j > i or i - j > r:
                assert np.allclose(L[i * d : (i + 1) * d, j * d : (j + 1) * d], 0.0, atol=1e-12)
    rows, cols = lower_band_shape(n, p, r)
    assert np.allclose(L[rows * d :], 0.0, atol=1e-12)
    # L^dagger L is X^dagger X conjugated by U and is banded
    S = L.conj().T @ L
    assert np.allclose(S, U.conj().T @ X.conj().T @ X @ U, atol=1e-10 * np.linalg.norm(X, 2) ** 2)
    BandedHermitian.from_dense(beta, S, r)
    assert res.uniqueness_flag


def test_lower_band_form_invalid_rank():
    with pytest.raises(ConfigurationError):
        lower_band_form(random_data(0, 1, 3, 3), 1, 4)


# -- listed examples ----------------------------------------------------------


def test_band_jacobi_already_in_form():
    a = np.array([[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]])
    res = band_jacobi_form(SelfAdjointMatrix(1, a), 1)
    assert np.array_equal(res.B.dense(), a)
    assert np.array_equal(res.U, np.eye(3))


def test_band_jacobi_hand_householder():
    a = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    res = band_jacobi_form(SelfAdjointMatrix(1, a), 1)
    assert np.allclose(res.B.dense(), [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]], atol=1e-15)
    assert np.allclose(res.U, [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]], atol=1e-15)
    assert not res.uniqueness_flag


def test_band_jacobi_krylov_oracle():
    # column j + 1 of U^dagger spans the new direction of the Krylov space of e_1 (r = 1)
    A = random_self_adjoint(41, 1, 7)
    res = band_jacobi_form(A, 1)
    K = np.empty((7, 7))
    v = np.eye(7)[:, 0]
    for j in range(7):
        K[:, j] = v
        v = A.data @ v
    Q, R = np.linalg.qr(K)
    Q = Q * np.sign(np.diag(R))
    assert np.allclose(res.U.T, Q, atol=1e-8)


@pytest.mark.parametrize("beta", BETAS)
def test_band_jacobi_full_bandwidth_is_identity(beta):
    A = random_self_adjoint(42, beta, 4)
    res = band_jacobi_form(A, 4)
    assert np.array_equal(res.B.dense(), A.data)
    assert np.array_equal(res.U, np.eye(A.data.shape[0]))


@pytest.mark.parametrize("beta,n,r", [(1, 12, 2), (2, 15, 3), (4, 9, 2)])
def test_perturbation_commutes_examples(beta, n, r):
    A = random_self_adjoint(43 + n, beta, n)
    assert perturbation_commutes(A, None, r) == 0.0
    assert perturbation_commutes(A, random_self_adjoint(44, beta, r), r) <= 1e-10


def test_lower_band_form_fixed_point():
    X = np.array([[2.0, 0.0, 0.0], [1.0, 3.0, 0.0], [0.0, 0.5, 1.5], [0.0, 0.0, 0.7], [0.0, 0.0, 0.0]])
    res = lower_band_form(X, 1, 1)
    assert np.allclose(res.L, X, atol=1e-15)
    assert np.allclose(res.U, np.eye(3)) and np.allclose(res.V, np.eye(5))


def test_lower_band_form_singular_values():
    X = random_data(45, 1, 5, 4)
    L = lower_band_form(X, 1, 1).L
    assert np.allclose(np.linalg.svd(L, compute_uv=False), np.linalg.svd(X, compute_uv=False), atol=1e-10)


@pytest.mark.parametrize("beta", BETAS)
def test_lower_band_spike_lives_in_corner(beta):
    r, p, n = 2, 9, 6
    d = block_size(beta)
    L = lower_band_form(random_data(46, beta, p, n), beta, r).L
    sig = np.eye(p * d, dtype=L.dtype)
    sig[: r * d, : r * d] = random_self_adjoint(47, beta, r).data + 3 * np.eye(r * d)
    diff = L.conj().T @ sig @ L - L.conj().T @ L
    mask = np.ones_like(diff, dtype=bool)
    mask[: r * d, : r * d] = False
    assert np.abs(diff[mask]).max() < 1e-12
    assert np.abs(diff[~mask]).max() > 0.1


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("r", [1, 2, 3])
def test_band_jacobi_idempotent(beta, r):
    B = band_jacobi_form(random_self_adjoint(48 + r, beta, 9), r).B
    again = band_jacobi_form(SelfAdjointMatrix(beta, B.dense()), r)
    assert np.allclose(again.B.dense(), B.dense(), atol=1e-12)
    assert np.allclose(again.U, np.eye(again.U.shape[0]), atol=1e-12)
