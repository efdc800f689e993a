"""Banded inertia counts, bisection eigenvalues and edge scaling."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spiked_edge.algebra import ConfigurationError, DomainError, Rng, block_size
from spiked_edge.band_reduction import band_jacobi_form
from spiked_edge.edge_solver import (
    assemble_gaussian_edge,
    assemble_wishart_edge,
    count_below,
    dense_count_below,
    eigenvector_step_function,
    gaussian_P_from_w,
    m_gaussian,
    m_wishart,
    sample_gaussian_edge,
    sample_wishart_edge,
    smallest_eigs_banded,
    wishart_Sigma_from_w,
)
from spiked_edge.ensembles import SpikeConfig, sample_gaussian_band, sample_spiked_S

BETAS = (1, 2, 4)


def true_eigs(H):
    ev = np.linalg.eigvalsh(H.dense())
    return ev[:: block_size(H.beta)]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(BETAS), st.integers(1, 3), st.integers(4, 30), st.integers(0, 2**31 - 1),
       st.floats(-10, 10))
def test_count_below_matches_dense(beta, r, n, seed, sigma):
    G = sample_gaussian_band(Rng(seed), beta, n, r)
    assert count_below(G, sigma) == dense_count_below(G, sigma)


@pytest.mark.parametrize("beta", BETAS)
def test_count_below_at_an_eigenvalue(beta):
    # strict inequality: a shift sitting on an eigenvalue does not count it
    G = sample_gaussian_band(Rng(4), beta, 12, 2)
    ev = true_eigs(G)
    assert count_below(G, ev[3] + 1e-9) == 4
    assert count_below(G, ev[3] - 1e-9) == 3


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("r", [1, 2, 3])
def test_smallest_eigs_and_vectors(beta, r):
    G = sample_gaussian_band(Rng(beta * 10 + r), beta, 40, r)
    k = 4
    lam, vecs = smallest_eigs_banded(G, k, vectors=True)
    ev = true_eigs(G)
    assert np.allclose(lam, ev[:k], atol=1e-10 * max(1.0, np.abs(ev).max()))
    d = block_size(beta)
    A = G.dense()
    for j in range(k):
        blk = vecs[:, j * d : (j + 1) * d]
        assert np.linalg.norm(A @ blk - lam[j] * blk) < 1e-8 * max(1.0, np.abs(ev).max())


def test_smallest_eigs_rejects_bad_k():
    G = sample_gaussian_band(Rng(0), 1, 5, 1)
    with pytest.raises(ConfigurationError):
        smallest_eigs_banded(G, 6)


def test_grid_factors():
    assert m_gaussian(1000) == pytest.approx(10.0)
    # n = p: m = (n / (2 sqrt n))^{2/3} = (sqrt(n)/2)^{2/3}
    assert m_wishart(400, 400) == pytest.approx(10.0 ** (2 / 3))
    assert gaussian_P_from_w([0.0, 1.0, math.inf], 1000).tolist() == pytest.approx([1.0, 0.9, 0.0])


def test_wishart_spike_map():
    n, p = 400, 1600
    m = m_wishart(n, p)
    sig = wishart_Sigma_from_w([0.0, m, math.inf], n, p)
    assert sig.tolist() == pytest.approx([1 + math.sqrt(p / n), 1.0, 1.0])
    with pytest.raises(DomainError):
        wishart_Sigma_from_w([5 * m], n, p)


@pytest.mark.parametrize("beta", BETAS)
def test_gaussian_scaling_identity(beta):
    n, r = 30, 2
    P = gaussian_P_from_w([0.0, 1.0], n)
    G = sample_gaussian_band(Rng(8), beta, n, r, P)
    prob = assemble_gaussian_edge(G, n, r, P)
    raw = true_eigs(G)[::-1][:3]
    assert np.allclose(prob.scaled_eigenvalues(3), prob.scale * (raw - prob.center), atol=1e-9)
    assert np.allclose(np.diag(prob.W_n)[:: block_size(beta)], [0.0, 1.0], atol=1e-12)


@pytest.mark.parametrize("beta", BETAS)
def test_wishart_scaling_identity(beta):
    n, p, r = 20, 35, 1
    sig = wishart_Sigma_from_w([0.5], n, p)
    S = sample_spiked_S(Rng(9), beta, n, p, r, sig)
    prob = assemble_wishart_edge(S, n, p, r, sig)
    raw = true_eigs(S)[::-1][:2]
    assert np.allclose(prob.scaled_eigenvalues(2), prob.scale * (raw - prob.center), atol=1e-9)
    assert np.diag(prob.W_n)[0].real == pytest.approx(0.5)


def test_gaussian_edge_matches_dense_reduction():
    # the band sampler and a reduced dense matrix give the same kind of object
    from spiked_edge.ensembles import sample_dense_reference

    n, r = 25, 2
    A = sample_dense_reference(Rng(1), 2, "gaussian", n, [0.5, 0.0])
    B = band_jacobi_form(A, r).B
    ev = np.linalg.eigvalsh(A.data)
    assert smallest_eigs_banded(B, 3) == pytest.approx(ev[:3], abs=1e-9)


@pytest.mark.parametrize("beta", BETAS)
def test_edge_samplers_reproducible(beta):
    s = SpikeConfig((0.0, math.inf))
    a = sample_gaussian_edge(Rng(5, 2), beta, 50, s, k=2)
    b = sample_gaussian_edge(Rng(5, 2), beta, 50, s, k=2)
    assert np.array_equal(a, b) and a[0] >= a[1]
    c = sample_wishart_edge(Rng(5, 2), beta, 30, 60, SpikeConfig((0.0,)), k=2)
    assert np.isfinite(c).all() and c[0] >= c[1]


@pytest.mark.parametrize("beta", BETAS)
def test_eigenvector_step_function(beta):
    G = sample_gaussian_band(Rng(6), beta, 12, 3)
    _, vecs = smallest_eigs_banded(G, 1, vectors=True)
    d = block_size(beta)
    x, values = eigenvector_step_function(vecs[:, :d], 2.0, beta, 3)
    assert values.shape == (4, 3, beta)
    assert np.allclose(x, [0.0, 0.5, 1.0, 1.5])
    assert np.sum(values**2) == pytest.approx(1.0)


# -- listed examples ----------------------------------------------------------


def test_scaled_gaussian_center_is_zero():
    n = 16
    from spiked_edge.banded import BandedHermitian

    G = BandedHermitian.from_subdiagonals(1, [np.full((n, 1), 2 * math.sqrt(n)), np.zeros((n - 1, 1))])
    assert np.allclose(assemble_gaussian_edge(G, n, 1).H.dense(), 0.0)


@pytest.mark.parametrize("beta", BETAS)
def test_scaled_gaussian_mean_mode_entries(beta):
    from spiked_edge.algebra import MeanRng, chi_mean

    n = 8
    m = m_gaussian(n)
    H = assemble_gaussian_edge(sample_gaussian_band(MeanRng(), beta, n, 1), n, 1).H
    assert np.allclose(H.subdiagonal(0)[:, 0], 2 * m * m)
    i = np.arange(1, n)
    expected = -(m * m / math.sqrt(n)) * chi_mean((n - i) * beta) / math.sqrt(beta)
    assert np.allclose(H.subdiagonal(1)[:, 0], expected)


def test_scaled_wishart_center_is_zero():
    from spiked_edge.banded import BandedHermitian

    n, p = 10, 30
    S = BandedHermitian.from_subdiagonals(1, [np.full((n, 1), (math.sqrt(n) + math.sqrt(p)) ** 2),
                                              np.zeros((n - 1, 1))])
    assert np.allclose(assemble_wishart_edge(S, n, p, 1).H.dense(), 0.0)


@pytest.mark.parametrize("n,p,expected", [(100, 400, (200 / 30) ** (2 / 3)), (10_000, 100, (1000 / 110) ** (2 / 3))])
def test_wishart_grid_factor_examples(n, p, expected):
    m = m_wishart(n, p)
    assert m == pytest.approx(expected, rel=1e-14)
    small = min(n, p)
    assert (small / 4) ** (1 / 3) <= m <= small ** (1 / 3)


def test_smallest_eigs_diagonal():
    from spiked_edge.banded import BandedHermitian

    H = BandedHermitian.from_subdiagonals(1, [np.array([[3.0], [1.0], [2.0]]), np.zeros((2, 1))])
    assert np.allclose(smallest_eigs_banded(H, 3), [1.0, 2.0, 3.0], atol=1e-12)


def test_smallest_eig_discrete_laplacian():
    from spiked_edge.banded import BandedHermitian

    n = 100
    H = BandedHermitian.from_subdiagonals(1, [np.full((n, 1), 2.0), np.full((n - 1, 1), -1.0)])
    assert abs(smallest_eigs_banded(H, 1)[0] - (2 - 2 * math.cos(math.pi / (n + 1)))) <= 1e-10


@pytest.mark.parametrize("beta", BETAS)
def test_smallest_eigs_random_band_300(beta):
    G = sample_gaussian_band(Rng(71, beta), beta, 300, 2)
    k = 5
    assert np.allclose(smallest_eigs_banded(G, k), true_eigs(G)[:k], atol=1e-8)


@pytest.mark.parametrize("beta", BETAS)
def test_top_eigenvalue_monotone_in_spike(beta):
    # common randomness and P~ increasing in matrix order
    n, r = 40, 2
    ladder = [np.array([-0.5, -0.5]), np.array([0.0, -0.5]), np.array([0.5, 0.2]), np.array([1.5, 0.2])]
    for rep in range(100):
        tops = [true_eigs(sample_gaussian_band(Rng(72, rep), beta, n, r, P).affine(0.0, -1.0))[0] for P in ladder]
        assert np.all(np.diff(-np.array(tops)) >= -1e-10)
