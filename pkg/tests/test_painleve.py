"""Hastings-McLeod tableau, Lax pair and the rank-r determinant formula."""

from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.special

from spiked_edge.algebra import DomainError
from spiked_edge.painleve import (
    baik_F2,
    default_tableau,
    lax_x_transport,
    lax_fg,
    left_asymptotic,
    make_F2,
    pde_residual,
    tracy_widom_F1,
    tracy_widom_F2,
)


@pytest.fixture(scope="module")
def tab():
    return default_tableau()


@pytest.fixture(scope="module")
def F2(tab):
    return make_F2(tab)


def moments(x, F):
    dF = np.gradient(F, x)
    mean = np.trapezoid(x * dF, x)
    return mean, np.trapezoid(x * x * dF, x) - mean * mean


# -- the Hastings-McLeod solution --------------------------------------------


def test_tableau_residuals(tab):
    assert np.abs(tab.ode_residual()).max() < 1e-8
    assert np.abs(tab.identity_residual()).max() < 1e-8


def test_right_tail_is_airy(tab):
    assert tab.at("u", 5.0) / scipy.special.airy(5.0)[0] == pytest.approx(1.0, abs=1e-6)


def test_left_tail_asymptotics(tab):
    x = -10.0
    assert tab.at("u", x) == pytest.approx(math.sqrt(-x / 2) * (1 + 1 / (8 * x**3)), abs=1e-5)
    assert tab.at("u", -12.0) == pytest.approx(float(left_asymptotic(-12.0)), abs=1e-9)


def test_interpolation_between_nodes(tab):
    x = np.array([-3.1234567, 0.4444444, 2.7182818])
    u = tab.at("u", x)
    up = tab.at("up", x)
    # Hermite interpolation of (u, u') should satisfy the identity to high order
    v = tab.at("v", x)
    assert np.abs(v + u**4 - up**2 + x * u**2).max() < 1e-8


def test_out_of_range_raises(tab):
    with pytest.raises(DomainError):
        tab.at("u", 9.0)


# -- Tracy-Widom laws -----------------------------------------------------------


def test_tracy_widom_2_frozen_values(tab):
    assert float(tracy_widom_F2(-2.0)) == pytest.approx(0.413224, abs=1e-6)
    mean, var = moments(tab.x, tab.F)
    assert mean == pytest.approx(-1.7710868, abs=1e-6)
    assert var == pytest.approx(0.8131948, abs=1e-5)


def test_tracy_widom_1_frozen_values(tab):
    mean, var = moments(tab.x, np.sqrt(tab.F * tab.E))
    assert mean == pytest.approx(-1.2065336, abs=1e-6)
    assert var == pytest.approx(1.6077810, abs=1e-5)
    assert float(tracy_widom_F1(0.0)) ** 2 == pytest.approx(float(tab.at("F", 0.0) * tab.at("E", 0.0)))


# -- the spiked laws ------------------------------------------------------------


def test_dirichlet_entries_reduce_rank(F2, tab):
    assert F2(-1.0, [math.inf]) == pytest.approx(float(tab.at("F", -1.0)), abs=0)
    assert F2(-1.0, [0.5, math.inf]) == F2(-1.0, [0.5])


def test_neumann_rank_one_boundary_value(F2, tab):
    # the w-equation starts from f = g = E at w = 0
    x = -1.5
    assert F2(x, [0.0]) == pytest.approx(float(tab.at("F", x) * tab.at("E", x)), rel=1e-12)


@pytest.mark.parametrize("x", [-3.0, -1.0, 0.5])
def test_monotone_in_w_and_bounded(F2, x):
    ws = [-2.0, -1.0, 0.0, 1.0, 3.0]
    vals = [F2(x, [w]) for w in ws]
    assert np.all(np.diff(vals) > 0)
    assert 0 < vals[0] and vals[-1] < float(tracy_widom_F2(x))
    pairs = [F2(x, [a, 1.0]) for a in (-1.0, 0.0, 0.5)]
    assert np.all(np.diff(pairs) > 0)


def test_monotone_in_x(F2):
    xs = np.linspace(-4, 2, 13)
    vals = [F2(x, [-0.5, 0.5]) for x in xs]
    assert np.all(np.diff(vals) > 0)


def test_symmetric_in_w(tab):
    a = baik_F2(tab, None, -1.0, [-0.7, 0.4])
    b = baik_F2(tab, None, -1.0, [0.4, -0.7])
    assert a == pytest.approx(b, rel=1e-12)


def test_coincident_w_frozen(F2):
    assert F2(-1.0, [0.0, 0.0]) == pytest.approx(0.0851573, abs=1e-6)
    # continuous across the confluent split
    near = F2(-1.0, [0.0, 0.02])
    far = F2(-1.0, [0.0, 0.04])
    assert F2(-1.0, [0.0, 0.0]) < near < far


def test_baik_guards(tab):
    with pytest.raises(DomainError):
        baik_F2(tab, None, 0.0, [0.1, 0.1 + 1e-6])
    with pytest.raises(DomainError):
        baik_F2(tab, None, 0.0, [math.inf])


@pytest.mark.parametrize("x,w", [(-1.0, [0.3]), (0.5, [-1.0]), (-1.0, [-0.5, 0.7]), (-2.0, [0.2, 1.5])])
def test_pde_residual_vanishes(F2, x, w):
    assert abs(pde_residual(F2, x, w)) < 1e-5


def test_lax_pair_x_transport(tab):
    w = 0.8
    f0, g0 = lax_fg(tab, 0.0, [w])
    fg = lax_x_transport(tab, w, 0.0, -2.0, np.array([f0[0], g0[0]]))
    f1, g1 = lax_fg(tab, -2.0, [w])
    assert fg == pytest.approx([f1[0], g1[0]], rel=1e-8)


# -- listed examples ----------------------------------------------------------


def test_left_value_at_minus_eight(tab):
    assert tab.at("u", -8.0) == pytest.approx(2.0, rel=1e-2)


@pytest.mark.parametrize("x", [-4.0, -1.0, 0.0, 2.0])
def test_w_zero_gives_E(tab, x):
    f, g = lax_fg(tab, x, [0.0])
    assert f[0] == pytest.approx(float(tab.at("E", x)), rel=1e-12)
    assert g[0] == pytest.approx(float(tab.at("E", x)), rel=1e-12)


def test_path_independence_to_zero_one(tab):
    # w first then x, against x first (at w = 0) then w
    f_direct, g_direct = lax_fg(tab, 0.0, [1.0])
    f0, g0 = lax_fg(tab, -2.0, [1.0])
    via_x = lax_x_transport(tab, 1.0, -2.0, 0.0, np.array([f0[0], g0[0]]))
    assert abs(via_x[0] - f_direct[0]) <= 1e-6 and abs(via_x[1] - g_direct[0]) <= 1e-6


def test_large_w_is_finite_and_positive(tab):
    f, g = lax_fg(tab, 0.0, [5.0])
    assert np.isfinite(f[0]) and f[0] > 0 and np.isfinite(g[0])


@pytest.mark.parametrize("x,w", [(-2.0, -1.0), (-1.0, 0.5), (0.0, 2.0)])
def test_rank_one_is_F_times_f(F2, tab, x, w):
    f, _ = lax_fg(tab, x, [w])
    assert F2(x, [w]) == pytest.approx(float(tab.at("F", x)) * f[0], rel=1e-12)


@pytest.mark.parametrize("x,w", [(-1.0, [-0.5, 0.3, 1.2]), (0.0, [-1.0, 0.0, 1.0]), (-2.0, [0.1, 0.8, 2.0]),
                                 (0.5, [-0.8, 0.4, 1.6]), (-0.5, [-1.5, -0.2, 0.9])])
def test_pde_residual_rank_three(F2, x, w):
    assert abs(pde_residual(F2, x, w)) <= 1e-3


@pytest.mark.slow
def test_rank_two_matches_sde_at_1e5_paths(F2):
    from spiked_edge.algebra import Rng
    from spiked_edge.dyson_sde import estimate_F

    N = 100_000
    est = estimate_F(Rng(101), 2, 2, [0.0, 1.0], 0, [-1.0], N, dt_base=1e-2)
    assert abs(est.estimates[0] - F2(-1.0, [0.0, 1.0])) <= 3 * est.stderr[0]


@pytest.mark.parametrize("w", [[-1.0], [0.0, 2.0], [-0.5, 0.5, 1.5]])
def test_boundary_probes(F2, w):
    # a negative w keeps a tail of order exp(x w + w^3/3)
    assert 0 <= 1 - F2(7.9, w) < 1e-3 and 1 - F2(7.9, w) < 1 - F2(6.0, w)
    low = [-6.0] + w[1:]
    assert F2(0.0, low) < 1e-6 and F2(-1.0, low) < F2(0.0, low) + 1e-12


def test_large_second_w_is_monotone_towards_rank_one(F2):
    vals = [F2(-1.0, [0.0, wb]) for wb in (2.0, 5.0, 10.0, 40.0)]
    assert np.all(np.diff(vals) > 0) and vals[-1] < F2(-1.0, [0.0])
