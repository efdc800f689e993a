"""Grid parsing, route comparison and quick runs of the structural suites."""

from __future__ import annotations

import math

import numpy as np
import pytest

from spiked_edge.algebra import ConfigurationError
from spiked_edge.suites import (
    RouteCDF,
    commutation_suite,
    compare_routes,
    finite_n_vs_sde_suite,
    oscillation_suite,
    parse_grid,
    route_cdf,
    spectrum_suite,
    triangle_points,
)


@pytest.mark.parametrize("text,expected", [
    ("-5:3:0.25", np.arange(-5, 3.0001, 0.25)),
    ("0:1:0.3", [0.0, 0.3, 0.6, 0.9]),
    ("2:2:1", [2.0]),
    ("-1, 0,2.5", [-1.0, 0.0, 2.5]),
])
def test_parse_grid(text, expected):
    assert np.allclose(parse_grid(text), expected)


@pytest.mark.parametrize("text", ["1:0:0.5", "0:1:0", "0:1", "a,b", "", "1,0"])
def test_parse_grid_rejects(text):
    with pytest.raises(ConfigurationError):
        parse_grid(text)


def test_compare_routes_tolerance_and_sigmas():
    x = np.array([0.0, 1.0])
    a = RouteCDF("painleve", x, np.array([0.5, 0.9]), np.zeros(2), 0)
    b = RouteCDF("sde", x, np.array([0.52, 0.9]), np.array([0.01, 0.01]), 2500)
    res = compare_routes(a, b, tol=0.03, sigmas=3.0)
    assert res.passed and res.statistic == pytest.approx(0.02)
    assert res.details["max_z"] == pytest.approx(2.0)
    assert not compare_routes(a, b, sigmas=1.5).passed
    assert not compare_routes(a, b, tol=0.01).passed


def test_compare_routes_exact_mismatch_is_infinite_z():
    x = np.array([0.0])
    a = RouteCDF("painleve", x, np.array([0.5]), np.zeros(1), 0)
    b = RouteCDF("painleve", x, np.array([0.6]), np.zeros(1), 0)
    res = compare_routes(a, b, sigmas=3.0)
    assert not res.passed and math.isinf(res.details["max_z"])


def test_route_cdf_rejects_unsupported():
    with pytest.raises(ConfigurationError):
        route_cdf("painleve", [0.0], beta=1, w=(0.0,))
    with pytest.raises(ConfigurationError):
        route_cdf("oracle", [0.0], beta=2, w=(0.0,))
    with pytest.raises(ConfigurationError):
        route_cdf("finite-n", [0.0], beta=2, w=(0.0,))


def test_triangle_points_layout():
    pts = triangle_points()
    assert len(pts) == 18
    ranks = [r for r, _, _ in pts]
    assert ranks.count(1) == 6 and ranks.count(2) == 12
    assert all(list(w) == sorted(w) for _, w, _ in pts)


def test_structural_suites_quick():
    assert spectrum_suite(seed=1, trials=6, n_max=30).passed
    assert commutation_suite(seed=1, trials=6).passed
    res = oscillation_suite(seed=1, paths=12, h=0.05, L=10.0)
    assert res.passed and res.statistic == 1.0


def test_compare_routes_without_limits():
    x = np.array([0.0])
    a = RouteCDF("sde", x, np.array([0.5]), np.array([0.01]), 100)
    res = compare_routes(a, a)
    assert res.passed and res.statistic == 0.0 and math.isnan(res.tolerance)


def test_finite_n_vs_sde_suite_small():
    res = finite_n_vs_sde_suite("gaussian", 2, (0.0, math.inf), (20, 40), (0.5, 0.5), seed=1, reps=20,
                                sde_reps=20, x_grid=parse_grid("-2:0:1"), require_decreasing=False)
    assert set(res.details["ks"]) == {20, 40}
    assert len(res.rows) == 6 and res.wall_time > 0


@pytest.mark.slow
def test_airy_route_matches_sde_route():
    # beta = 2, r = 1, Dirichlet: both routes target the same law
    x = parse_grid("-4:1:0.5")
    a = route_cdf("airy", x, beta=2, w=(math.inf,), seed=7, reps=5000)
    b = route_cdf("sde", x, beta=2, w=(math.inf,), seed=8, reps=5000)
    assert compare_routes(a, b, tol=0.04).passed
