"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test prints one ``PASS``/``FAIL`` line.  Seeds, grids and sample
sizes are fixed here in advance of running; see the decisions ledger for
how each protocol was chosen.
"""

from __future__ import annotations

import contextlib
import math

import pytest

from spiked_edge.suites import (
    commutation_suite,
    finite_n_vs_sde_suite,
    law_equivalence_suite,
    monotonicity_suite,
    oscillation_suite,
    painleve_suite,
    parse_grid,
    spectrum_suite,
    triangle_suite,
)

pytestmark = pytest.mark.acceptance

SEED = 20240611
KS_GRID = parse_grid("-5:3:0.25")


def _report(capsys, label: str, res, budget_s: float, extra: str = "") -> bool:
    within = res.wall_time < budget_s
    ok = bool(res.passed and within)
    line = (f"{'PASS' if ok else 'FAIL'} {label}: statistic={res.statistic:.4g} "
            f"tolerance={res.tolerance:.4g} runtime={res.wall_time:.1f}s budget={budget_s:.0f}s")
    if extra:
        line += " " + extra
    with capsys.disabled():
        print("\n" + line)
    return ok


@contextlib.contextmanager
def _criterion(capsys, label: str):
    """Print a FAIL line if the suite itself raises, then re-raise."""
    try:
        yield
    except AssertionError:
        raise
    except Exception as exc:
        with capsys.disabled():
            print(f"\nFAIL {label}: {type(exc).__name__}: {exc}")
        raise


def test_criterion_1_spectrum_preservation(capsys):
    with _criterion(capsys, "criterion 1 spectrum preservation"):
        res = spectrum_suite(seed=SEED, trials=100, n_max=200, betas=(1, 2, 4), ranks=(1, 2, 3), tol=1e-9)
        assert _report(capsys, "criterion 1 spectrum preservation", res, 60.0)


def test_criterion_2_perturbation_commutation(capsys):
    with _criterion(capsys, "criterion 2 perturbation commutation"):
        res = commutation_suite(seed=SEED, trials=100, tol=1e-10)
        assert _report(capsys, "criterion 2 perturbation commutation", res, 30.0)


def test_criterion_3_law_equivalence(capsys):
    with _criterion(capsys, "criterion 3 law equivalence of band samplers"):
        res = law_equivalence_suite(seed=SEED, reps=2000, betas=(1, 2, 4), ranks=(1, 2), alpha=1e-3)
        worst = min(res.rows, key=lambda r: r["p_value"])
        extra = f"(min p over 12 cases: {worst['model']} beta={worst['beta']} r={worst['r']})"
        assert _report(capsys, "criterion 3 law equivalence of band samplers", res, 600.0, extra)


def test_criterion_4_oscillation_theorem(capsys):
    with _criterion(capsys, "criterion 4 Riccati count = eigenvalue count"):
        res = oscillation_suite(seed=SEED, paths=500, h=0.01, L=15.0, min_fraction=0.95)
        extra = f"(disagreements outside 10h^2 band: {res.details['disagreements_outside_band']})"
        assert _report(capsys, "criterion 4 Riccati count = eigenvalue count", res, 300.0, extra)


def test_criterion_5_gaussian_finite_n_vs_sde(capsys):
    with _criterion(capsys, "criterion 5 Gaussian beta=1 r=2 finite-n vs SDE"):
        res = finite_n_vs_sde_suite("gaussian", beta=1, w=(0.0, math.inf), n_values=(200, 800),
                                    tolerances=(0.08, 0.05), seed=SEED, reps=2000, sde_reps=5000,
                                    x_grid=KS_GRID, dt_base=1e-2, require_decreasing=True)
        ks = res.details["ks"]
        extra = f"(KS n=200: {ks[200]:.4f} tol 0.08; n=800: {ks[800]:.4f} tol 0.05; decreasing required)"
        assert _report(capsys, "criterion 5 Gaussian beta=1 r=2 finite-n vs SDE", res, 1200.0, extra)


def test_criterion_6_wishart_finite_n_vs_sde(capsys):
    with _criterion(capsys, "criterion 6 Wishart beta=2 finite-n vs SDE"):
        res = finite_n_vs_sde_suite("wishart", beta=2, w=(0.0,), n_values=(400,), p_values=(1600,),
                                    tolerances=(0.06,), seed=SEED, reps=2000, sde_reps=5000,
                                    x_grid=KS_GRID, dt_base=1e-2, require_decreasing=False)
        extra = f"(KS n=400 p=1600: {res.details['ks'][400]:.4f})"
        assert _report(capsys, "criterion 6 Wishart beta=2 finite-n vs SDE", res, 1200.0, extra)


def test_criterion_7_painleve_route(capsys):
    with _criterion(capsys, "criterion 7 Painleve route"):
        res = painleve_suite(tol_residual=1e-8, tol_pde=1e-4)
        d = res.details
        extra = (f"(ODE residual {d['ode_residual']:.2e}, identity {d['identity_residual']:.2e}, "
                 f"r=1 identity {d['r1_identity']:.2e}, max PDE residual over {d['pde_points']} points)")
        assert _report(capsys, "criterion 7 Painleve route", res, 120.0, extra)


def test_criterion_8_route_triangle(capsys):
    with _criterion(capsys, "criterion 8 SDE vs Painleve closure"):
        res = triangle_suite(seed=SEED, N=100_000, dt_base=1e-2, sigmas=3.0)
        worst = max(res.rows, key=lambda r: r["z"])
        extra = f"(max z at r={worst['r']} w=({worst['w']}) x={worst['x']}; {len(res.rows)} points)"
        assert _report(capsys, "criterion 8 SDE vs Painleve closure", res, 1800.0, extra)


def test_criterion_9_monotonicity_and_reduction(capsys):
    with _criterion(capsys, "criterion 9 monotonicity and reduction"):
        res = monotonicity_suite(seed=SEED, beta=2, N=1000, x_values=(-2.0, -1.0, 0.0), red_N=40_000,
                                 red_w=(-1.0, 0.0, 1.0), red_x=(-1.0,), w_big=1e3, sigmas=3.0, dt_base=1e-2)
        d = res.details
        extra = f"(monotonicity violations {d['violations']}; reduction max z {d['reduction_max_z']:.2f})"
        assert _report(capsys, "criterion 9 monotonicity and reduction", res, 600.0, extra)
