"""Validation and cross-validation suites.

Every suite returns a :class:`SuiteResult` holding a table of rows (one dict
per checked item), a headline statistic, the tolerance it is judged
against and a pass flag.  The CLI emits the rows as CSV; the acceptance
tests call the same functions with the acceptance parameters.

Randomness is keyed by ``(seed, stream)`` through :class:`Rng`; each suite
uses disjoint stream ranges so results do not depend on execution order.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.stats

from .airy_operator import discretize, riccati_explosion_count, smallest_eigenvalues
from .algebra import ConfigurationError, Rng, SelfAdjointMatrix, block_size
from .band_reduction import band_jacobi_form, lower_band_form, perturbation_commutes
from .dyson_sde import estimate_F, estimate_F_monotonicity_suite, explosion_counts
from .edge_solver import (
    count_below,
    gaussian_P_from_w,
    sample_gaussian_edge,
    sample_wishart_edge,
    wishart_Sigma_from_w,
)
from .ensembles import SpikeConfig, sample_dense_data, sample_dense_reference, sample_gaussian_band, sample_spiked_S
from .painleve import (
    default_tableau,
    lax_fg,
    lax_x_transport,
    make_F2,
    pde_residual,
)

ROUTES = ("finite-n", "sde", "painleve", "airy")


@dataclass
class SuiteResult:
    """Outcome of one suite."""

    name: str
    passed: bool
    statistic: float
    tolerance: float
    rows: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def summary_line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {self.name}: statistic={self.statistic:.4g} tolerance={self.tolerance:.4g}"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.wall_time = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def parse_grid(text: str) -> np.ndarray:
    """``"a:b:step"`` -> inclusive grid ``a, a+step, ..., b``; also accepts a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigurationError(f"grid {text!r} is not a:b:step")
        try:
            a, b, step = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigurationError(f"bad grid {text!r}") from exc
        if step <= 0 or b < a:
            raise ConfigurationError(f"grid {text!r} needs step > 0 and b >= a")
        m = int(math.floor((b - a) / step + 1e-9)) + 1
        return a + step * np.arange(m)
    try:
        vals = np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError as exc:
        raise ConfigurationError(f"bad grid {text!r}") from exc
    if vals.size == 0 or np.any(np.diff(vals) < 0):
        raise ConfigurationError("grid must be a nonempty ascending list")
    return vals


# ---------------------------------------------------------------------------
# Structural suites
# ---------------------------------------------------------------------------


def _random_self_adjoint(rng: Rng, beta: int, n: int) -> SelfAdjointMatrix:
    return sample_dense_reference(rng, beta, "gaussian", n)


@_timed
def spectrum_suite(seed: int = 0, trials: int = 100, n_max: int = 200, betas=(1, 2, 4),
                   ranks=(1, 2, 3), tol: float = 1e-9) -> SuiteResult:
    """Band Jacobi form keeps the spectrum: ``max |eig(B) - eig(A)| <= tol |A|``."""
    rows = []
    for beta in betas:
        pick = Rng(seed, 10_000 + beta).generator
        for t in range(trials):
            r = ranks[t % len(ranks)]
            n = int(pick.integers(r + 1, n_max + 1)) if t else n_max
            A = _random_self_adjoint(Rng(seed, 100_000 * beta + t), beta, n)
            res = band_jacobi_form(A, r)
            ea = np.linalg.eigvalsh(A.data)
            eb = np.linalg.eigvalsh(res.B.dense())
            norm = float(np.abs(ea).max())
            rows.append(dict(beta=beta, n=n, r=r, deviation=float(np.abs(ea - eb).max() / norm),
                             unique=bool(res.uniqueness_flag)))
    stat = max(r["deviation"] for r in rows)
    return SuiteResult("spectrum", stat <= tol, stat, tol, rows)


@_timed
def commutation_suite(seed: int = 0, trials: int = 100, n_max: int = 60, betas=(1, 2, 4),
                      ranks=(1, 2, 3), tol: float = 1e-10) -> SuiteResult:
    """``band(A + P~ (+) 0) = band(A) + P~ (+) 0`` entrywise (and the same transform)."""
    rows = []
    for t in range(trials):
        beta = betas[t % len(betas)]
        r = ranks[(t // len(betas)) % len(ranks)]
        rng = Rng(seed, 200_000 + t)
        n = int(rng.generator.integers(r + 1, n_max + 1))
        A = _random_self_adjoint(rng, beta, n)
        P = _random_self_adjoint(rng, beta, r).data
        rows.append(dict(beta=beta, n=n, r=r, deviation=perturbation_commutes(A, P, r)))
    stat = max(r["deviation"] for r in rows)
    return SuiteResult("commutation", stat <= tol, stat, tol, rows)


def _top_eig(mat: np.ndarray, beta: int) -> float:
    return float(np.linalg.eigvalsh(mat)[-1])


LAW_SPIKES = {1: (0.0,), 2: (-0.5, 0.5)}


@_timed
def law_equivalence_suite(seed: int = 0, reps: int = 2000, betas=(1, 2, 4), ranks=(1, 2),
                          n_gauss: int = 30, n_wish: int = 20, p_wish: int = 40,
                          alpha: float = 1e-3) -> SuiteResult:
    """Top eigenvalue of the direct band samplers vs reduced dense samplers (two-sample KS).

    Gaussian: ``A = (X + X^dagger)/sqrt 2 + sqrt(n) P~`` reduced by the band
    Jacobi form.  Wishart: the lower band form ``L`` of a null data matrix,
    then ``L^dagger Sigma L``.  Spikes are in limit coordinates
    (``LAW_SPIKES``).
    """
    rows = []
    case = 0
    for model in ("gaussian", "wishart"):
        for beta in betas:
            for r in ranks:
                w = LAW_SPIKES[r]
                base = 1_000_000 * (case + 1)
                direct = np.empty(reps)
                reduced = np.empty(reps)
                if model == "gaussian":
                    n = n_gauss
                    P = gaussian_P_from_w(w, n)
                    for i in range(reps):
                        G = sample_gaussian_band(Rng(seed, base + i), beta, n, r, P)
                        direct[i] = _top_eig(G.dense(), beta)
                        A = sample_dense_reference(Rng(seed, base + reps + i), beta, "gaussian", n, P)
                        reduced[i] = _top_eig(band_jacobi_form(A, r).B.dense(), beta)
                else:
                    n, p = n_wish, p_wish
                    sig_t = wishart_Sigma_from_w(w, n, p)
                    d = block_size(beta)
                    sigma = np.ones(p * d)
                    sigma[: r * d] = np.repeat(sig_t, d)
                    for i in range(reps):
                        S = sample_spiked_S(Rng(seed, base + i), beta, n, p, r, sig_t)
                        direct[i] = _top_eig(S.dense(), beta)
                        X = sample_dense_data(Rng(seed, base + reps + i), beta, n, p)
                        L = lower_band_form(X, beta, r).L
                        S2 = L.conj().T @ (sigma[:, None] * L)
                        reduced[i] = _top_eig(0.5 * (S2 + S2.conj().T), beta)
                ks = scipy.stats.ks_2samp(direct, reduced)
                rows.append(dict(model=model, beta=beta, r=r, ks=float(ks.statistic), p_value=float(ks.pvalue)))
                case += 1
    stat = min(r["p_value"] for r in rows)
    return SuiteResult("law-equivalence", stat > alpha, stat, alpha, rows,
                       details={"statistic": "min p-value", "rule": "p > tolerance"})


@_timed
def oscillation_suite(seed: int = 0, paths: int = 500, h: float = 0.01, L: float = 15.0,
                      levels: int = 4, min_fraction: float = 0.95) -> SuiteResult:
    """Riccati focal-point count vs eigenvalue count below lambda on discretized Airy paths.

    Path i cycles beta over {1, 2, 4}, r over {1, 2, 3} and a set of
    boundary matrices (Dirichlet entries included); each path is checked
    at ``levels`` random lambdas in [-4, 8].  A path agrees when every level
    agrees.  Disagreements must lie within ``10 h^2`` of an eigenvalue.
    """
    spikes = {1: [(0.0,), (-1.0,), (math.inf,), (2.0,)],
              2: [(0.0, 0.0), (-1.0, math.inf), (0.5, 1.5), (math.inf, math.inf)],
              3: [(-0.5, 0.0, 1.0), (0.0, math.inf, math.inf), (1.0, 1.0, math.inf)]}
    band = 10.0 * h * h
    rows = []
    agree_paths = 0
    outside_band = 0
    for i in range(paths):
        beta = (1, 2, 4)[i % 3]
        r = 1 + (i // 3) % 3
        W = spikes[r][(i // 9) % len(spikes[r])]
        rng = Rng(seed, 300_000 + i)
        op, H = discretize(rng, beta, r, W, h, L)
        lams = rng.generator.uniform(-4.0, 8.0, size=levels)
        ok = True
        for lam in lams:
            ric = riccati_explosion_count(op, float(lam))
            eig = count_below(H, float(lam))
            if ric != eig:
                ok = False
                near = count_below(H, float(lam) + band) != count_below(H, float(lam) - band)
                outside_band += 0 if near else 1
            rows.append(dict(path=i, beta=beta, r=r, w=",".join(map(str, W)), lam=float(lam),
                             riccati=int(ric), eigen=int(eig)))
        agree_paths += ok
    frac = agree_paths / paths
    return SuiteResult("oscillation", frac >= min_fraction and outside_band == 0, frac, min_fraction, rows,
                       details={"paths": paths, "disagreements_outside_band": outside_band})


# ---------------------------------------------------------------------------
# Route CDFs on a grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RouteCDF:
    """A distribution function on a grid with binomial standard errors (0 if exact)."""

    route: str
    x: np.ndarray
    F: np.ndarray
    stderr: np.ndarray
    N: int


def _ecdf(samples: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = np.sort(samples)
    F = np.searchsorted(s, x, side="right") / s.size
    return F, np.sqrt(F * (1 - F) / s.size)


def finite_n_samples(seed: int, model: str, beta: int, n: int, p: int | None, w, reps: int,
                     k: int = 0, stream0: int = 0) -> np.ndarray:
    """Edge-scaled (k+1)-st largest eigenvalue of ``reps`` band samples (replica i: stream0 + i)."""
    spike = w if isinstance(w, SpikeConfig) else SpikeConfig(tuple(w))
    out = np.empty(reps)
    for i in range(reps):
        rng = Rng(seed, stream0 + i)
        if model == "gaussian":
            out[i] = sample_gaussian_edge(rng, beta, n, spike, k + 1)[k]
        elif model == "wishart":
            if p is None:
                raise ConfigurationError("wishart needs p")
            out[i] = sample_wishart_edge(rng, beta, n, p, spike, k + 1)[k]
        else:
            raise ConfigurationError(f"unknown model {model!r}")
    return out


def airy_samples(seed: int, beta: int, w, reps: int, k: int = 0, h: float = 0.01, L: float = 15.0,
                 stream0: int = 0) -> np.ndarray:
    """``-Lambda_k`` of discretized operators (the edge-scaled eigenvalue)."""
    spike = w if isinstance(w, SpikeConfig) else SpikeConfig(tuple(w))
    out = np.empty(reps)
    for i in range(reps):
        _, H = discretize(Rng(seed, stream0 + i), beta, spike.r, spike, h, L)
        out[i] = -smallest_eigenvalues(H, k + 1)[k]
    return out


def route_cdf(route: str, x_grid, *, beta: int, w, k: int = 0, seed: int = 0, reps: int = 2000,
              model: str = "gaussian", n: int | None = None, p: int | None = None,
              dt_base: float = 1e-2, h: float = 0.01, L: float = 15.0, workers: int | None = None,
              stream0: int = 0) -> RouteCDF:
    """``F_beta^k(x; w)`` on ``x_grid`` by one route.

    ``finite-n`` and ``airy`` give empirical CDFs of ``reps`` samples,
    ``sde`` runs ``reps`` paths per grid point, ``painleve`` is exact up to
    quadrature (beta = 2, k = 0).
    """
    x = np.asarray(x_grid, dtype=float)
    spike = w if isinstance(w, SpikeConfig) else SpikeConfig(tuple(w))
    if route == "finite-n":
        if n is None:
            raise ConfigurationError("finite-n route needs n")
        F, se = _ecdf(finite_n_samples(seed, model, beta, n, p, spike, reps, k, stream0), x)
        return RouteCDF(route, x, F, se, reps)
    if route == "airy":
        F, se = _ecdf(airy_samples(seed, beta, spike, reps, k, h, L, stream0), x)
        return RouteCDF(route, x, F, se, reps)
    if route == "sde":
        est = estimate_F(seed, beta, spike.r, spike, k, x, reps, dt_base, workers=workers)
        return RouteCDF(route, x, est.estimates, est.stderr, reps)
    if route == "painleve":
        if beta != 2 or k != 0:
            raise ConfigurationError("the painleve route covers beta = 2, k = 0 only")
        F2 = make_F2()
        vals = np.array([F2(float(xx), spike.w) for xx in x])
        return RouteCDF(route, x, vals, np.zeros_like(vals), 0)
    raise ConfigurationError(f"unknown route {route!r}; choose from {ROUTES}")


def compare_routes(a: RouteCDF, b: RouteCDF, tol: float | None = None, sigmas: float | None = None,
                   name: str = "crossvalidate") -> SuiteResult:
    """Max ``|F_a - F_b|`` on the shared grid, with pooled errors.

    PASS iff ``max |dF| <= tol`` (when given) and ``|dF| <= sigmas * pooled``
    at every grid point (when given).
    """
    if not np.array_equal(a.x, b.x):
        raise ConfigurationError("routes must share the grid")
    diff = a.F - b.F
    pooled = np.sqrt(a.stderr**2 + b.stderr**2)
    rows = [dict(x=float(x), F_a=float(fa), stderr_a=float(sa), F_b=float(fb), stderr_b=float(sb),
                 diff=float(d), pooled_stderr=float(ps))
            for x, fa, sa, fb, sb, d, ps in zip(a.x, a.F, a.stderr, b.F, b.stderr, diff, pooled)]
    stat = float(np.abs(diff).max())
    passed = True
    details = {"routes": [a.route, b.route], "N": [a.N, b.N]}
    if tol is not None:
        passed &= stat <= tol
    if sigmas is not None:
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(pooled > 0, np.abs(diff) / pooled, np.where(diff == 0, 0.0, np.inf))
        details["max_z"] = float(z.max())
        passed &= bool(np.all(z <= sigmas))
    limit = tol if tol is not None else sigmas
    return SuiteResult(name, bool(passed), stat, math.nan if limit is None else float(limit), rows, details)


# ---------------------------------------------------------------------------
# Limit-law suites
# ---------------------------------------------------------------------------


@_timed
def finite_n_vs_sde_suite(model: str, beta: int, w, n_values: Sequence[int], tolerances: Sequence[float],
                          p_values: Sequence[int] | None = None, seed: int = 0, reps: int = 2000,
                          sde_reps: int = 5000, x_grid=None, dt_base: float = 1e-2,
                          require_decreasing: bool = True, workers: int | None = None) -> SuiteResult:
    """KS distance on a grid between finite-n ECDFs and one SDE estimate of F.

    The SDE curve is computed once and shared by every n.  PASS iff each
    KS is within its tolerance and (optionally) KS decreases in n.
    """
    x = parse_grid("-5:3:0.25") if x_grid is None else np.asarray(x_grid, dtype=float)
    spike = SpikeConfig(tuple(w))
    sde = route_cdf("sde", x, beta=beta, w=spike, seed=seed, reps=sde_reps, dt_base=dt_base, workers=workers)
    rows = []
    ks_values = []
    for j, n in enumerate(n_values):
        p = None if p_values is None else p_values[j]
        fin = route_cdf("finite-n", x, beta=beta, w=spike, seed=seed, reps=reps, model=model, n=n, p=p,
                        stream0=10_000_000 * (j + 1))
        cmp = compare_routes(fin, sde)
        ks_values.append(cmp.statistic)
        for row in cmp.rows:
            rows.append(dict(n=n, p=p if p is not None else "", **row))
    ok = all(ks <= tol for ks, tol in zip(ks_values, tolerances))
    if require_decreasing and len(ks_values) > 1:
        ok &= all(b < a for a, b in zip(ks_values, ks_values[1:]))
    return SuiteResult(f"{model}-vs-sde", bool(ok), max(ks_values), float(max(tolerances)), rows,
                       details={"ks": dict(zip(map(int, n_values), ks_values)),
                                "tolerances": list(tolerances), "sde_reps": sde_reps, "reps": reps})


@_timed
def painleve_suite(tol_residual: float = 1e-8, tol_pde: float = 1e-4,
                   pde_x=(-3.0, -2.0, -1.0, 0.0, 1.0),
                   pde_w=((-1.0, 0.5), (-0.5, 1.0), (0.0, 0.7), (0.3, 1.2), (-1.5, -0.2)),
                   identity_x=(-3.0, -1.0, 0.0, 1.5), identity_w=(-1.0, 0.0, 1.0, 2.5)) -> SuiteResult:
    """Hastings-McLeod invariants, the r = 1 identity and the r = 2 PDE residual.

    The r = 1 identity ``F_2(x; w) = F(x) f(x, w)`` is checked with ``f``
    obtained by transporting ``(f, g)`` in x from ``x = 0`` (an ODE path
    independent of the w-ODE used by :func:`lax_fg`).
    """
    tab = default_tableau()
    rows = []
    ode = float(np.abs(tab.ode_residual()).max())
    ident = float(np.abs(tab.identity_residual()).max())
    rows.append(dict(check="ode_residual", x="", w="", value=ode, tolerance=tol_residual))
    rows.append(dict(check="identity_residual", x="", w="", value=ident, tolerance=tol_residual))
    F2 = make_F2(tab)
    worst_r1 = 0.0
    for wv in identity_w:
        fg0 = np.array(lax_fg(tab, 0.0, [wv])).ravel()
        for xv in identity_x:
            f_tr = lax_x_transport(tab, wv, 0.0, xv, fg0)[0]
            lhs = F2(xv, [wv])
            rhs = float(tab.at("F", xv)) * float(f_tr)
            dev = abs(lhs - rhs)
            worst_r1 = max(worst_r1, dev)
            rows.append(dict(check="r1_identity", x=xv, w=wv, value=dev, tolerance=tol_residual))
    worst_pde = 0.0
    for xv in pde_x:
        for wv in pde_w:
            res = abs(pde_residual(F2, xv, wv, beta=2))
            worst_pde = max(worst_pde, res)
            rows.append(dict(check="pde_residual_r2", x=xv, w=",".join(map(str, wv)), value=res, tolerance=tol_pde))
    ok = ode <= tol_residual and ident <= tol_residual and worst_r1 <= tol_residual and worst_pde <= tol_pde
    return SuiteResult("painleve", bool(ok), worst_pde, tol_pde, rows,
                       details={"ode_residual": ode, "identity_residual": ident, "r1_identity": worst_r1,
                                "pde_points": len(pde_x) * len(pde_w)})


def triangle_points(ranks=(1, 2), w_grid=(-1.0, 0.0, 1.0), x_values=(-1.0, 0.0)):
    """Pre-registered (r, w, x) points for the SDE vs Painleve comparison."""
    pts = []
    for r in ranks:
        ws = [tuple(sorted(c)) for c in itertools.combinations_with_replacement(w_grid, r)]
        for w in ws:
            for x in x_values:
                pts.append((r, w, x))
    return pts


@_timed
def triangle_suite(seed: int = 0, N: int = 100_000, dt_base: float = 1e-2, sigmas: float = 3.0,
                   points=None, workers: int | None = None) -> SuiteResult:
    """SDE vs Painleve at beta = 2: ``|dF| <= sigmas * pooled stderr`` at every point."""
    F2 = make_F2()
    pts = triangle_points() if points is None else points
    rows = []
    worst = 0.0
    for j, (r, w, x) in enumerate(pts):
        counts, bad = explosion_counts(seed + j, 2, r, [w], x, N, dt_base, stop_after=0, workers=workers)
        good = counts[~bad, 0] == 0
        p_hat = float(good.mean())
        se = math.sqrt(max(p_hat * (1 - p_hat), 1e-300) / good.size)
        ref = F2(x, list(w))
        z = abs(p_hat - ref) / se
        worst = max(worst, z)
        rows.append(dict(r=r, w=",".join(map(str, w)), x=x, sde=p_hat, stderr=se, painleve=ref,
                         diff=p_hat - ref, z=z, N=int(good.size), discarded=int(bad.sum())))
    return SuiteResult("triangle", worst <= sigmas, worst, sigmas, rows,
                       details={"statistic": "max |dF| / pooled stderr", "N": N, "dt_base": dt_base})


MONOTONE_FAMILIES = {
    1: [(-2.0,), (-1.0,), (0.0,), (1.0,), (2.0,), (math.inf,)],
    2: [(-1.0, -1.0), (-1.0, 0.0), (-1.0, 1.0), (-1.0, math.inf), (0.0, math.inf), (1.0, math.inf),
        (math.inf, math.inf)],
}


@_timed
def monotonicity_suite(seed: int = 0, beta: int = 2, N: int = 1000, x_values=(-2.0, -1.0, 0.0),
                       red_N: int = 40_000, red_w=(-1.0, 0.0, 1.0), red_x=(-1.0,), w_big: float = 1e3,
                       sigmas: float = 3.0, dt_base: float = 1e-2, workers: int | None = None) -> SuiteResult:
    """Pathwise monotonicity of explosion counts and the rank reduction relation.

    Monotonicity: each family of ``MONOTONE_FAMILIES`` is ordered
    componentwise; counts must be nonincreasing along it on 100% of paths.
    Reduction: ``F_{r=2}(x; w1, w_big)`` vs ``F_{r=1}(x; w1)`` (independent
    runs), judged at ``sigmas`` pooled standard errors.
    """
    rows = []
    violations = 0
    j = 0
    for r, fam in MONOTONE_FAMILIES.items():
        for x in x_values:
            rep = estimate_F_monotonicity_suite(seed + j, beta, r, fam, x, N, dt_base, workers=workers)
            j += 1
            violations += rep.violations
            rows.append(dict(check="monotone", r=r, x=x, w="|".join(",".join(map(str, v)) for v in fam),
                             value=rep.violations, reference=rep.fraction_monotone, stderr="", z=""))
    worst = 0.0
    for w1 in red_w:
        for x in red_x:
            a = estimate_F(seed + 1000 + j, beta, 2, (w1, w_big), 0, [x], red_N, dt_base, workers=workers)
            b = estimate_F(seed + 2000 + j, beta, 1, (w1,), 0, [x], red_N, dt_base, workers=workers)
            j += 1
            pooled = math.hypot(a.stderr[0], b.stderr[0])
            z = abs(a.estimates[0] - b.estimates[0]) / pooled
            worst = max(worst, z)
            rows.append(dict(check="reduction", r=2, x=x, w=f"{w1},{w_big}", value=float(a.estimates[0]),
                             reference=float(b.estimates[0]), stderr=pooled, z=z))
    ok = violations == 0 and worst <= sigmas
    return SuiteResult("monotonicity", bool(ok), float(violations), 0.0, rows,
                       details={"violations": violations, "reduction_max_z": worst, "sigmas": sigmas})


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "spectrum": spectrum_suite,
    "commutation": commutation_suite,
    "law-equivalence": law_equivalence_suite,
    "oscillation": oscillation_suite,
    "painleve-pde": painleve_suite,
    "monotonicity": monotonicity_suite,
    "triangle": triangle_suite,
}
