"""beta = 2 closed forms through the Hastings-McLeod solution of Painleve II.

``u'' = 2u^3 + xu`` with ``u ~ Ai(x)`` as ``x -> +inf``.  From u:

* ``v(x) = int_x^inf u^2``, ``E(x) = exp(-int_x^inf u)``, ``F(x) = exp(-int_x^inf v)``;
* the Lax pair functions ``f(x, w), g(x, w)`` solving, in w,
  ``d/dw (f, g) = [[u^2, -wu - u'], [-wu + u', w^2 - x - u^2]] (f, g)``
  with ``f(x, 0) = g(x, 0) = E(x)``, and in x ``f_x = u g``, ``g_x = u f - w g``;
* the rank-r law ``F_2(x; w) = F(x) det[(w_i + d_x)^{j-1} f(x, w_i)] / prod_{i<j} (w_j - w_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import scipy.integrate
import scipy.interpolate
import scipy.linalg
import scipy.special

from .algebra import ConfigurationError, DomainError, NumericError

DEFAULT_X_MIN = -12.0
DEFAULT_X_MAX = 8.0
DEFAULT_STEP = 1e-3
CONFLUENT_EPS = 1e-4
CONFLUENT_SPLIT = 1e-2
ODE_RTOL = 1e-13
ODE_ATOL = 1e-300


def default_grid(x_min: float = DEFAULT_X_MIN, x_max: float = DEFAULT_X_MAX, step: float = DEFAULT_STEP) -> np.ndarray:
    n = int(round((x_max - x_min) / step))
    return x_min + step * np.arange(n + 1)


def left_asymptotic(x):
    """Hastings-McLeod expansion ``sqrt(-x/2) (1 + 1/(8x^3) - 73/(128x^6) + 10657/(1024x^9))``."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(-x / 2.0) * (1 + 1 / (8 * x**3) - 73 / (128 * x**6) + 10657 / (1024 * x**9))


# ---------------------------------------------------------------------------
# Hastings-McLeod tableau
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PainleveTableau:
    """Hastings-McLeod solution and derived functions on a uniform grid."""

    x: np.ndarray
    u: np.ndarray
    up: np.ndarray
    v: np.ndarray
    log_E: np.ndarray
    log_F: np.ndarray
    newton_residual: float
    _interp: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def E(self) -> np.ndarray:
        return np.exp(self.log_E)

    @property
    def F(self) -> np.ndarray:
        return np.exp(self.log_F)

    @property
    def step(self) -> float:
        return float(self.x[1] - self.x[0])

    def ode_residual(self) -> np.ndarray:
        """Interior residual of ``u'' - 2u^3 - xu`` with a 5-point stencil."""
        h = self.step
        u = self.u
        upp = (-u[4:] + 16 * u[3:-1] - 30 * u[2:-2] + 16 * u[1:-3] - u[:-4]) / (12 * h * h)
        xs = self.x[2:-2]
        return upp - 2 * u[2:-2] ** 3 - xs * u[2:-2]

    def identity_residual(self) -> np.ndarray:
        """``v + u^4 - u'^2 + x u^2`` (vanishes identically)."""
        return self.v + self.u**4 - self.up**2 + self.x * self.u**2

    # -- evaluation at arbitrary x ----------------------------------------
    def _spline(self, name: str):
        sp = self._interp.get(name)
        if sp is None:
            x, u, up = self.x, self.u, self.up
            upp = 2 * u**3 + x * u
            data = {
                "u": (u, up),
                "up": (up, upp),
                "v": (self.v, -(u**2)),
                "log_E": (self.log_E, u),
                "log_F": (self.log_F, self.v),
            }[name]
            sp = scipy.interpolate.CubicHermiteSpline(x, data[0], data[1], extrapolate=False)
            self._interp[name] = sp
        return sp

    def _check_range(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(x < self.x[0] - 1e-12) or np.any(x > self.x[-1] + 1e-12):
            raise DomainError(f"x outside tableau range [{self.x[0]}, {self.x[-1]}]")
        return np.clip(x, self.x[0], self.x[-1])

    def at(self, name: str, x):
        """Interpolated ``u``, ``up``, ``v``, ``log_E``, ``log_F``, ``E`` or ``F`` at x."""
        if name in ("E", "F"):
            return np.exp(self.at("log_" + name, x))
        xc = self._check_range(x)
        idx = np.rint((xc - self.x[0]) / self.step).astype(int)
        on_grid = np.abs(self.x[np.clip(idx, 0, len(self.x) - 1)] - xc) < 1e-12
        out = np.asarray(self._spline(name)(xc), dtype=float)
        if np.any(on_grid):
            exact = getattr(self, name)[np.clip(idx, 0, len(self.x) - 1)]
            out = np.where(on_grid, exact, out)
        return float(out) if out.ndim == 0 else out


def _numerov_system(u, x, h):
    f = 2 * u**3 + x * u
    df = 6 * u**2 + x
    c = h * h / 12.0
    res = u[2:] - 2 * u[1:-1] + u[:-2] - c * (f[2:] + 10 * f[1:-1] + f[:-2])
    lower = 1 - c * df[:-2]
    diag = -2 - 10 * c * df[1:-1]
    upper = 1 - c * df[2:]
    return res, lower, diag, upper


def hastings_mcleod(x_grid: np.ndarray | None = None, max_iter: int = 60, tol: float = 1e-11) -> PainleveTableau:
    """Hastings-McLeod solution on a uniform grid inside [-15, 10].

    Numerov collocation with the Airy value pinned on the right and the
    four-term asymptotic expansion on the left, solved by damped Newton from
    the glued guess ``max(Ai(x), sqrt(-x/2))``.  Then ``v``, ``log E`` and
    ``log F`` by cumulative Simpson quadrature plus exact Airy tails beyond the
    right end.

    Raises
    ------
    NumericError
        If Newton does not converge.
    """
    x = default_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size < 50:
        raise ConfigurationError("x_grid must be a 1-D grid with at least 50 points")
    h = float(x[1] - x[0])
    if np.abs(np.diff(x) - h).max() > 1e-9 * abs(h) or h <= 0:
        raise ConfigurationError("x_grid must be uniform and ascending")
    if x[0] < -15 - 1e-9 or x[-1] > 10 + 1e-9 or x[0] > -4 or x[-1] < 4:
        raise ConfigurationError("x_grid must lie within [-15, 10] and cover [-4, 4]")

    ai, aip, _, _ = scipy.special.airy(x)
    u = np.maximum(ai, np.sqrt(np.clip(-x, 0, None) / 2.0))
    u[0] = float(left_asymptotic(x[0]))
    u[-1] = ai[-1]
    norm = np.inf
    for _ in range(max_iter):
        res, lo, di, up = _numerov_system(u, x, h)
        norm = float(np.abs(res).max())
        ab = np.zeros((3, res.size))
        ab[0, 1:] = up[:-1]
        ab[1] = di
        ab[2, :-1] = lo[1:]
        du = scipy.linalg.solve_banded((1, 1), ab, -res)
        step = float(np.abs(du).max())
        t = 1.0
        while True:
            trial = u.copy()
            trial[1:-1] += t * du
            if t < 1e-4 or np.abs(_numerov_system(trial, x, h)[0]).max() <= max((1 - 0.25 * t) * norm, 1e-15):
                break
            t *= 0.5
        u = trial
        if t == 1.0 and step < tol:
            break
    else:
        raise NumericError("Hastings-McLeod Newton iteration did not converge", norm / (h * h))
    norm = float(np.abs(_numerov_system(u, x, h)[0]).max())
    up = _derivative(u, h)
    # right-end tails from the Airy asymptotics (u = Ai to ~Ai^3 there)
    xb = x[-1]
    ai_b, aip_b, _, _ = scipy.special.airy(xb)
    # scipy.special.itairy loses accuracy for large arguments, so integrate directly
    tail_u = scipy.integrate.quad(lambda y: scipy.special.airy(y)[0], xb, np.inf, epsabs=1e-30, epsrel=1e-13)[0]
    tail_u2 = aip_b**2 - xb * ai_b**2
    tail_v = scipy.integrate.quad(
        lambda y: scipy.special.airy(y)[1] ** 2 - y * scipy.special.airy(y)[0] ** 2,
        xb,
        np.inf,
        epsabs=1e-30,
        epsrel=1e-13,
    )[0]
    v = tail_u2 + _cumulative_from_right(u * u, h)
    int_u = tail_u + _cumulative_from_right(u, h)
    int_v = tail_v + _cumulative_from_right(v, h)
    return PainleveTableau(x, u, up, v, -int_u, -int_v, norm / (h * h))


def _derivative(u: np.ndarray, h: float) -> np.ndarray:
    """Sixth-order central differences, one-sided near the ends."""
    d = np.empty_like(u)
    c = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0
    d[3:-3] = (c[0] * u[:-6] + c[1] * u[1:-5] + c[2] * u[2:-4] + c[4] * u[4:-2] + c[5] * u[5:-1] + c[6] * u[6:]) / h
    # one-sided sixth-order stencils for the three points at each end
    for i in range(3):
        w = _fd_weights(np.arange(7) - i, 1)
        d[i] = np.dot(w, u[:7]) / h
        w = _fd_weights(np.arange(-6, 1) + i, 1)
        d[-1 - i] = np.dot(w, u[-7:]) / h
    return d


def _fd_weights(offsets: np.ndarray, order: int) -> np.ndarray:
    k = len(offsets)
    A = np.vander(offsets.astype(float), k, increasing=True).T
    b = np.zeros(k)
    b[order] = math.factorial(order)
    return np.linalg.solve(A, b)


def _cumulative_from_right(y: np.ndarray, h: float) -> np.ndarray:
    """``int_{x_i}^{x_end} y`` by cumulative Simpson."""
    rev = y[::-1]
    c = scipy.integrate.cumulative_simpson(rev, dx=h, initial=0.0)
    return c[::-1]


@lru_cache(maxsize=4)
def default_tableau() -> PainleveTableau:
    """Tableau on the default grid [-12, 8] with step 1e-3 (cached)."""
    return hastings_mcleod()


# ---------------------------------------------------------------------------
# Lax pair
# ---------------------------------------------------------------------------


def _w_rhs(x, u, up):
    def rhs(w, y):
        f, g = y
        return [u * u * f - (w * u + up) * g, (-w * u + up) * f + (w * w - x - u * u) * g]

    return rhs


def _riccati_rhs(x, u, up):
    def rhs(w, rho):
        return [(up - w * u) + (w * w - x - 2 * u * u) * rho[0] + (w * u + up) * rho[0] ** 2]

    return rhs


def lax_fg(tableau: PainleveTableau, x: float, w: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """``f(x, w)`` and ``g(x, w)`` for one x and an array of w.

    The w-equation is integrated from ``w = 0`` where it is non-expanding.
    Beyond ``w_s = sqrt(max(x + 2u^2, 0))`` the growing mode ``~exp(w^3/3)``
    would swamp the forward solution, so there ``rho = g/f`` is obtained
    from its Riccati equation integrated downward from far out (where the
    bounded solution is the attracting one) and ``f`` by quadrature of
    ``f'/f = u^2 - (wu + u') rho``.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    u = float(tableau.at("u", x))
    up = float(tableau.at("up", x))
    e0 = float(tableau.at("E", x))
    f = np.empty_like(w)
    g = np.empty_like(w)
    ws = math.sqrt(max(x + 2 * u * u, 0.0))
    rhs = _w_rhs(x, u, up)

    def forward(targets):
        if targets.size == 0:
            return np.empty((2, 0))
        sign = 1.0 if targets.max() > 0 else -1.0
        order = np.argsort(sign * targets)
        tt = targets[order]
        end = tt[-1]
        if end == 0.0:
            return np.full((2, targets.size), e0)
        sol = scipy.integrate.solve_ivp(rhs, (0.0, end), [e0, e0], method="DOP853", t_eval=tt,
                                        rtol=ODE_RTOL, atol=ODE_ATOL)
        if not sol.success:
            raise NumericError(f"w-equation failed at x={x}: {sol.message}")
        out = np.empty((2, targets.size))
        out[:, order] = sol.y
        return out

    neg = w <= 0
    if np.any(neg):
        f[neg], g[neg] = forward(w[neg])
    mid = (w > 0) & (w <= ws)
    if np.any(mid):
        f[mid], g[mid] = forward(w[mid])
    big = w > ws
    if np.any(big):
        f0, g0 = forward(np.array([ws])) if ws > 0 else (np.array([e0]), np.array([e0]))
        f0, g0 = float(np.ravel(f0)[0]), float(np.ravel(g0)[0])
        wb = w[big]
        w_far = max(float(wb.max()) + 4.0, ws + 4.0, 6.0)
        grid = np.unique(np.concatenate([[ws], wb]))
        rsol = scipy.integrate.solve_ivp(
            _riccati_rhs(x, u, up), (w_far, ws), [u / w_far], method="DOP853",
            t_eval=grid[::-1], rtol=ODE_RTOL, atol=1e-16, dense_output=True,
        )
        if not rsol.success:
            raise NumericError(f"Riccati integration failed at x={x}: {rsol.message}")
        lsol = scipy.integrate.solve_ivp(
            lambda s, y: [u * u - (s * u + up) * float(rsol.sol(s)[0])],
            (ws, float(grid[-1])), [0.0], method="DOP853", t_eval=grid, rtol=ODE_RTOL, atol=1e-15,
        )
        if not lsol.success:
            raise NumericError(f"Lax quadrature failed at x={x}: {lsol.message}")
        logf = dict(zip(grid, lsol.y[0]))
        rho = dict(zip(rsol.t, rsol.y[0]))
        for i in np.flatnonzero(big):
            fi = f0 * math.exp(logf[w[i]])
            f[i] = fi
            g[i] = fi * rho[w[i]]
    return f, g


@dataclass(frozen=True)
class LaxPairField:
    """``f`` and ``g`` on the rectangle ``x_grid x w_values``."""

    x: np.ndarray
    w: np.ndarray
    f: np.ndarray
    g: np.ndarray


def lax_pair_field(tableau: PainleveTableau, x_grid, w_values) -> LaxPairField:
    """Evaluate the Lax pair functions on a rectangle of (x, w) values."""
    xs = np.atleast_1d(np.asarray(x_grid, dtype=float))
    ws = np.atleast_1d(np.asarray(w_values, dtype=float))
    f = np.empty((xs.size, ws.size))
    g = np.empty((xs.size, ws.size))
    for i, xv in enumerate(xs):
        f[i], g[i] = lax_fg(tableau, float(xv), ws)
    return LaxPairField(xs, ws, f, g)


def lax_x_transport(tableau: PainleveTableau, w: float, x_start: float, x_end: float, fg0) -> np.ndarray:
    """Integrate ``f_x = u g, g_x = u f - w g`` at fixed w from ``x_start`` to ``x_end``."""

    def rhs(xv, y):
        uu = float(tableau.at("u", xv))
        return [uu * y[1], uu * y[0] - w * y[1]]

    sol = scipy.integrate.solve_ivp(rhs, (x_start, x_end), list(fg0), method="DOP853", rtol=ODE_RTOL, atol=1e-16)
    if not sol.success:
        raise NumericError(f"x-equation failed: {sol.message}")
    return sol.y[:, -1]


# ---------------------------------------------------------------------------
# Baik's determinant
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _derivative_polynomials(r: int):
    """Coefficients ``(P_j, Q_j)`` with ``(w + d_x)^j f = P_j f + Q_j g``, j < r.

    Expanded symbolically using ``f_x = u g``, ``g_x = u f - w g``,
    ``u_x = u'`` and ``u'_x = 2u^3 + xu``.
    """
    import sympy as sp

    X, U, UP, W = sp.symbols("x u up w")

    def dx(expr):
        return sp.diff(expr, X) + sp.diff(expr, U) * UP + sp.diff(expr, UP) * (2 * U**3 + X * U)

    P, Q = sp.Integer(1), sp.Integer(0)
    out = []
    for _ in range(r):
        out.append((P, Q))
        # (w + d_x)(P f + Q g) = (wP + P_x + Q u) f + (wQ + Q_x + P u - w Q) g
        P, Q = sp.expand(W * P + dx(P) + Q * U), sp.expand(dx(Q) + P * U)
    return [(sp.lambdify((X, U, UP, W), p, "math"), sp.lambdify((X, U, UP, W), q, "math")) for p, q in out]


def baik_F2(tableau: PainleveTableau, field: LaxPairField | None, x: float, w: Sequence[float],
            confluent_eps: float = CONFLUENT_EPS) -> float:
    """``F_2(x; w_1..w_r)`` by Baik's determinant formula.

    ``field`` may hold precomputed ``f, g`` values; points it does not cover
    are computed on demand.

    Raises
    ------
    DomainError
        If two w's are closer than ``confluent_eps`` (the formula degenerates;
        jitter the w's or drop to a lower rank).
    """
    w = [float(v) for v in w]
    r = len(w)
    if r == 0:
        raise ConfigurationError("need at least one w")
    if any(not math.isfinite(v) for v in w):
        raise DomainError("Baik's formula needs finite w; use the reduced rank for w = inf")
    ws = sorted(w)
    if r > 1 and min(b - a for a, b in zip(ws, ws[1:])) < confluent_eps:
        raise DomainError("w values closer than the confluent guard; jitter them or reduce r")
    f, g = _lookup_fg(tableau, field, x, np.array(w))
    u = float(tableau.at("u", x))
    up = float(tableau.at("up", x))
    polys = _derivative_polynomials(r)
    M = np.empty((r, r))
    for i in range(r):
        for j, (P, Q) in enumerate(polys):
            M[i, j] = P(x, u, up, w[i]) * f[i] + Q(x, u, up, w[i]) * g[i]
    vander = 1.0
    for i in range(r):
        for j in range(i + 1, r):
            vander *= w[j] - w[i]
    return float(tableau.at("F", x)) * float(np.linalg.det(M)) / vander


def _lookup_fg(tableau, field, x, w):
    if field is not None:
        xi = np.flatnonzero(np.abs(field.x - x) < 1e-14)
        if xi.size:
            cols = [np.flatnonzero(np.abs(field.w - wv) < 1e-14) for wv in w]
            if all(c.size for c in cols):
                idx = [int(c[0]) for c in cols]
                return field.f[xi[0], idx], field.g[xi[0], idx]
    return lax_fg(tableau, x, w)


def make_F2(tableau: PainleveTableau | None = None) -> Callable[[float, Sequence[float]], float]:
    """Callable ``(x, w) -> F_2(x; w)``; w = inf entries reduce the rank.

    Coincident w's (closer than ``CONFLUENT_SPLIT``) are split symmetrically
    by ``+-delta/2`` and Richardson-extrapolated from ``delta`` and ``2 delta``;
    F is symmetric and smooth in w, so the split error is O(delta^4).
    """
    tab = default_tableau() if tableau is None else tableau

    def split(ws, delta):
        out = list(ws)
        i = 0
        while i < len(out):
            j = i
            while j + 1 < len(out) and out[j + 1] - out[i] < CONFLUENT_SPLIT:
                j += 1
            m = j - i + 1
            if m > 1:
                centre = sum(out[i : j + 1]) / m
                for t in range(m):
                    out[i + t] = centre + delta * (t - (m - 1) / 2)
            i = j + 1
        return out

    def F2(x, w):
        finite = sorted(v for v in w if math.isfinite(v))
        if not finite:
            return float(tab.at("F", x))
        if len(finite) == 1 or min(b - a for a, b in zip(finite, finite[1:])) >= CONFLUENT_SPLIT:
            return baik_F2(tab, None, float(x), finite)
        f1 = baik_F2(tab, None, float(x), split(finite, CONFLUENT_SPLIT))
        f2 = baik_F2(tab, None, float(x), split(finite, 2 * CONFLUENT_SPLIT))
        return (4 * f1 - f2) / 3

    return F2


def pde_residual(F_eval: Callable, x: float, w: Sequence[float], beta: int = 2,
                 hx: float = 1e-3, hw: float = 1e-3) -> float:
    """Central-difference residual of the boundary-value PDE at (x, w).

    ``r F_x + sum_i [(2/beta) F_{w_i w_i} + (x - w_i^2) F_{w_i}]
    + sum_{i<j} 2/(w_i - w_j) (F_{w_i} - F_{w_j})``.
    """
    w = np.asarray(w, dtype=float)
    r = w.size
    f0 = F_eval(x, w)
    fx = (F_eval(x + hx, w) - F_eval(x - hx, w)) / (2 * hx)
    grad = np.empty(r)
    total = r * fx
    for i in range(r):
        e = np.zeros(r)
        e[i] = hw
        fp, fm = F_eval(x, w + e), F_eval(x, w - e)
        grad[i] = (fp - fm) / (2 * hw)
        second = (fp - 2 * f0 + fm) / (hw * hw)
        total += (2.0 / beta) * second + (x - w[i] ** 2) * grad[i]
    for i in range(r):
        for j in range(i + 1, r):
            total += 2.0 / (w[i] - w[j]) * (grad[i] - grad[j])
    return float(total)


def tracy_widom_F2(x) -> np.ndarray:
    """``F(x)`` from the default tableau (the beta = 2 Tracy-Widom law)."""
    return default_tableau().at("F", x)


def tracy_widom_F1(x) -> np.ndarray:
    """``sqrt(F(x) E(x))``, the beta = 1 Tracy-Widom law (r = 1, Dirichlet)."""
    tab = default_tableau()
    return np.sqrt(tab.at("F", x) * tab.at("E", x))
