"""Monte Carlo of the explosion-counting Dyson diffusion.

Particles ``p_1 < ... < p_r`` follow

    dp_i = (2/sqrt(beta)) db_i + (r x - p_i^2 + sum_{j != i} 2/(p_i - p_j)) dx

from ``p(x_0) = w``.  A particle reaching ``-inf`` re-enters at ``+inf``
(an explosion), and ``F_beta^k(x; w)`` is the probability of at most k
explosions on ``[x/r, inf)``.

Near infinity a particle is carried in the inverted chart ``q = 1/p``, where
by Ito

    dq = (1 - r x q^2 + (4/beta) q^3 - q^2 sum_j 2/(p_i - p_j)) dx - (2/sqrt(beta)) q^2 db,

which is regular at ``q = 0``; an explosion is ``q`` crossing 0 from below.
Time stepping is Euler-Maruyama with ``dt = dt_base min(1, gap^2/4, 1/p_max^2)``
and Brownian-bridge step halving when a step would break the ordering.
Gaps below ``GAP_FLOOR`` no longer shrink the step, and a step still
breaking the order after ``MAX_HALVINGS`` splits is accepted with the
particles re-sorted (a reflection).  At beta = 1 the gaps come arbitrarily
close, so reflections do occur; their number is reported.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .algebra import ConfigurationError, NumericError, Rng, check_beta
from .ensembles import SpikeConfig

CHART_M = 10.0
CHART_HYSTERESIS = 1.5
DEFAULT_DT_BASE = 1e-3
DEFAULT_HORIZON = 12.0
TIE_SPREAD = 4e-3
INF_TIE_SPREAD = 1e-8
MAX_HALVINGS = 20
GAP_FLOOR = 1e-3
MAX_DISCARD_FRACTION = 1e-3
STATUS_OK = 0
STATUS_DISCARDED = 1
THREADS_ENV = "SPIKED_EDGE_WORKERS"

DIRECT = 0
INVERTED = 1


@dataclass(frozen=True)
class ParticleState:
    """State of the diffusion at time x.

    ``coords[i]`` is ``p_i`` for a particle in the direct chart and
    ``q_i = 1/p_i`` in the inverted chart.  ``order`` lists labels by
    ascending ``p``; ``chamber`` counts explosions so far.
    """

    x: float
    coords: tuple
    chart: tuple
    order: tuple
    chamber: int

    def p_values(self) -> np.ndarray:
        out = np.empty(len(self.coords))
        for i, (y, c) in enumerate(zip(self.coords, self.chart)):
            out[i] = y if c == DIRECT else (math.inf if y == 0 else 1.0 / y)
        return out


@dataclass(frozen=True)
class DistributionEstimate:
    """Monte Carlo estimates of ``F_beta^k(x; w)`` on a grid of x."""

    x_grid: np.ndarray
    w: SpikeConfig
    k: int
    beta: int
    estimates: np.ndarray
    stderr: np.ndarray
    N: np.ndarray
    discarded: np.ndarray

    def rows(self):
        for x, e, s, n in zip(self.x_grid, self.estimates, self.stderr, self.N):
            yield float(x), float(e), float(s), int(n)


def horizon_end(x0: float, horizon: float = DEFAULT_HORIZON) -> float:
    return max(x0, 0.0) + horizon


def _spread_ties(finite: list[float], spread: float) -> list[float]:
    """Spread runs of values closer than ``spread`` symmetrically about their mean."""
    out = list(finite)
    tight = spread * (1 - 1e-9)
    while any(b - a < tight for a, b in zip(out, out[1:])):
        start = 0
        for i in range(1, len(out) + 1):
            if i < len(out) and out[i] - out[i - 1] < tight:
                continue
            m = i - start
            if m > 1:
                centre = sum(out[start:i]) / m
                out[start:i] = [centre + spread * (t - (m - 1) / 2) for t in range(m)]
            start = i
    return out


def initial_state(w, M: float = CHART_M):
    """Coordinates and charts at the entrance point ``p = w``.

    Finite values closer than ``TIE_SPREAD`` (above the step-size gap floor)
    are spread symmetrically about their mean with that spacing; F is smooth
    and symmetric in w, so the error is second order.  ``w = inf`` particles
    start at ``q = 0`` (top) and ``q = k * 1e-8`` below it.
    """
    w = [float(v) for v in w]
    r = len(w)
    y = np.zeros(r)
    ch = np.zeros(r, dtype=np.int64)
    finite = _spread_ties(sorted(v for v in w if math.isfinite(v)), TIE_SPREAD)
    n_inf = r - len(finite)
    for i, v in enumerate(finite):
        if abs(v) > M:
            y[i], ch[i] = 1.0 / v, INVERTED
        else:
            y[i] = v
    for t in range(n_inf):
        i = len(finite) + t
        y[i] = INF_TIE_SPREAD * (n_inf - 1 - t)
        ch[i] = INVERTED
    return y, ch


@numba.njit(cache=True, error_model="numpy", inline="always")
def _p_of(y, c):
    if c == 0:
        return y
    if y == 0.0:
        return np.inf
    return 1.0 / y


@numba.njit(cache=True, error_model="numpy", inline="always")
def _auto_dt(y, ch, order, v, dt_base):
    r = y.shape[1]
    f = 1.0
    for a in range(r):
        i = order[v, a]
        if ch[v, i] == 0:
            yy = y[v, i] * y[v, i]
            if yy * f > 1.0:
                f = 1.0 / yy
        if a + 1 < r:
            j = order[v, a + 1]
            gap = _p_of(y[v, j], ch[v, j]) - _p_of(y[v, i], ch[v, i])
            if gap < GAP_FLOOR:
                gap = GAP_FLOOR
            if gap < np.inf and gap * gap / 4.0 < f:
                f = gap * gap / 4.0
    return dt_base * f


@numba.njit(cache=True, error_model="numpy", inline="always")
def _try_step(y, ch, order, v, x, dt, dW, slope, beta, noise_scale, ynew):
    """Euler step of variant v into ``ynew[v]``.

    Returns the exploded label (-1 none), -3 if the step breaks the cyclic
    order and -2 if it is not finite.
    """
    r = y.shape[1]
    sig = noise_scale * 2.0 / math.sqrt(beta)
    for i in range(r):
        # drift in the particle's own chart; the interaction term is
        # sum_j 2/(p_i - p_j) rewritten in the charts of i and j
        yi = y[v, i]
        ci = ch[v, i]
        inter = 0.0
        for j in range(r):
            if j == i:
                continue
            yj = y[v, j]
            if ci == 0:
                if ch[v, j] == 0:
                    inter += 2.0 / (yi - yj)
                else:
                    inter += 2.0 * yj / (yi * yj - 1.0)
            elif ch[v, j] == 0:
                inter += 2.0 * yi / (1.0 - yi * yj)
            else:
                inter += 2.0 * yi * yj / (yj - yi)
        if ci == 0:
            yn = yi + (slope * x - yi * yi + inter) * dt + sig * dW[i]
        else:
            y2 = yi * yi
            yn = yi + (1.0 - slope * x * y2 + (4.0 / beta) * y2 * yi - y2 * inter) * dt - sig * y2 * dW[i]
        if not (abs(yn) < np.inf):
            return -2
        ynew[v, i] = yn
    exploded = -1
    for i in range(r):
        if ch[v, i] == 1 and y[v, i] < 0.0 and ynew[v, i] >= 0.0:
            if exploded >= 0 or i != order[v, 0]:
                return -3
            exploded = i
    prev = -np.inf
    shift = 1 if exploded >= 0 else 0
    for a in range(r):
        lab = order[v, (a + shift) % r]
        pv = _p_of(ynew[v, lab], ch[v, lab])
        if not pv > prev:
            return -3
        prev = pv
    return exploded


@numba.njit(cache=True, error_model="numpy", inline="always")
def _reflect(y, ch, ynew, order, v, keys):
    """Accept an order-breaking step by re-sorting; returns the number of explosions."""
    r = y.shape[1]
    n = 0
    for i in range(r):
        if ch[v, i] == 1 and y[v, i] < 0.0 and ynew[v, i] >= 0.0:
            n += 1
        keys[i] = _p_of(ynew[v, i], ch[v, i])
    order[v] = np.argsort(keys, kind="mergesort")
    return n


@numba.njit(cache=True, error_model="numpy")
def _kernel(gen, y0, ch0, beta, slope, x0, x_end, dt_base, M, noise_scale, stop_after, max_halvings):
    """Joint simulation of V variants (rows of y0) driven by one noise path.

    A step that breaks the order of some variant is split by a Brownian
    bridge; after ``max_halvings`` splits it is accepted and that variant
    re-sorted (a reflection).  Returns (counts, status, x, y, ch, order,
    steps, rejections, reflections).
    """
    V = y0.shape[0]
    r = y0.shape[1]
    y = y0.copy()
    ch = ch0.copy()
    order = np.empty((V, r), dtype=np.int64)
    keys = np.empty(r)
    for v in range(V):
        for i in range(r):
            keys[i] = _p_of(y[v, i], ch[v, i])
        order[v] = np.argsort(keys, kind="mergesort")
    counts = np.zeros(V, dtype=np.int64)
    depth = 2 * max_halvings + 2
    st_dt = np.empty(depth)
    st_lv = np.empty(depth, dtype=np.int64)
    st_dw = np.empty((depth, r))
    dW = np.empty(r)
    top = 0
    level = 0
    ynew = np.empty((V, r))
    expl = np.empty(V, dtype=np.int64)
    x = x0
    steps = 0
    rejections = 0
    reflections = 0
    inv_back = CHART_HYSTERESIS / M
    while x < x_end:
        if top == 0:
            dt = dt_base
            for v in range(V):
                dv = _auto_dt(y, ch, order, v, dt_base)
                if dv < dt:
                    dt = dv
            if x_end - x < dt:
                dt = x_end - x
            if dt <= 0.0:
                break
            level = 0
            sq = math.sqrt(dt)
            for i in range(r):
                dW[i] = sq * gen.standard_normal()
        else:
            top -= 1
            dt = st_dt[top]
            level = st_lv[top]
            for i in range(r):
                dW[i] = st_dw[top, i]
        broken = False
        for v in range(V):
            e = _try_step(y, ch, order, v, x, dt, dW, slope, beta, noise_scale, ynew)
            if e == -2:
                return counts, 1, x, y, ch, order, steps, rejections, reflections
            if e == -3:
                broken = True
            expl[v] = e
        if broken and level < max_halvings:
            rejections += 1
            # Brownian bridge split: second half below the first on the stack
            sq = math.sqrt(dt) * 0.5
            for i in range(r):
                first = 0.5 * dW[i] + sq * gen.standard_normal()
                st_dw[top, i] = dW[i] - first
                st_dw[top + 1, i] = first
            st_dt[top] = 0.5 * dt
            st_dt[top + 1] = 0.5 * dt
            st_lv[top] = level + 1
            st_lv[top + 1] = level + 1
            top += 2
            continue
        x += dt
        steps += 1
        for v in range(V):
            if expl[v] == -3:
                reflections += 1
                counts[v] += _reflect(y, ch, ynew, order, v, keys)
            elif expl[v] >= 0:
                counts[v] += 1
                lab = order[v, 0]
                for a in range(r - 1):
                    order[v, a] = order[v, a + 1]
                order[v, r - 1] = lab
            for i in range(r):
                y[v, i] = ynew[v, i]
            for i in range(r):
                if ch[v, i] == 0:
                    if abs(y[v, i]) > M:
                        y[v, i] = 1.0 / y[v, i]
                        ch[v, i] = 1
                elif abs(y[v, i]) > inv_back:
                    y[v, i] = 1.0 / y[v, i]
                    ch[v, i] = 0
        if stop_after >= 0 and top == 0:
            done = True
            for v in range(V):
                if counts[v] <= stop_after:
                    done = False
            if done:
                break
    return counts, 0, x, y, ch, order, steps, rejections, reflections


@numba.njit(cache=True, error_model="numpy")
def _kernel_single(gen, y0, ch0, beta, slope, x0, x_end, dt_base, M, noise_scale, stop_after, max_halvings):
    """Single-path version of :func:`_kernel` (same arithmetic and draw order, faster).

    Returns (count, status, x, y, ch, order, steps, rejections, reflections).
    """
    r = y0.shape[0]
    y = y0.copy()
    ch = ch0.copy()
    keys = np.empty(r)
    for i in range(r):
        keys[i] = y[i] if ch[i] == 0 else (np.inf if y[i] == 0.0 else 1.0 / y[i])
    order = np.argsort(keys, kind="mergesort")
    ynew = np.empty(r)
    dW = np.empty(r)
    depth = 2 * max_halvings + 2
    st_dt = np.empty(depth)
    st_lv = np.empty(depth, dtype=np.int64)
    st_dw = np.empty((depth, r))
    top = 0
    level = 0
    x = x0
    steps = 0
    rejections = 0
    reflections = 0
    count = 0
    sig = noise_scale * 2.0 / math.sqrt(beta)
    inv_back = CHART_HYSTERESIS / M
    while x < x_end:
        if top == 0:
            f = 1.0
            for a in range(r):
                i = order[a]
                if ch[i] == 0:
                    yy = y[i] * y[i]
                    if yy * f > 1.0:
                        f = 1.0 / yy
                if a + 1 < r:
                    j = order[a + 1]
                    pj = y[j] if ch[j] == 0 else (np.inf if y[j] == 0.0 else 1.0 / y[j])
                    pi = y[i] if ch[i] == 0 else (np.inf if y[i] == 0.0 else 1.0 / y[i])
                    gap = pj - pi
                    if gap < GAP_FLOOR:
                        gap = GAP_FLOOR
                    if gap < np.inf and gap * gap * 0.25 < f:
                        f = gap * gap * 0.25
            dt = dt_base * f
            if x_end - x < dt:
                dt = x_end - x
            if dt <= 0.0:
                break
            level = 0
            sq = math.sqrt(dt)
            for i in range(r):
                dW[i] = sq * gen.standard_normal()
        else:
            top -= 1
            dt = st_dt[top]
            level = st_lv[top]
            for i in range(r):
                dW[i] = st_dw[top, i]
        for i in range(r):
            yi = y[i]
            ci = ch[i]
            inter = 0.0
            for j in range(r):
                if j == i:
                    continue
                yj = y[j]
                if ci == 0:
                    if ch[j] == 0:
                        inter += 2.0 / (yi - yj)
                    else:
                        inter += 2.0 * yj / (yi * yj - 1.0)
                elif ch[j] == 0:
                    inter += 2.0 * yi / (1.0 - yi * yj)
                else:
                    inter += 2.0 * yi * yj / (yj - yi)
            if ci == 0:
                yn = yi + (slope * x - yi * yi + inter) * dt + sig * dW[i]
            else:
                y2 = yi * yi
                yn = yi + (1.0 - slope * x * y2 + (4.0 / beta) * y2 * yi - y2 * inter) * dt - sig * y2 * dW[i]
            if not (abs(yn) < np.inf):
                return count, 1, x, y, ch, order, steps, rejections, reflections
            ynew[i] = yn
        bad = False
        expl = -1
        for i in range(r):
            if ch[i] == 1 and y[i] < 0.0 and ynew[i] >= 0.0:
                if expl >= 0 or i != order[0]:
                    bad = True
                expl = i
        prev = -np.inf
        sh = 1 if expl >= 0 else 0
        for a in range(r):
            idx = a + sh
            if idx >= r:
                idx -= r
            lab = order[idx]
            yl = ynew[lab]
            pv = yl if ch[lab] == 0 else (np.inf if yl == 0.0 else 1.0 / yl)
            if not pv > prev:
                bad = True
            prev = pv
        if bad and level < max_halvings:
            rejections += 1
            sq = math.sqrt(dt) * 0.5
            for i in range(r):
                first = 0.5 * dW[i] + sq * gen.standard_normal()
                st_dw[top, i] = dW[i] - first
                st_dw[top + 1, i] = first
            st_dt[top] = 0.5 * dt
            st_dt[top + 1] = 0.5 * dt
            st_lv[top] = level + 1
            st_lv[top + 1] = level + 1
            top += 2
            continue
        x += dt
        steps += 1
        if bad:
            reflections += 1
            for i in range(r):
                if ch[i] == 1 and y[i] < 0.0 and ynew[i] >= 0.0:
                    count += 1
                yl = ynew[i]
                keys[i] = yl if ch[i] == 0 else (np.inf if yl == 0.0 else 1.0 / yl)
            order = np.argsort(keys, kind="mergesort")
        elif expl >= 0:
            count += 1
            lab = order[0]
            for a in range(r - 1):
                order[a] = order[a + 1]
            order[r - 1] = lab
        for i in range(r):
            y[i] = ynew[i]
        for i in range(r):
            if ch[i] == 0:
                if abs(y[i]) > M:
                    y[i] = 1.0 / y[i]
                    ch[i] = 1
            elif abs(y[i]) > inv_back:
                y[i] = 1.0 / y[i]
                ch[i] = 0
        if stop_after >= 0 and count > stop_after and top == 0:
            break
    return count, 0, x, y, ch, order, steps, rejections, reflections


def _generator(rng) -> np.random.Generator:
    if isinstance(rng, Rng):
        return rng.generator
    if isinstance(rng, (int, np.integer)):
        return Rng(int(rng)).generator
    return rng


def simulate_path(rng, beta: int, r: int, w, x0: float, x_end: float | None = None,
                  dt_base: float = DEFAULT_DT_BASE, *, zero_noise: bool = False,
                  stop_after: int = -1) -> tuple[int, ParticleState]:
    """Simulate one path from ``p(x0) = w`` to ``x_end``.

    Parameters
    ----------
    rng : Rng or numpy Generator
    w : sequence of float
        Ascending entrance values, ``inf`` allowed.
    x_end : float, optional
        Defaults to ``max(x0, 0) + 12``.
    stop_after : int
        Stop as soon as more than this many explosions occurred (-1: never).

    Returns
    -------
    (explosions, final ParticleState)

    Raises
    ------
    NumericError
        If the state becomes non-finite.
    """
    beta = check_beta(beta)
    spike = SpikeConfig(tuple(w))
    if spike.r != r:
        raise ConfigurationError(f"w has {spike.r} entries, expected r={r}")
    x_end = horizon_end(x0) if x_end is None else float(x_end)
    y0, ch0 = initial_state(spike.w)
    count, status, x, y, ch, order, *_ = _kernel_single(
        _generator(rng), y0, ch0, float(beta), float(r), float(x0), x_end, float(dt_base), CHART_M,
        0.0 if zero_noise else 1.0, int(stop_after), MAX_HALVINGS,
    )
    if status != STATUS_OK:
        raise NumericError(f"non-finite state at x={x:.6g}")
    state = ParticleState(float(x), tuple(float(v) for v in y), tuple(int(c) for c in ch),
                          tuple(int(o) for o in order), int(count))
    return int(count), state


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _run_chunk(args):
    (master, start, stop, beta, r, variants, x0, x_end, dt_base, stop_after, noise_scale) = args
    ys, chs = zip(*(initial_state(w) for w in variants))
    y0 = np.array(ys)
    ch0 = np.array(chs)
    out = np.empty((stop - start, len(variants)), dtype=np.int64)
    status = np.zeros(stop - start, dtype=np.int64)
    single = len(variants) == 1
    for t, rep in enumerate(range(start, stop)):
        gen = Rng(master, rep).generator
        args = (float(beta), float(r), x0, x_end, dt_base, CHART_M, noise_scale, stop_after, MAX_HALVINGS)
        if single:
            c, st, *_ = _kernel_single(gen, y0[0], ch0[0], *args)
            out[t, 0] = c
        else:
            counts, st, *_ = _kernel(gen, y0, ch0, *args)
            out[t] = counts
        status[t] = st
    return out, status


def explosion_counts(master_seed: int, beta: int, r: int, variants, x: float, N: int,
                     dt_base: float = DEFAULT_DT_BASE, stop_after: int = -1,
                     horizon: float = DEFAULT_HORIZON, workers: int | None = None,
                     zero_noise: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Explosion counts of N replicas for several entrance points on common noise.

    Replica i uses stream ``(master_seed, i)``, so results do not depend on
    ``workers``.  Returns ``(counts (N, V), discarded mask (N,))``.
    """
    beta = check_beta(beta)
    variants = [SpikeConfig(tuple(w)).w for w in variants]
    if any(len(w) != r for w in variants):
        raise ConfigurationError("every variant needs r entries")
    if N < 1:
        raise ConfigurationError("N must be positive")
    x0 = float(x) / r
    x_end = horizon_end(x0, horizon)
    workers = default_workers() if workers is None else max(1, int(workers))
    noise_scale = 0.0 if zero_noise else 1.0
    bounds = np.linspace(0, N, min(workers * 4, N) + 1 if workers > 1 else 2).astype(int)
    jobs = [(int(master_seed), int(a), int(b), beta, r, variants, x0, x_end, float(dt_base), int(stop_after),
             noise_scale) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]
    counts = np.concatenate([p[0] for p in parts])
    status = np.concatenate([p[1] for p in parts])
    return counts, status != STATUS_OK


def _binomial(success: np.ndarray):
    n = success.size
    p = float(success.mean()) if n else float("nan")
    return p, math.sqrt(max(p * (1 - p), 0.0) / n) if n else float("nan"), n


def estimate_F(rng, beta: int, r: int, w, k: int, x_grid, N: int, dt_base: float = DEFAULT_DT_BASE,
               workers: int | None = None, horizon: float = DEFAULT_HORIZON) -> DistributionEstimate:
    """Estimate ``F_beta^k(x; w)`` = P(at most k explosions from ``x/r``) on a grid.

    ``rng`` is an :class:`Rng` (its master seed is used) or an integer seed.
    Replica i reuses stream i at every grid point.  Discarded paths are
    excluded and counted; more than 0.1% raises :class:`NumericError`.
    """
    master = rng.master_seed if isinstance(rng, Rng) else int(rng)
    spike = w if isinstance(w, SpikeConfig) else SpikeConfig(tuple(w))
    xs = np.asarray(x_grid, dtype=float)
    if xs.ndim != 1 or np.any(np.diff(xs) < 0):
        raise ConfigurationError("x_grid must be ascending")
    if k < 0:
        raise ConfigurationError("k must be nonnegative")
    est, err, ns, disc = [], [], [], []
    for x in xs:
        counts, bad = explosion_counts(master, beta, r, [spike.w], float(x), N, dt_base, stop_after=k,
                                       horizon=horizon, workers=workers)
        if bad.mean() > MAX_DISCARD_FRACTION:
            raise NumericError(f"{bad.sum()} of {N} paths discarded at x={x}")
        p, s, n = _binomial(counts[~bad, 0] <= k)
        est.append(p)
        err.append(s)
        ns.append(n)
        disc.append(int(bad.sum()))
    return DistributionEstimate(xs, spike, int(k), int(beta), np.array(est), np.array(err), np.array(ns),
                                np.array(disc))


@dataclass(frozen=True)
class MonotonicityReport:
    """Common-noise explosion counts for an ordered family of entrance points."""

    variants: tuple
    x: float
    counts: np.ndarray
    discarded: np.ndarray
    violations: int

    @property
    def fraction_monotone(self) -> float:
        good = ~self.discarded
        return 1.0 - self.violations / max(int(good.sum()), 1)

    def estimates(self, k: int = 0) -> np.ndarray:
        good = ~self.discarded
        return (self.counts[good] <= k).mean(axis=0)


def estimate_F_monotonicity_suite(master_seed: int, beta: int, r: int, variants, x: float, N: int,
                                  dt_base: float = DEFAULT_DT_BASE, workers: int | None = None,
                                  horizon: float = DEFAULT_HORIZON) -> MonotonicityReport:
    """Check that explosion counts are nonincreasing along ``variants``.

    ``variants`` must be ordered componentwise ascending in w.  All variants
    are simulated on the same noise with a common step sequence (the
    smallest step any of them asks for).
    """
    vs = [SpikeConfig(tuple(w)).w for w in variants]
    for a, b in zip(vs, vs[1:]):
        if any(p > q for p, q in zip(a, b)):
            raise ConfigurationError("variants must be componentwise ascending")
    counts, bad = explosion_counts(master_seed, beta, r, vs, x, N, dt_base, horizon=horizon, workers=workers)
    good = counts[~bad]
    violations = int(np.sum(np.any(np.diff(good, axis=1) > 0, axis=1)))
    return MonotonicityReport(tuple(vs), float(x), counts, bad, violations)
