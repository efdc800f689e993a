"""Finite-difference multivariate stochastic Airy operator and its Riccati count.

The operator ``-d^2/dx^2 + sqrt(2) B'_x + r x`` on ``F^r``-valued functions on
``[0, L)`` with ``f'(0) = W f(0)`` is discretized on ``x_j = j h`` as a block
tridiagonal matrix with ``r x r`` blocks,

    diagonal  (2/h^2) I + slope x_j I + sqrt(2) dB_j / h,
    off-diag  -(1/h^2) I,

and a Dirichlet wall at ``x = L``.  W is diagonal with entries ``w_i`` in
``(-inf, +inf]``.  At ``x_0 = 0`` a ghost point gives Robin components the
corner entry ``1/h^2 + w_i/h``; Dirichlet components (``w_i = +inf``) are
removed from node 0.  Unknowns are ordered node by node, the Robin components
of node 0 first, so the F-bandwidth is r.

:func:`riccati_explosion_count` runs the discrete conjoined-basis recursion on
the same noise and counts focal points through the inertia of
``F_j^dagger F_{j+1}``, which equals the number of eigenvalues below lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .algebra import (
    ConfigurationError,
    NumericError,
    block_size,
    check_beta,
    embed,
    real_dtype,
)
from .banded import BandedHermitian, embedded_bandwidth
from .ensembles import SpikeConfig

LAMBDA_JITTER = 1e-12


@dataclass(frozen=True)
class DiscreteAiry:
    """A sampled discretization of the multivariate stochastic Airy operator.

    Attributes
    ----------
    beta, r : int
        Symmetry class and rank.
    W : SpikeConfig
        Boundary eigenvalues ``w_1 <= ... <= w_r`` (``inf`` = Dirichlet).
    h, L : float
        Step and domain length; nodes ``x_j = j h`` for ``j < N = round(L/h)``.
    noise : ndarray
        Embedded ``(N, r d, r d)`` self-adjoint increments ``dB_j``.
    slope : float
        Coefficient of the potential (r unless overridden).
    """

    beta: int
    r: int
    W: SpikeConfig
    h: float
    L: float
    noise: np.ndarray
    slope: float

    @property
    def N(self) -> int:
        return self.noise.shape[0]

    @property
    def n_robin(self) -> int:
        return self.r - self.W.n_dirichlet

    @property
    def x(self) -> np.ndarray:
        return self.h * np.arange(self.N)

    def potential_blocks(self) -> np.ndarray:
        """Embedded ``V_j = slope x_j I + sqrt(2) dB_j / h``."""
        d = block_size(self.beta)
        eye = np.eye(self.r * d)
        return self.slope * self.x[:, None, None] * eye + math.sqrt(2.0) * self.noise / self.h

    def assemble(self) -> BandedHermitian:
        """The block tridiagonal matrix in band storage (size ``(n_R + (N-1) r)``)."""
        beta, r, h = self.beta, self.r, self.h
        d = block_size(beta)
        rd = r * d
        nr = self.n_robin
        m2 = 1.0 / (h * h)
        V = self.potential_blocks()
        n_f = nr + (self.N - 1) * r
        kd = embedded_bandwidth(beta, r)
        ab = np.zeros((kd + 1, n_f * d), dtype=real_dtype(beta))
        # node 0: Robin sub-block
        nrd = nr * d
        if nr:
            wr = np.repeat(np.array(self.W.w[:nr]), d)
            blk0 = V[0, :nrd, :nrd] + np.diag(m2 + wr / h)
            for a in range(nrd):
                for b in range(a + 1):
                    ab[a - b, b] = blk0[a, b]
            ab[nrd, :nrd] = -m2
        # interior nodes 1..N-1
        D = V[1:] + 2 * m2 * np.eye(rd)
        base = nrd + rd * np.arange(self.N - 1)
        for a in range(rd):
            for b in range(a + 1):
                ab[a - b, base + b] = D[:, a, b]
        ab[rd, nrd : n_f * d - rd] = -m2
        return BandedHermitian(beta, n_f, r, ab)


def _sample_noise(rng, beta: int, r: int, n_nodes: int, h: float) -> np.ndarray:
    """``n_nodes`` embedded matrix Brownian increments over cells of width h.

    Draw order: all diagonal normals, then the strictly-lower F entries.
    """
    comps = np.zeros((n_nodes, r, r, beta))
    diag = np.asarray(rng.normal((n_nodes, r)), dtype=float) * math.sqrt(2.0 * h / beta)
    idx = np.arange(r)
    comps[:, idx, idx, 0] = diag
    lo_i, lo_j = np.tril_indices(r, -1)
    if lo_i.size:
        off = np.asarray(rng.normal((n_nodes, lo_i.size, beta)), dtype=float) * math.sqrt(h / beta)
        comps[:, lo_i, lo_j, :] = off
        conj = off.copy()
        conj[..., 1:] *= -1
        comps[:, lo_j, lo_i, :] = conj
    return embed(comps, beta)


def discretize(rng, beta: int, r: int, W, h: float = 0.01, L: float = 15.0, *,
               zero_noise: bool = False, slope: float | None = None,
               noise: np.ndarray | None = None) -> tuple[DiscreteAiry, BandedHermitian]:
    """Sample a discretized operator and assemble its band matrix.

    Parameters
    ----------
    rng : Rng
        Source of the matrix Brownian increments (unused with ``zero_noise`` or
        explicit ``noise``).
    W : SpikeConfig or sequence of float
        Boundary eigenvalues, ascending, ``inf`` allowed.
    h, L : float
        Step (``<= 0.1``) and domain length (``>= 10``).
    zero_noise : bool
        Drop the noise (deterministic Airy operator).
    slope : float, optional
        Potential coefficient; defaults to r.
    noise : ndarray, optional
        Explicit embedded increments of shape ``(round(L/h), r d, r d)``.
    """
    beta = check_beta(beta)
    spike = W if isinstance(W, SpikeConfig) else SpikeConfig(tuple(W))
    if spike.r != r:
        raise ConfigurationError(f"W has {spike.r} entries, expected r={r}")
    if not (0 < h <= 0.1) or L < 10:
        raise ConfigurationError("need 0 < h <= 0.1 and L >= 10")
    n_nodes = int(round(L / h))
    d = block_size(beta)
    if noise is not None:
        noise = np.asarray(noise)
        if noise.shape != (n_nodes, r * d, r * d):
            raise ConfigurationError(f"noise shape {noise.shape} != {(n_nodes, r * d, r * d)}")
    elif zero_noise:
        noise = np.zeros((n_nodes, r * d, r * d), dtype=real_dtype(beta))
    else:
        noise = _sample_noise(rng, beta, r, n_nodes, h)
    op = DiscreteAiry(beta, r, spike, float(h), float(L), noise, float(r if slope is None else slope))
    return op, op.assemble()


# ---------------------------------------------------------------------------
# Riccati / focal-point count
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _negatives(a, tol):
    ev = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    c = 0
    for e in ev:
        if abs(e) <= tol:
            return -1
        if e < 0:
            c += 1
    return c


@numba.njit(cache=True)
def _riccati_count(V, wdiag, nrd, h, lam):
    """Focal-point count; -1 if a pivot is numerically singular."""
    N = V.shape[0]
    rd = V.shape[1]
    F = np.zeros((rd, rd), dtype=np.complex128)
    G = np.zeros((rd, rd), dtype=np.complex128)
    for i in range(nrd):
        F[i, i] = 1.0
    for i in range(rd):
        G[i, i] = wdiag[i]
    # node 0: only the Robin rows see the potential
    for i in range(nrd):
        for j in range(nrd):
            G[i, j] += h * V[0, i, j]
        G[i, i] -= h * lam
    Fn = F + h * G
    count = 0
    if nrd > 0:
        c = _negatives(Fn[:nrd, :nrd], 1e-13)
        if c < 0:
            return -1
        count += c
    F = Fn
    eye = np.eye(rd, dtype=np.complex128)
    for j in range(1, N):
        G = G + h * ((V[j] - lam * eye) @ F)
        Fn = F + h * G
        scale = np.abs(F).max() * np.abs(Fn).max()
        c = _negatives(F.conj().T @ Fn, 1e-13 * scale)
        if c < 0:
            return -1
        count += c
        F = Fn
        # common right factor keeps (F, G) well scaled
        if np.abs(F).max() > 1e4 or np.abs(G).max() > 1e4:
            stack = np.empty((2 * rd, rd), dtype=np.complex128)
            stack[:rd] = F
            stack[rd:] = G
            q, rr = np.linalg.qr(stack)
            F = np.ascontiguousarray(q[:rd])
            G = np.ascontiguousarray(q[rd:])
    return count


def riccati_explosion_count(op: DiscreteAiry, lam: float, max_retries: int = 8) -> int:
    """Number of focal points of the conjoined basis on ``(0, L)`` at level lambda.

    Equals the number of eigenvalues of ``op.assemble()`` strictly below
    ``lam``.  A numerically singular ``F_j`` is handled by re-running at
    ``lam +- k * 1e-12 * (1 + |lam|)``.
    """
    d = block_size(op.beta)
    V = np.ascontiguousarray(op.potential_blocks().astype(np.complex128))
    wdiag = np.concatenate([np.repeat(np.array(op.W.w[: op.n_robin], dtype=float), d),
                            np.ones((op.r - op.n_robin) * d)])
    nrd = op.n_robin * d
    lam = float(lam)
    for k in range(max_retries + 1):
        shift = 0.0 if k == 0 else LAMBDA_JITTER * (1 + abs(lam)) * ((k + 1) // 2) * (1 if k % 2 else -1)
        c = _riccati_count(V, wdiag, nrd, op.h, lam + shift)
        if c >= 0:
            return int(c) // d
    raise NumericError(f"Riccati recursion singular at every jittered level near {lam}")


def smallest_eigenvalues(op_matrix: BandedHermitian, k: int) -> np.ndarray:
    """The k lowest eigenvalues ``Lambda_0 <= ...`` of an assembled operator."""
    from .edge_solver import smallest_eigs_banded

    return smallest_eigs_banded(op_matrix, k)


def sample_airy_eigenvalues(rng, beta: int, r: int, W, k: int = 1, h: float = 0.01, L: float = 15.0) -> np.ndarray:
    """Lowest k eigenvalues of one sampled discretized operator."""
    _, H = discretize(rng, beta, r, W, h, L)
    return smallest_eigenvalues(H, k)
