"""Edge-scaled operators and their low-lying spectrum.

The top eigenvalues of the band models are the bottom eigenvalues of

* Gaussian: ``H = (m^2 / sqrt n) (2 sqrt n - G)`` with ``m = n^{1/3}``,
* Wishart: ``H = (m^2 / sqrt(np)) ((sqrt n + sqrt p)^2 - S)`` with
  ``m = (sqrt(np) / (sqrt n + sqrt p))^{2/3}``,

so ``scale * (lambda_k - center) = -mu_k(H)``.  Bottom eigenvalues are found by
bisection on the inertia of the banded ``LDL^dagger`` factorisation of
``H - sigma``, which gives exact eigenvalue counts below any shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
import scipy.linalg

from .algebra import (
    ConfigurationError,
    DomainError,
    NumericError,
    block_size,
    coerce_self_adjoint,
)
from .banded import BandedHermitian
from .ensembles import SpikeConfig, sample_gaussian_band, sample_spiked_S

BISECTION_RTOL = 1e-12
SHIFT_JITTER = 1e-13


# ---------------------------------------------------------------------------
# Scalings and spike maps
# ---------------------------------------------------------------------------


def m_gaussian(n: int) -> float:
    """Grid factor ``m_n = n^{1/3}``."""
    return float(n) ** (1.0 / 3.0)


def m_wishart(n: int, p: int) -> float:
    """Grid factor ``m_{n,p} = (sqrt(np) / (sqrt n + sqrt p))^{2/3}``."""
    return (math.sqrt(n * p) / (math.sqrt(n) + math.sqrt(p))) ** (2.0 / 3.0)


def gaussian_P_from_w(w, n: int) -> np.ndarray:
    """Diagonal of ``P~ = 1 - n^{-1/3} W``; a Dirichlet direction gets ``P~ = 0``."""
    w = np.asarray(w, dtype=float)
    return np.where(np.isinf(w), 0.0, 1.0 - w / m_gaussian(n))


def wishart_Sigma_from_w(w, n: int, p: int) -> np.ndarray:
    """Diagonal of ``Sigma~ = 1 + sqrt(p/n) (1 - W / m_{n,p})``; Dirichlet gets 1.

    Raises
    ------
    DomainError
        If some finite ``w`` maps to a non-positive ``Sigma~`` entry.
    """
    w = np.asarray(w, dtype=float)
    finite = np.where(np.isinf(w), 0.0, w)
    sig = np.where(np.isinf(w), 1.0, 1.0 + math.sqrt(p / n) * (1.0 - finite / m_wishart(n, p)))
    if np.any(sig <= 0):
        raise DomainError(f"w={w.tolist()} gives a non-positive Sigma~ at n={n}, p={p}")
    return sig


# ---------------------------------------------------------------------------
# Scaled problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledEdgeProblem:
    """Scaled operator H with ``scale * (lambda_raw - center) = -mu(H)``."""

    H: BandedHermitian
    center: float
    scale: float
    m: float
    W_n: np.ndarray | None

    def scaled_eigenvalues(self, k: int) -> np.ndarray:
        """Edge-scaled top k eigenvalues of the original model, descending."""
        return -smallest_eigs_banded(self.H, k)


def assemble_gaussian_edge(G: BandedHermitian, n: int, r: int, P_tilde=None) -> ScaledEdgeProblem:
    """``H = (m^2/sqrt n)(2 sqrt n I - G)``; reports ``W_n = m (1 - P~)`` if given."""
    if G.r != r or G.n != n:
        raise ConfigurationError("band matrix does not match (n, r)")
    m = m_gaussian(n)
    c = m * m / math.sqrt(n)
    H = G.affine(2.0 * math.sqrt(n) * c, -c)
    W = None
    if P_tilde is not None:
        p = coerce_self_adjoint(G.beta, P_tilde, r)
        W = m * (np.eye(p.shape[0]) - p)
    return ScaledEdgeProblem(H, 2.0 * math.sqrt(n), n ** (1.0 / 6.0), m, W)


def assemble_wishart_edge(S: BandedHermitian, n: int, p: int, r: int, Sigma_tilde=None) -> ScaledEdgeProblem:
    """``H = (m^2/sqrt(np))((sqrt n + sqrt p)^2 - S)``; reports ``W = m(1 - sqrt(n/p)(Sigma~ - 1))``."""
    if S.r != r or S.n != min(n, p):
        raise ConfigurationError("band matrix does not match (n, p, r)")
    m = m_wishart(n, p)
    c = m * m / math.sqrt(n * p)
    center = (math.sqrt(n) + math.sqrt(p)) ** 2
    H = S.affine(center * c, -c)
    W = None
    if Sigma_tilde is not None:
        sig = coerce_self_adjoint(S.beta, Sigma_tilde, r)
        eye = np.eye(sig.shape[0])
        W = m * (eye - math.sqrt(n / p) * (sig - eye))
    return ScaledEdgeProblem(H, center, c, m, W)


# ---------------------------------------------------------------------------
# Banded inertia and bisection
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _count_below(ab, sigma):
    """Number of eigenvalues below ``sigma``; -1 on a zero pivot."""
    kd = ab.shape[0] - 1
    n = ab.shape[1]
    work = ab.copy()
    for j in range(n):
        work[0, j] -= sigma
    count = 0
    for j in range(n):
        piv = work[0, j].real
        if piv == 0.0 or not np.isfinite(piv):
            return -1
        if piv < 0.0:
            count += 1
        top = min(kd, n - 1 - j)
        for k1 in range(1, top + 1):
            f = work[k1, j] / piv
            if f == 0:
                continue
            for k2 in range(1, k1 + 1):
                work[k1 - k2, j + k2] -= f * np.conj(work[k2, j])
    return count


@numba.njit(cache=True)
def _count_below_safe(ab, sigma, scale):
    c = _count_below(ab, sigma)
    attempt = 1
    while c < 0 and attempt < 20:
        # deterministic jitter off an exact pivot breakdown
        c = _count_below(ab, sigma + SHIFT_JITTER * scale * attempt)
        attempt += 1
    return c


@numba.njit(cache=True)
def _bisect(ab, targets, lo, hi, tol, scale):
    out = np.empty(targets.shape[0])
    a_prev = lo
    for t in range(targets.shape[0]):
        idx = targets[t]
        a = a_prev
        b = hi
        while b - a > tol:
            mid = 0.5 * (a + b)
            if _count_below_safe(ab, mid, scale) > idx:
                b = mid
            else:
                a = mid
        out[t] = 0.5 * (a + b)
        a_prev = a
    return out


def count_below(H: BandedHermitian, sigma: float) -> int:
    """Number of eigenvalues of H strictly below ``sigma`` (over F)."""
    scale = max(1.0, H.norm_bound())
    c = int(_count_below_safe(np.ascontiguousarray(H.ab), float(sigma), scale))
    if c < 0:
        raise NumericError("LDL factorisation broke down at every jittered shift")
    return c // block_size(H.beta)


def smallest_eigs_banded(
    H: BandedHermitian, k: int, vectors: bool = False, rtol: float = BISECTION_RTOL
):
    """The k smallest eigenvalues of a band matrix, ascending.

    Each eigenvalue is bracketed by bisection to absolute width
    ``rtol * max(1, |H|)``.  With ``vectors=True`` also returns embedded
    eigenvectors (block columns for beta = 4) computed by inverse iteration.
    """
    if not 1 <= k <= H.n:
        raise ConfigurationError(f"need 1 <= k <= n, got k={k}, n={H.n}")
    d = block_size(H.beta)
    lo, hi = H.gershgorin()
    scale = max(1.0, max(abs(lo), abs(hi)))
    pad = 1e-9 * scale
    tol = rtol * scale
    targets = np.arange(k, dtype=np.int64) * d
    lam = _bisect(np.ascontiguousarray(H.ab), targets, lo - pad, hi + pad, tol, scale)
    if not vectors:
        return lam
    return lam, _inverse_iteration(H, lam, scale)


def _full_band(H: BandedHermitian) -> np.ndarray:
    kd = H.kd
    size = H.size
    full = np.zeros((2 * kd + 1, size), dtype=H.ab.dtype)
    for k in range(kd + 1):
        full[kd + k, : size - k] = H.ab[k, : size - k]
        if k:
            full[kd - k, k:] = np.conj(H.ab[k, : size - k])
    return full


def _inverse_iteration(H: BandedHermitian, lam: np.ndarray, scale: float) -> np.ndarray:
    kd = H.kd
    size = H.size
    d = block_size(H.beta)
    full = _full_band(H)
    dense_mv = H.dense() if size <= 4000 else None
    rng = np.random.default_rng(12345)
    cols = []
    done_lams = []
    for mu in lam:
        x = rng.standard_normal(size).astype(H.ab.dtype)
        shifted = full.copy()
        shifted[kd] -= mu + 1e-13 * scale
        for _ in range(3):
            x = scipy.linalg.solve_banded((kd, kd), shifted, x, check_finite=False)
            for prev, lp in zip(cols, done_lams):
                if abs(lp - mu) < 1e-6 * scale:
                    x = x - prev @ (prev.conj().T @ x)
            x = x / np.linalg.norm(x)
        if d == 2:
            blk = np.empty((size, 2), dtype=np.complex128)
            blk[:, 0] = x
            blk[0::2, 1] = -np.conj(x[1::2])
            blk[1::2, 1] = np.conj(x[0::2])
        else:
            blk = x.reshape(-1, 1)
        cols.append(blk)
        done_lams.append(mu)
        if dense_mv is not None:
            res = np.linalg.norm(dense_mv @ blk - blk * mu)
            if res > 1e-8 * scale:
                raise NumericError("inverse iteration did not converge", float(res))
    return np.concatenate(cols, axis=1)


def eigenvector_step_function(vec: np.ndarray, m: float, beta: int, r: int):
    """Node positions ``j/m`` and the F^r-valued values ``v_j`` (components).

    ``vec`` is one embedded eigenvector column of a block tridiagonal
    operator with r x r blocks; step j covers ``[j/m, (j+1)/m)``.
    """
    from .algebra import unembed

    d = block_size(beta)
    v = np.asarray(vec).reshape(-1, d) if d == 2 else np.asarray(vec).reshape(-1, 1)
    comps = unembed(v, beta)[:, 0, :]
    nodes = comps.shape[0] // r
    values = comps[: nodes * r].reshape(nodes, r, beta)
    x = np.arange(nodes) / m
    return x, values


# ---------------------------------------------------------------------------
# Finite-n samplers in scaled coordinates
# ---------------------------------------------------------------------------


def sample_gaussian_edge(rng, beta: int, n: int, spike: SpikeConfig, k: int = 1) -> np.ndarray:
    """Scaled top-k eigenvalues ``n^{1/6}(lambda_j - 2 sqrt n)`` of the spiked Gaussian band."""
    p = gaussian_P_from_w(spike.w, n)
    G = sample_gaussian_band(rng, beta, n, spike.r, p)
    return assemble_gaussian_edge(G, n, spike.r, p).scaled_eigenvalues(k)


def sample_wishart_edge(rng, beta: int, n: int, p: int, spike: SpikeConfig, k: int = 1) -> np.ndarray:
    """Scaled top-k eigenvalues ``(m^2/sqrt(np))(lambda_j - (sqrt n + sqrt p)^2)``."""
    sig = wishart_Sigma_from_w(spike.w, n, p)
    S = sample_spiked_S(rng, beta, n, p, spike.r, sig)
    return assemble_wishart_edge(S, n, p, spike.r, sig).scaled_eigenvalues(k)


def dense_count_below(H: BandedHermitian, sigma: float) -> int:
    """Dense oracle for :func:`count_below`."""
    ev = np.linalg.eigvalsh(H.dense())
    return int(np.sum(ev < sigma)) // block_size(H.beta)


__all__ = [
    "ScaledEdgeProblem",
    "assemble_gaussian_edge",
    "assemble_wishart_edge",
    "count_below",
    "dense_count_below",
    "eigenvector_step_function",
    "gaussian_P_from_w",
    "m_gaussian",
    "m_wishart",
    "sample_gaussian_edge",
    "sample_wishart_edge",
    "smallest_eigs_banded",
    "wishart_Sigma_from_w",
]

