"""Direct samplers of the spiked Gaussian and Wishart band forms.

The band forms are sampled entry by entry (independent Gaussians and Chi
variables), so an n x n model costs O(n r) draws instead of a dense matrix.
Indices that run past the matrix edge use the convention ``Chi(alpha) = 0``
for ``alpha <= 0`` and are trimmed afterwards.  Dense reference samplers
are provided as oracles for small n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    ConfigurationError,
    DomainError,
    SelfAdjointMatrix,
    block_size,
    check_beta,
    coerce_self_adjoint,
    embed,
    f_gaussian_components,
    f_gaussian_matrix,
    pad_top_left,
    real_dtype,
)
from .banded import BandedHermitian

__all__ = [
    "BandedHermitian",
    "SpikeConfig",
    "sample_gaussian_band",
    "sample_wishart_lower_band",
    "sample_spiked_S",
    "sample_dense_reference",
    "sample_dense_data",
]


@dataclass(frozen=True)
class SpikeConfig:
    """Rank-r spike in limit coordinates.

    ``w`` holds the boundary eigenvalues ``w_1 <= ... <= w_r`` with
    ``math.inf`` meaning a Dirichlet direction.  Finite-n spikes (``P~`` for
    the Gaussian model, ``Sigma~`` for the Wishart model) are derived from
    ``w`` in :mod:`spiked_edge.edge_solver`.
    """

    w: tuple = field(default_factory=tuple)

    def __post_init__(self):
        w = tuple(float(x) for x in self.w)
        if not w:
            raise ConfigurationError("spike needs at least one w value")
        if any(math.isnan(x) or x == -math.inf for x in w):
            raise ConfigurationError("w values must lie in (-inf, +inf]")
        if list(w) != sorted(w):
            raise ConfigurationError("w values must be ascending")
        object.__setattr__(self, "w", w)

    @property
    def r(self) -> int:
        return len(self.w)

    @property
    def n_dirichlet(self) -> int:
        return sum(1 for x in self.w if x == math.inf)

    @classmethod
    def parse(cls, text: str) -> "SpikeConfig":
        """Parse a comma list such as ``"0,inf"`` (values are sorted)."""
        vals = []
        for tok in text.split(","):
            tok = tok.strip().lower()
            if not tok:
                continue
            if tok in ("inf", "+inf", "infinity", "dirichlet"):
                vals.append(math.inf)
            else:
                try:
                    vals.append(float(tok))
                except ValueError as exc:
                    raise ConfigurationError(f"bad w value {tok!r}") from exc
        return cls(tuple(sorted(vals)))


def _check_dims(n: int, r: int, p: int | None = None) -> None:
    if n < 1 or r < 1:
        raise ConfigurationError("n and r must be positive")
    lim = n if p is None else min(n, p)
    if r > lim:
        raise ConfigurationError(f"rank r={r} exceeds {'n' if p is None else 'min(n, p)'}={lim}")


def sample_gaussian_band(rng, beta: int, n: int, r: int, P_tilde=None) -> BandedHermitian:
    """Band Jacobi form G of a Gaussian ensemble plus ``sqrt(n) P~ (+) 0``.

    Entries (1-based) are: diagonal ``sqrt(2/beta) N(0,1)``; subdiagonals
    ``0 < i - j < r`` standard F Gaussians; outermost ``i - j = r``
    ``Chi((n - i + 1) beta) / sqrt(beta)``.
    """
    beta = check_beta(beta)
    _check_dims(n, r)
    p = coerce_self_adjoint(beta, P_tilde, r)
    diag = np.zeros((n, beta))
    diag[:, 0] = math.sqrt(2.0 / beta) * np.asarray(rng.normal(n), dtype=float)
    subs = [diag]
    for k in range(1, r):
        subs.append(f_gaussian_components(rng, beta, n - k))
    outer = np.zeros((max(n - r, 0), beta))
    if n > r:
        rows = np.arange(r, n)  # 0-based row index i - 1
        outer[:, 0] = np.asarray(rng.chi((n - rows) * beta), dtype=float) / math.sqrt(beta)
    subs.append(outer)
    G0 = BandedHermitian.from_subdiagonals(beta, subs)
    return G0.add_top_left(math.sqrt(n) * p)


def sample_wishart_lower_band(rng, beta: int, n: int, p: int, r: int) -> np.ndarray:
    """Embedded lower band form L of a p x n null data matrix, trimmed.

    The result has ``(n + r) ^ p`` rows and ``n ^ p`` columns with (1-based)
    ``L_ii = Chi~((n-i+1) beta)/sqrt(beta)``, ``L_ij`` standard F Gaussian for
    ``j < i < j + r`` and ``L_{i,i-r} = Chi((p-i+1) beta)/sqrt(beta)``.
    """
    beta = check_beta(beta)
    _check_dims(n, r, p)
    rows, cols = min(n + r, p), min(n, p)
    # continue the pattern over the full (n + r) x n frame, then trim
    full_rows = n + r
    comps = np.zeros((full_rows, n, beta))
    i = np.arange(n)
    comps[i, i, 0] = np.asarray(rng.chi((n - i) * beta), dtype=float) / math.sqrt(beta)
    for k in range(1, r):
        g = f_gaussian_components(rng, beta, n)
        comps[i + k, i, :] = g
    comps[i + r, i, 0] = np.asarray(rng.chi((p - (i + r)) * beta), dtype=float) / math.sqrt(beta)
    return embed(comps[:rows, :cols], beta)


def _gram(L: np.ndarray) -> np.ndarray:
    return L.conj().T @ L


def sample_spiked_S(rng, beta: int, n: int, p: int, r: int, Sigma_tilde=None) -> BandedHermitian:
    """Band Jacobi form ``S = L^dagger Sigma L`` of a spiked Wishart matrix.

    Assembled as ``S_0 + L~_0^dagger (Sigma~ - I) L~_0 (+) 0`` where ``S_0 =
    L_0^dagger L_0`` and ``L~_0`` is the top r x r corner of ``L_0``.  Size is
    ``(n ^ p) x (n ^ p)``.

    Raises
    ------
    DomainError
        If ``Sigma~`` is not positive definite.
    """
    beta = check_beta(beta)
    d = block_size(beta)
    if Sigma_tilde is None:
        sig = np.eye(r * d, dtype=real_dtype(beta))
    else:
        sig = coerce_self_adjoint(beta, Sigma_tilde, r)
    if np.linalg.eigvalsh(sig).min() <= 0:
        raise DomainError("Sigma~ must be positive definite")
    L = sample_wishart_lower_band(rng, beta, n, p, r)
    S0 = BandedHermitian.from_dense(beta, _gram(L), r)
    corner = L[: r * d, : r * d]
    corr = corner.conj().T @ (sig - np.eye(r * d)) @ corner
    corr = 0.5 * (corr + corr.conj().T)
    return S0.add_top_left(corr)


def sample_dense_data(rng, beta: int, n: int, p: int) -> np.ndarray:
    """Embedded p x n matrix of i.i.d. standard F Gaussians."""
    return f_gaussian_matrix(rng, check_beta(beta), p, n)


def sample_dense_reference(rng, beta: int, kind: str, dims, spike=None) -> SelfAdjointMatrix:
    """Literal dense construction of the spiked models.

    ``kind='gaussian'``: ``dims = n``, returns ``(X + X^dagger)/sqrt 2 + sqrt(n) P``.
    ``kind='wishart'``: ``dims = (n, p)``, returns ``X_0^dagger Sigma X_0`` with
    ``Sigma = Sigma~ (+) I``.  ``spike`` is the r x r ``P~`` or ``Sigma~``
    (embedded, a diagonal list, or None).
    """
    beta = check_beta(beta)
    d = block_size(beta)
    if kind == "gaussian":
        n = int(dims)
        x = f_gaussian_matrix(rng, beta, n, n)
        a = (x + x.conj().T) / math.sqrt(2.0)
        if spike is not None:
            r = _spike_rank(spike, beta)
            a = a + math.sqrt(n) * pad_top_left(coerce_self_adjoint(beta, spike, r), n, beta)
        return SelfAdjointMatrix(beta, a)
    if kind == "wishart":
        n, p = (int(v) for v in dims)
        x0 = sample_dense_data(rng, beta, n, p)
        sigma = np.eye(p * d, dtype=real_dtype(beta))
        if spike is not None:
            r = _spike_rank(spike, beta)
            sigma[: r * d, : r * d] = coerce_self_adjoint(beta, spike, r)
        if np.linalg.eigvalsh(sigma).min() <= 0:
            raise DomainError("Sigma must be positive definite")
        s = x0.conj().T @ sigma @ x0
        return SelfAdjointMatrix(beta, 0.5 * (s + s.conj().T))
    raise ConfigurationError(f"unknown ensemble kind {kind!r}")


def _spike_rank(spike, beta: int) -> int:
    if isinstance(spike, SelfAdjointMatrix):
        return spike.n
    arr = np.asarray(spike)
    if arr.ndim == 1:
        return arr.shape[0]
    return arr.shape[0] // block_size(beta)
