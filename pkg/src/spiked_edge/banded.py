"""Band storage for self-adjoint matrices over F."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    ConfigurationError,
    DomainError,
    SelfAdjointMatrix,
    block_size,
    check_beta,
    embed,
    real_dtype,
    unembed,
)


def embedded_bandwidth(beta: int, r: int) -> int:
    """Bandwidth of the embedded matrix of an F-band matrix of bandwidth r."""
    d = block_size(beta)
    return d * r + d - 1


@dataclass(frozen=True)
class BandedHermitian:
    """An n x n self-adjoint F-matrix of bandwidth r in LAPACK lower storage.

    ``ab[k, j]`` holds entry ``(j + k, j)`` of the embedded matrix, for
    ``0 <= k <= kd`` with ``kd = embedded_bandwidth(beta, r)``.
    """

    beta: int
    n: int
    r: int
    ab: np.ndarray

    def __post_init__(self):
        check_beta(self.beta)
        d = block_size(self.beta)
        kd = embedded_bandwidth(self.beta, self.r)
        ab = np.array(self.ab, dtype=real_dtype(self.beta))
        if ab.shape != (kd + 1, self.n * d):
            raise ConfigurationError(f"band storage shape {ab.shape} != {(kd + 1, self.n * d)}")
        if self.beta != 1:
            ab[0] = ab[0].real
        ab.setflags(write=False)
        object.__setattr__(self, "ab", ab)

    # -- sizes -------------------------------------------------------------
    @property
    def kd(self) -> int:
        return embedded_bandwidth(self.beta, self.r)

    @property
    def size(self) -> int:
        """Dimension of the embedded matrix."""
        return self.ab.shape[1]

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_subdiagonals(cls, beta: int, subdiags: list[np.ndarray]) -> "BandedHermitian":
        """Build from component arrays ``subdiags[k]`` of shape ``(n - k, beta)``.

        ``subdiags[k][i]`` is entry ``(i + k, i)``; ``subdiags[0]`` must be real.
        """
        check_beta(beta)
        r = len(subdiags) - 1
        n = np.asarray(subdiags[0]).shape[0]
        d = block_size(beta)
        kd = embedded_bandwidth(beta, r)
        ab = np.zeros((kd + 1, n * d), dtype=real_dtype(beta))
        for k, comps in enumerate(subdiags):
            comps = np.asarray(comps, dtype=float).reshape(n - k, beta)
            if k == 0 and np.any(comps[:, 1:] != 0):
                raise DomainError("main diagonal must be real")
            if beta != 4:
                vals = embed(comps[:, None, :], beta)[:, 0]
                ab[k, : n - k] = vals
            else:
                z = comps[:, 0] + 1j * comps[:, 1]
                w = comps[:, 2] + 1j * comps[:, 3]
                block = ((z, w), (-np.conj(w), np.conj(z)))
                for a in range(2):
                    for b in range(2):
                        off = 2 * k + a - b
                        if off < 0:
                            continue
                        ab[off, b : 2 * (n - k) : 2] = block[a][b]
        return cls(beta, n, r, ab)

    @classmethod
    def from_dense(cls, beta: int, data: np.ndarray, r: int, tol: float | None = None) -> "BandedHermitian":
        """Extract the band of an embedded dense matrix.

        Entries outside the band must be below ``tol`` (default
        ``1e-10 * max|data|``) and are discarded.
        """
        a = np.asarray(data)
        d = block_size(beta)
        n = a.shape[0] // d
        kd = embedded_bandwidth(beta, r)
        big = a.shape[0]
        if tol is None:
            tol = 1e-10 * max(1.0, float(np.abs(a).max(initial=0.0)))
        outside = np.abs(np.tril(a, -kd - 1)).max(initial=0.0)
        if outside > tol:
            raise DomainError(f"matrix has entries {outside:.3g} outside bandwidth {r}")
        ab = np.zeros((kd + 1, big), dtype=real_dtype(beta))
        for k in range(min(kd + 1, big)):
            ab[k, : big - k] = np.diagonal(a, -k)
        return cls(beta, n, r, ab)

    @classmethod
    def from_self_adjoint(cls, A: SelfAdjointMatrix, r: int, tol: float | None = None) -> "BandedHermitian":
        return cls.from_dense(A.beta, A.data, r, tol)

    # -- views -------------------------------------------------------------
    def dense(self) -> np.ndarray:
        """The embedded dense matrix."""
        big = self.size
        a = np.zeros((big, big), dtype=self.ab.dtype)
        for k in range(min(self.kd + 1, big)):
            idx = np.arange(big - k)
            a[idx + k, idx] = self.ab[k, : big - k]
            if k:
                a[idx, idx + k] = np.conj(self.ab[k, : big - k])
        return a

    def to_self_adjoint(self) -> SelfAdjointMatrix:
        return SelfAdjointMatrix(self.beta, self.dense())

    def subdiagonal(self, k: int) -> np.ndarray:
        """Components ``(n - k, beta)`` of entries ``(i + k, i)``."""
        d = block_size(self.beta)
        if self.beta != 4:
            vals = self.ab[k, : max(self.n - k, 0)]
            return unembed(vals.reshape(-1, 1), self.beta)[:, 0, :]
        z = self.ab[2 * k, 0 : max(2 * (self.n - k), 0) : 2]
        w = -np.conj(self.ab[2 * k + 1, 0 : max(2 * (self.n - k), 0) : 2]) if 2 * k + 1 <= self.kd else 0 * z
        return np.stack([z.real, z.imag, np.real(w), np.imag(w)], axis=-1)

    def diagonals(self) -> list[np.ndarray]:
        return [self.subdiagonal(k) for k in range(self.r + 1)]

    def outer_diagonal(self) -> np.ndarray:
        """Real parts of the outermost F-diagonal, entries ``(i + r, i)``."""
        return self.subdiagonal(self.r)[:, 0]

    def norm_bound(self) -> float:
        """Gershgorin (infinity-norm) upper bound on the spectral norm."""
        big = self.size
        rows = np.abs(self.ab[0]).astype(float)
        for k in range(1, min(self.kd + 1, big)):
            v = np.abs(self.ab[k, : big - k])
            rows[k:] += v
            rows[: big - k] += v
        return float(rows.max(initial=0.0))

    def gershgorin(self) -> tuple[float, float]:
        big = self.size
        rad = np.zeros(big)
        for k in range(1, min(self.kd + 1, big)):
            v = np.abs(self.ab[k, : big - k])
            rad[k:] += v
            rad[: big - k] += v
        diag = self.ab[0].real
        return float((diag - rad).min()), float((diag + rad).max())

    # -- arithmetic --------------------------------------------------------
    def affine(self, shift: float, scale: float) -> "BandedHermitian":
        """Return ``shift * I + scale * self``."""
        ab = self.ab * scale
        ab[0] = ab[0] + shift
        return BandedHermitian(self.beta, self.n, self.r, ab)

    def add_top_left(self, block: np.ndarray) -> "BandedHermitian":
        """Add an embedded self-adjoint block to the top-left corner."""
        k = block.shape[0]
        if k - 1 > self.kd:
            raise ConfigurationError("block wider than the band")
        ab = np.array(self.ab)
        for off in range(k):
            ab[off, : k - off] += np.diagonal(block, -off)
        return BandedHermitian(self.beta, self.n, self.r, ab)

    def top_left(self, k: int) -> np.ndarray:
        """Embedded top-left k x k F-block (k <= r)."""
        d = block_size(self.beta)
        return self.dense_head(k * d)

    def dense_head(self, size: int) -> np.ndarray:
        out = np.zeros((size, size), dtype=self.ab.dtype)
        for off in range(min(size, self.kd + 1)):
            idx = np.arange(size - off)
            out[idx + off, idx] = self.ab[off, : size - off]
            if off:
                out[idx, idx + off] = np.conj(self.ab[off, : size - off])
        return out
