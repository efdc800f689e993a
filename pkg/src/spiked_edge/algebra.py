"""Scalars and matrices over F = R, C, H selected by beta in {1, 2, 4}.

Vectors and matrices over F are carried in *embedded* form throughout the
package:

* beta = 1: real ``float64`` arrays,
* beta = 2: ``complex128`` arrays,
* beta = 4: ``complex128`` arrays of twice the size, each quaternion
  ``q = z + w j`` (``z = a + b i``, ``w = c + d i``) replaced by the 2x2 block
  ``[[z, w], [-conj(w), conj(z)]]``.

The embedding is an injective *-algebra homomorphism, so products, adjoints
and spectral decompositions can use plain numpy linear algebra.  Scalars
(:class:`BetaScalar`), the text format and the samplers work natively with
``beta`` real components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaln

BETAS = (1, 2, 4)
DENSE_LIMIT = 2048


class ConfigurationError(ValueError):
    """Invalid user-facing parameter (bad beta, rank, sizes, ...)."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class DegenerateInputError(ValueError):
    """Input for which an operation is undefined (for example a zero vector)."""


class NumericError(ArithmeticError):
    """A numerical procedure failed; ``residual`` carries the diagnostic."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


def check_beta(beta: int) -> int:
    if beta not in BETAS:
        raise ConfigurationError(f"beta must be one of {BETAS}, got {beta!r}")
    return int(beta)


def block_size(beta: int) -> int:
    """Size of the embedded block representing one scalar."""
    return 2 if check_beta(beta) == 4 else 1


def real_dtype(beta: int):
    return np.float64 if check_beta(beta) == 1 else np.complex128


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------


def _hamilton(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ]
    )


@dataclass(frozen=True)
class BetaScalar:
    """An element of R, C or H stored as ``beta`` real components."""

    beta: int
    components: tuple

    def __post_init__(self):
        check_beta(self.beta)
        comps = tuple(float(c) for c in self.components)
        if len(comps) != self.beta:
            raise ConfigurationError(
                f"beta={self.beta} scalars need {self.beta} components, got {len(comps)}"
            )
        object.__setattr__(self, "components", comps)

    @classmethod
    def real(cls, beta: int, value: float) -> "BetaScalar":
        return cls(beta, (value,) + (0.0,) * (beta - 1))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.components)

    def conjugate(self) -> "BetaScalar":
        c = self.array.copy()
        c[1:] *= -1
        return BetaScalar(self.beta, c)

    def abs2(self) -> float:
        return float(np.dot(self.array, self.array))

    def __abs__(self) -> float:
        return math.sqrt(self.abs2())

    def __add__(self, other: "BetaScalar") -> "BetaScalar":
        self._check(other)
        return BetaScalar(self.beta, self.array + other.array)

    def __sub__(self, other: "BetaScalar") -> "BetaScalar":
        self._check(other)
        return BetaScalar(self.beta, self.array - other.array)

    def __neg__(self) -> "BetaScalar":
        return BetaScalar(self.beta, -self.array)

    def __mul__(self, other) -> "BetaScalar":
        if isinstance(other, (int, float, np.floating, np.integer)):
            return BetaScalar(self.beta, self.array * float(other))
        self._check(other)
        p, q = self.array, other.array
        if self.beta == 1:
            return BetaScalar(1, p * q)
        if self.beta == 2:
            z = complex(*p) * complex(*q)
            return BetaScalar(2, (z.real, z.imag))
        return BetaScalar(4, _hamilton(p, q))

    __rmul__ = __mul__

    def embedded(self) -> np.ndarray:
        """The scalar as a 1x1 (or 2x2 for beta=4) embedded block."""
        return embed(self.array.reshape(1, 1, self.beta), self.beta)

    def _check(self, other: "BetaScalar") -> None:
        if not isinstance(other, BetaScalar) or other.beta != self.beta:
            raise ConfigurationError("scalars must share the same beta")


def quaternion_units() -> list[BetaScalar]:
    """The 8 units {+-1, +-i, +-j, +-k}."""
    out = []
    for axis in range(4):
        for sign in (1.0, -1.0):
            c = [0.0] * 4
            c[axis] = sign
            out.append(BetaScalar(4, c))
    return out


# ---------------------------------------------------------------------------
# Embedding of component arrays
# ---------------------------------------------------------------------------


def embed(components: np.ndarray, beta: int) -> np.ndarray:
    """Map an ``(..., m, n, beta)`` component array to its embedded matrices."""
    check_beta(beta)
    c = np.asarray(components, dtype=np.float64)
    if c.ndim < 3 or c.shape[-1] != beta:
        raise ConfigurationError(f"expected shape (..., m, n, {beta}), got {c.shape}")
    if beta == 1:
        return c[..., 0].copy()
    z = c[..., 0] + 1j * c[..., 1]
    if beta == 2:
        return z
    w = c[..., 2] + 1j * c[..., 3]
    m, n = z.shape[-2:]
    out = np.empty(z.shape[:-2] + (2 * m, 2 * n), dtype=np.complex128)
    out[..., 0::2, 0::2] = z
    out[..., 0::2, 1::2] = w
    out[..., 1::2, 0::2] = -np.conj(w)
    out[..., 1::2, 1::2] = np.conj(z)
    return out


def unembed(matrix: np.ndarray, beta: int) -> np.ndarray:
    """Inverse of :func:`embed`; returns an ``(m, n, beta)`` component array."""
    check_beta(beta)
    a = np.asarray(matrix)
    if beta == 1:
        return np.real(a)[..., None].astype(np.float64)
    if beta == 2:
        return np.stack([a.real, a.imag], axis=-1)
    z = a[0::2, 0::2]
    w = a[0::2, 1::2]
    return np.stack([z.real, z.imag, w.real, w.imag], axis=-1)


def embed_vector(components: np.ndarray, beta: int) -> np.ndarray:
    """Embed an ``(m, beta)`` vector: 1-D for beta in {1,2}, ``(2m, 2)`` for beta=4."""
    c = np.asarray(components, dtype=np.float64)
    e = embed(c.reshape(c.shape[0], 1, beta), beta)
    return e[:, 0] if beta != 4 else e


def quaternion_structure_defect(matrix: np.ndarray) -> float:
    """Max deviation of a 2m x 2n complex matrix from quaternion block structure."""
    a = np.asarray(matrix)
    d1 = np.abs(a[1::2, 1::2] - np.conj(a[0::2, 0::2])).max(initial=0.0)
    d2 = np.abs(a[1::2, 0::2] + np.conj(a[0::2, 1::2])).max(initial=0.0)
    return float(max(d1, d2))


def quaternion_project(matrix: np.ndarray) -> np.ndarray:
    """Nearest matrix with exact quaternion block structure (blockwise average)."""
    a = np.asarray(matrix)
    z = 0.5 * (a[0::2, 0::2] + np.conj(a[1::2, 1::2]))
    w = 0.5 * (a[0::2, 1::2] - np.conj(a[1::2, 0::2]))
    out = np.empty_like(a, dtype=np.complex128)
    out[0::2, 0::2] = z
    out[0::2, 1::2] = w
    out[1::2, 0::2] = -np.conj(w)
    out[1::2, 1::2] = np.conj(z)
    return out


def identity(n: int, beta: int) -> np.ndarray:
    return np.eye(n * block_size(beta), dtype=real_dtype(beta))


# ---------------------------------------------------------------------------
# Self-adjoint matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SelfAdjointMatrix:
    """A dense self-adjoint matrix over F held in embedded form."""

    beta: int
    data: np.ndarray

    def __post_init__(self):
        check_beta(self.beta)
        a = np.array(self.data, dtype=real_dtype(self.beta))
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ConfigurationError("self-adjoint matrix must be square")
        if self.beta == 4 and a.shape[0] % 2:
            raise ConfigurationError("beta=4 embedding must have even size")
        scale = max(1.0, float(np.abs(a).max(initial=0.0)))
        if np.abs(a - a.conj().T).max(initial=0.0) > 1e-12 * scale:
            raise DomainError("matrix is not self-adjoint")
        if self.beta == 4 and quaternion_structure_defect(a) > 1e-12 * scale:
            raise DomainError("matrix is not a quaternion embedding")
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @classmethod
    def from_components(cls, beta: int, components: np.ndarray) -> "SelfAdjointMatrix":
        return cls(beta, embed(components, beta))

    @property
    def n(self) -> int:
        return self.data.shape[0] // block_size(self.beta)

    @property
    def components(self) -> np.ndarray:
        return unembed(self.data, self.beta)

    def entry(self, i: int, j: int) -> BetaScalar:
        return BetaScalar(self.beta, self.components[i, j])

    def norm(self) -> float:
        """Spectral norm."""
        if self.data.size == 0:
            return 0.0
        return float(np.abs(np.linalg.eigvalsh(self.data)).max())

    def __add__(self, other: "SelfAdjointMatrix") -> "SelfAdjointMatrix":
        if other.beta != self.beta:
            raise ConfigurationError("beta mismatch")
        return SelfAdjointMatrix(self.beta, self.data + other.data)

    def conjugate_by(self, u: np.ndarray) -> "SelfAdjointMatrix":
        """Return ``U A U^dagger`` for an embedded unitary ``U``."""
        return SelfAdjointMatrix(self.beta, u @ self.data @ u.conj().T)


def pad_top_left(block: np.ndarray, n: int, beta: int) -> np.ndarray:
    """Embedded ``block (+) 0`` of total size n (block given embedded)."""
    d = block_size(beta)
    out = np.zeros((n * d, n * d), dtype=real_dtype(beta))
    k = block.shape[0]
    out[:k, :k] = block
    return out


def coerce_self_adjoint(beta: int, value, r: int) -> np.ndarray:
    """Interpret ``value`` as an embedded r x r self-adjoint matrix.

    Accepts a :class:`SelfAdjointMatrix`, an embedded array, a sequence of r
    real numbers (a diagonal), or ``None`` / ``0`` for the zero matrix.
    """
    d = block_size(beta)
    if value is None or (np.isscalar(value) and value == 0):
        return np.zeros((r * d, r * d), dtype=real_dtype(beta))
    if isinstance(value, SelfAdjointMatrix):
        a = value.data
    else:
        arr = np.asarray(value)
        if arr.ndim == 1:
            if arr.shape[0] != r or np.iscomplexobj(arr):
                raise ConfigurationError(f"diagonal spike needs {r} real entries")
            comps = np.zeros((r, r, beta))
            comps[np.arange(r), np.arange(r), 0] = arr.astype(float)
            a = embed(comps, beta)
        else:
            a = SelfAdjointMatrix(beta, arr).data
    if a.shape != (r * d, r * d):
        raise ConfigurationError(f"spike must be {r}x{r} over F, got embedded shape {a.shape}")
    return np.array(a, dtype=real_dtype(beta))


def eig_self_adjoint(
    A: SelfAdjointMatrix, dense_limit: int = DENSE_LIMIT
) -> tuple[np.ndarray, np.ndarray]:
    """Dense spectral decomposition ``A = U diag(lam) U^dagger``.

    Returns
    -------
    lam : ndarray, shape (n,)
        Eigenvalues in ascending order.  For beta=4 each quaternion eigenvalue
        appears once (the complex double cover is deduplicated).
    U : ndarray
        Embedded unitary whose block columns are eigenvectors over F.

    Raises
    ------
    NumericError
        If the residual ``|AU - U lam|`` exceeds ``1e-10 |A|``.
    """
    n = A.n
    if n > dense_limit:
        raise ConfigurationError(f"dense eigensolver limited to n <= {dense_limit}")
    a = A.data
    lam, vec = np.linalg.eigh(a)
    if A.beta == 4:
        # eigenvalues come in pairs; keep one eigenvector per pair and rebuild
        # its quaternion partner so U keeps the block structure
        lam = lam[0::2]
        x = vec[:, 0::2]
        u = np.empty_like(vec)
        u[:, 0::2] = x
        u[0::2, 1::2] = -np.conj(x[1::2, :])
        u[1::2, 1::2] = np.conj(x[0::2, :])
        # partner vectors of nearly degenerate pairs need not be orthogonal to
        # neighbouring pairs; re-orthonormalise the quaternion columns
        u = _quaternion_gram_schmidt(u)
        vec = u
        lam_full = np.repeat(lam, 2)
    else:
        lam_full = lam
    scale = max(float(np.abs(lam).max(initial=0.0)), np.finfo(float).tiny)
    resid = float(np.linalg.norm(a @ vec - vec * lam_full, 2)) if n else 0.0
    if resid > 1e-10 * scale and resid > 1e-300:
        raise NumericError("dense eigensolver residual too large", resid)
    return lam, vec


def _quaternion_gram_schmidt(u: np.ndarray) -> np.ndarray:
    """Orthonormalise the quaternion columns (pairs) of an embedded matrix."""
    out = u.copy()
    m = u.shape[1] // 2
    for k in range(m):
        x = out[:, 2 * k]
        for prev in range(k):
            blk = out[:, 2 * prev : 2 * prev + 2]
            x = x - blk @ (blk.conj().T @ x)
        x /= np.linalg.norm(x)
        out[:, 2 * k] = x
        out[0::2, 2 * k + 1] = -np.conj(x[1::2])
        out[1::2, 2 * k + 1] = np.conj(x[0::2])
    return out


# ---------------------------------------------------------------------------
# Householder reflectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Reflector:
    """The unitary ``H D`` with D a unit phase on the first entry.

    ``phase`` is the embedded d x d unit scalar, ``w`` the embedded
    Householder vector (``None`` when the reflection is trivial).
    """

    beta: int
    size: int
    phase: np.ndarray
    w: np.ndarray | None

    def apply_left(self, x: np.ndarray) -> np.ndarray:
        """Return ``(H D) x`` for an embedded block of rows."""
        d = block_size(self.beta)
        y = np.array(x, dtype=np.result_type(x, self.phase), copy=True)
        y[:d] = self.phase @ y[:d]
        if self.w is not None:
            w = self.w
            wx = w.conj().T @ y
            y -= (2.0 / _vec_norm2(w, self.beta)) * (w @ wx)
        return y

    def matrix(self) -> np.ndarray:
        d = block_size(self.beta)
        return self.apply_left(np.eye(self.size * d, dtype=real_dtype(self.beta)))


def _vec_norm2(v: np.ndarray, beta: int) -> float:
    return float(np.real(np.vdot(v, v))) / block_size(beta)


def vector_norm(v: np.ndarray, beta: int) -> float:
    """Euclidean norm of an embedded F-vector."""
    return math.sqrt(_vec_norm2(v, beta))


def reflector(v: np.ndarray, beta: int, tol: float = 0.0) -> Reflector | None:
    """Unitary sending the embedded F-vector ``v`` to ``|v| e_1``.

    Returns ``None`` when ``|v| <= tol``.
    """
    d = block_size(beta)
    v = np.asarray(v, dtype=real_dtype(beta))
    if beta == 4 and v.ndim == 1:
        raise ConfigurationError("beta=4 embedded vectors have shape (2m, 2)")
    size = v.shape[0] // d
    nv = vector_norm(v, beta)
    if not nv > tol:
        return None
    if beta == 4:
        v = quaternion_project(v)
        v1 = v[:2, :]
        a1 = math.sqrt(float(np.sum(np.abs(v1[0]) ** 2)))
        phase = v1.conj().T / a1 if a1 > 0 else np.eye(2, dtype=np.complex128)
    else:
        a1 = abs(v[0])
        if beta == 1:
            phase = np.array([[-1.0 if v[0] < 0 else 1.0]])
        else:
            phase = np.array([[np.conj(v[0]) / a1 if a1 > 0 else 1.0]], dtype=np.complex128)
    rest = v[d:]
    rest2 = _vec_norm2(rest, beta) if rest.size else 0.0
    if rest2 == 0.0:
        return Reflector(beta, size, phase, None)
    # w = D v - |v| e_1; the pivot difference is formed without cancellation
    w = np.zeros((v.shape[0], d), dtype=real_dtype(beta))
    w[:d] = (-rest2 / (nv + a1)) * np.eye(d)
    w[d:] = rest.reshape(-1, d)
    return Reflector(beta, size, phase, w)


def householder(v, beta: int) -> np.ndarray:
    """Embedded unitary ``U`` with ``U v = |v| e_1`` and ``U^dagger U = I``.

    ``v`` is an embedded F-vector: 1-D real/complex for beta in {1, 2}, a
    ``(2m, 2)`` block column for beta = 4 (see :func:`embed_vector`).  For
    beta in {2, 4} the pivot is first rotated to the positive real axis.
    """
    check_beta(beta)
    r = reflector(v, beta)
    if r is None:
        raise DegenerateInputError("Householder reflector of the zero vector")
    return r.matrix()


# ---------------------------------------------------------------------------
# Random streams and samplers
# ---------------------------------------------------------------------------


class Rng:
    """Deterministic random stream keyed by ``(master_seed, stream_id)``.

    Each stream is an independent PCG64 generator spawned from the master
    seed, so samples never depend on how replicas are scheduled.
    """

    def __init__(self, master_seed: int, stream_id: int = 0):
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def normal(self, size=None):
        return self.generator.standard_normal(size)

    def chi(self, alpha):
        """Chi(alpha) draws; exactly 0 where ``alpha <= 0``."""
        a = np.asarray(alpha, dtype=np.float64)
        pos = a > 0
        g = self.generator.gamma(np.where(pos, a, 1.0) / 2.0, 2.0)
        out = np.where(pos, np.sqrt(g), 0.0)
        return float(out) if out.ndim == 0 else out

    def spawn(self, stream_id: int) -> "Rng":
        return Rng(self.master_seed, stream_id)


def chi_mean(alpha):
    """E[Chi(alpha)] = sqrt(2) Gamma((alpha+1)/2) / Gamma(alpha/2), 0 for alpha <= 0."""
    a = np.asarray(alpha, dtype=np.float64)
    pos = a > 0
    safe = np.where(pos, a, 1.0)
    val = np.sqrt(2.0) * np.exp(gammaln((safe + 1) / 2) - gammaln(safe / 2))
    out = np.where(pos, val, 0.0)
    return float(out) if out.ndim == 0 else out


class MeanRng(Rng):
    """Test stream replacing every draw by its exact mean.

    Gaussians become 0 and Chi(alpha) becomes :func:`chi_mean`.
    """

    def __init__(self):
        self.master_seed = 0
        self.stream_id = 0
        self.generator = None

    def normal(self, size=None):
        return 0.0 if size is None else np.zeros(size)

    def chi(self, alpha):
        return chi_mean(alpha)

    def spawn(self, stream_id: int) -> "MeanRng":
        return MeanRng()


def sample_chi(rng: Rng, alpha: float) -> float:
    """One Chi(alpha) draw (``sqrt`` of Gamma(alpha/2, scale 2)); 0 if alpha <= 0."""
    return float(rng.chi(float(alpha)))


def f_gaussian_components(rng: Rng, beta: int, shape: Sequence[int] | int) -> np.ndarray:
    """Standard F-Gaussian components, shape ``shape + (beta,)``, E|Z|^2 = 1."""
    check_beta(beta)
    shape = (shape,) if isinstance(shape, (int, np.integer)) else tuple(shape)
    g = np.asarray(rng.normal(shape + (beta,)), dtype=np.float64)
    return g / math.sqrt(beta)


def sample_f_gaussian(rng: Rng, beta: int) -> BetaScalar:
    """A standard F Gaussian: g1, (g1+g2 i)/sqrt2 or (g1+g2 i+g3 j+g4 k)/2."""
    return BetaScalar(beta, f_gaussian_components(rng, beta, ())[...])


def f_gaussian_matrix(rng: Rng, beta: int, m: int, n: int) -> np.ndarray:
    """Embedded m x n matrix of i.i.d. standard F Gaussians."""
    return embed(f_gaussian_components(rng, beta, (m, n)), beta)


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_UNITS = ("", "i", "j", "k")


def format_scalar(components: Iterable[float]) -> str:
    comps = list(components)
    out = repr(float(comps[0]))
    for c, unit in zip(comps[1:], _UNITS[1:]):
        c = float(c)
        sign = "-" if math.copysign(1.0, c) < 0 else "+"
        out += f"{sign}{repr(abs(c))}{unit}"
    return out


def parse_scalar(token: str, beta: int) -> np.ndarray:
    """Parse ``a``, ``a+bi`` or ``a+bi+cj+dk`` into ``beta`` components."""
    import re

    comps = np.zeros(beta)
    pattern = re.compile(r"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?(?:inf|nan))([ijk]?)")
    pos = 0
    tok = token.strip()
    if not tok:
        raise ConfigurationError("empty matrix entry")
    while pos < len(tok):
        mt = pattern.match(tok, pos)
        if mt is None or mt.end() == pos:
            raise ConfigurationError(f"cannot parse entry {token!r}")
        idx = _UNITS.index(mt.group(2))
        if idx >= beta:
            raise ConfigurationError(f"entry {token!r} has a component not in F for beta={beta}")
        comps[idx] += float(mt.group(1))
        pos = mt.end()
    return comps


def write_matrix_text(components: np.ndarray, beta: int) -> str:
    """Serialise an ``(m, n, beta)`` component array; header ``beta n`` (or ``beta m n``)."""
    c = np.asarray(components)
    m, n = c.shape[:2]
    head = f"{beta} {n}" if m == n else f"{beta} {m} {n}"
    lines = [head]
    for i in range(m):
        lines.append(" ".join(format_scalar(c[i, j]) for j in range(n)))
    return "\n".join(lines) + "\n"


def read_matrix_text(text: str) -> tuple[int, np.ndarray]:
    """Parse the matrix text format; returns ``(beta, components)``."""
    rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not rows:
        raise ConfigurationError("empty matrix file")
    head = rows[0]
    try:
        beta = check_beta(int(head[0]))
        dims = [int(t) for t in head[1:]]
    except ValueError as exc:
        raise ConfigurationError(f"bad header {' '.join(head)!r}") from exc
    if len(dims) == 1:
        m = n = dims[0]
    elif len(dims) == 2:
        m, n = dims
    else:
        raise ConfigurationError("header must be 'beta n' or 'beta m n'")
    body = rows[1:]
    if len(body) != m or any(len(r) != n for r in body):
        raise ConfigurationError(f"expected {m} rows of {n} entries")
    comps = np.array([[parse_scalar(t, beta) for t in r] for r in body]).reshape(m, n, beta)
    return beta, comps
