"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` objects of complex dtype.  The
Hilbert-Schmidt inner product ``<X, Y> = Re tr(X^dag Y)`` turns the space of
skew-Hermitian matrices into a real Euclidean space; subspaces of it (Lie
algebras) are stored as orthonormal bases.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import scipy.linalg

from .errors import InvalidInputError

__all__ = [
    "MatrixSubspaceBasis",
    "as_square_matrix",
    "commutator",
    "expm",
    "expm_skew",
    "hs_inner",
    "hs_norm",
    "is_hermitian",
    "is_skew_hermitian",
    "is_unitary",
    "is_zero_trace",
    "nearest_unitary",
    "orthonormalize",
    "project",
]

# Default threshold below which Gram-Schmidt residuals count as linearly dependent.
RANK_TOL = 1e-9


def as_square_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite complex square ndarray or raise InvalidInputError."""
    m = np.asarray(a)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InvalidInputError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    m = m.astype(complex, copy=False)
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return m


def _dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def is_unitary(m, tol: float = 1e-10) -> bool:
    m = np.asarray(m)
    return bool(np.linalg.norm(_dagger(m) @ m - np.eye(m.shape[0])) <= tol)


def is_hermitian(m, tol: float = 1e-10) -> bool:
    m = np.asarray(m)
    return bool(np.linalg.norm(m - _dagger(m)) <= tol)


def is_skew_hermitian(m, tol: float = 1e-10) -> bool:
    m = np.asarray(m)
    return bool(np.linalg.norm(m + _dagger(m)) <= tol)


def is_zero_trace(m, tol: float = 1e-10) -> bool:
    return bool(abs(np.trace(np.asarray(m))) <= tol)


def commutator(x, y):
    return x @ y - y @ x


def hs_inner(x, y) -> float:
    """Hilbert-Schmidt inner product ``Re tr(x^dag y)``."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise InvalidInputError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(np.vdot(x, y).real)


def hs_norm(x) -> float:
    return float(np.linalg.norm(x))


def expm_skew(a, t: float = 1.0) -> np.ndarray:
    """``exp(t*a)`` for skew-Hermitian ``a`` via the Hermitian eigenproblem of ``-i a``.

    The result is unitary to working precision because it is assembled from
    an orthonormal eigenbasis and unimodular phases.
    """
    lam, v = np.linalg.eigh(-1j * np.asarray(a))
    return (v * np.exp(1j * t * lam)) @ _dagger(v)


def expm(a) -> np.ndarray:
    """Matrix exponential.

    Skew-Hermitian input takes the unitary eigendecomposition path; anything
    else falls back to scaling-and-squaring Pade (scipy).
    """
    a = as_square_matrix(a, "expm argument")
    scale = max(1.0, np.linalg.norm(a))
    if is_skew_hermitian(a, 1e-13 * scale):
        a = 0.5 * (a - _dagger(a))
        return expm_skew(a)
    return scipy.linalg.expm(a)


def nearest_unitary(m) -> np.ndarray:
    """Polar-factor projection onto the unitary group (used to remove drift)."""
    u, _, vh = np.linalg.svd(m)
    return u @ vh


@dataclass(frozen=True)
class MatrixSubspaceBasis:
    """Orthonormal basis (under ``hs_inner``) of a real subspace of skew-Hermitian matrices.

    ``elements`` has shape ``(k, n, n)``; ``k`` may be zero.
    """

    ambient_dim: int
    elements: np.ndarray = field(repr=False)

    def __post_init__(self):
        el = np.asarray(self.elements, dtype=complex)
        if el.size == 0:
            el = np.zeros((0, self.ambient_dim, self.ambient_dim), dtype=complex)
        if el.ndim != 3 or el.shape[1:] != (self.ambient_dim, self.ambient_dim):
            raise InvalidInputError(f"basis elements must have shape (k, {self.ambient_dim}, {self.ambient_dim})")
        el.setflags(write=False)
        object.__setattr__(self, "elements", el)

    def __len__(self):
        return self.elements.shape[0]

    def __iter__(self):
        return iter(self.elements)

    @property
    def dim(self) -> int:
        return len(self)

    def gram(self) -> np.ndarray:
        v = _realify(self.elements)
        return v @ v.T

    def coordinates(self, x) -> np.ndarray:
        """Coefficients ``<E_k, x>`` of ``x`` in this basis."""
        x = np.asarray(x)
        if x.shape != (self.ambient_dim, self.ambient_dim):
            raise InvalidInputError(f"expected {self.ambient_dim}x{self.ambient_dim} matrix, got {x.shape}")
        if len(self) == 0:
            return np.zeros(0)
        return np.tensordot(np.conj(self.elements), x, axes=([1, 2], [0, 1])).real

    def combine(self, coefficients) -> np.ndarray:
        c = np.asarray(coefficients, dtype=float)
        if c.shape != (len(self),):
            raise InvalidInputError(f"expected {len(self)} coefficients, got shape {c.shape}")
        if len(self) == 0:
            return np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
        return np.tensordot(c, self.elements, axes=1)


def _realify(mats) -> np.ndarray:
    """Flatten complex matrices into real vectors so that dot == hs_inner."""
    m = np.asarray(mats)
    flat = m.reshape(m.shape[0], -1) if m.ndim == 3 else m.reshape(1, -1)
    return np.concatenate([flat.real, flat.imag], axis=1)


class _GramSchmidt:
    """Incremental modified Gram-Schmidt with one re-orthogonalization pass."""

    def __init__(self, n: int, rank_tol: float = RANK_TOL):
        self.n = n
        self.rank_tol = rank_tol
        self.q = np.zeros((n * n, 2 * n * n))
        self.mats: list[np.ndarray] = []

    def __len__(self):
        return len(self.mats)

    def add(self, x) -> np.ndarray | None:
        k = len(self.mats)
        v = _realify(x)[0]
        if k:
            q = self.q[:k]
            v = v - q.T @ (q @ v)
            v = v - q.T @ (q @ v)
        nrm = np.linalg.norm(v)
        if nrm < self.rank_tol or k >= self.q.shape[0]:
            return None
        v = v / nrm
        self.q[k] = v
        half = self.n * self.n
        e = (v[:half] + 1j * v[half:]).reshape(self.n, self.n)
        self.mats.append(e)
        return e

    def basis(self) -> MatrixSubspaceBasis:
        return MatrixSubspaceBasis(self.n, np.array(self.mats).reshape(-1, self.n, self.n))


def orthonormalize(spanning_set: Iterable, rank_tol: float = RANK_TOL, tol: float = 1e-10) -> MatrixSubspaceBasis:
    """Gram-Schmidt orthonormalization of skew-Hermitian matrices under ``hs_inner``.

    Elements whose residual norm falls below ``rank_tol`` are discarded, so the
    output size equals the numerical rank of the input.  An empty input gives
    an empty basis with ``ambient_dim`` 0.
    """
    mats = [as_square_matrix(x, "spanning element") for x in spanning_set]
    if not mats:
        return MatrixSubspaceBasis(0, np.zeros((0, 0, 0)))
    n = mats[0].shape[0]
    gs = _GramSchmidt(n, rank_tol)
    for i, m in enumerate(mats):
        if m.shape != (n, n):
            raise InvalidInputError(f"element {i} has shape {m.shape}, expected {(n, n)}")
        if not is_skew_hermitian(m, tol * max(1.0, hs_norm(m))):
            raise InvalidInputError(f"element {i} is not skew-Hermitian")
        gs.add(m)
    return gs.basis()


def project(x, basis: MatrixSubspaceBasis) -> np.ndarray:
    """Orthogonal projection ``sum_k <E_k, x> E_k`` onto the span of ``basis``."""
    x = np.asarray(x, dtype=complex)
    if len(basis) == 0:
        if x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise InvalidInputError(f"expected a square matrix, got {x.shape}")
        return np.zeros_like(x)
    return basis.combine(basis.coordinates(x))

