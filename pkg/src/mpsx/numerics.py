"""Tolerance-aware dense complex linear algebra.

Every rank or membership decision in the package goes through this module, so
that one relative tolerance governs the whole pipeline.  Matrices are turned
into vectors in row-major order (``numpy.ravel`` with the default order).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

DEFAULT_TOL = 1e-9
DEFAULT_SEED = 0xC0FFEE


def default_tol():
    """Return the package tolerance, honouring the ``MPSX_TOL`` variable."""
    raw = os.environ.get("MPSX_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError as exc:
        raise InvalidInput(f"MPSX_TOL is not a number: {raw!r}") from exc
    if not value > 0:
        raise InvalidInput("MPSX_TOL must be positive")
    return value


def resolve_tol(tol):
    return default_tol() if tol is None else float(tol)


def make_rng(seed=None):
    return np.random.default_rng(DEFAULT_SEED if seed is None else seed)


def as_cmatrix(m, name="matrix"):
    """Coerce to a finite 2-d complex array."""
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2:
        raise InvalidInput(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} has non-finite entries")
    return arr


def vec(m):
    return np.asarray(m, dtype=complex).reshape(-1)


def unvec(v, D):
    return np.asarray(v, dtype=complex).reshape(D, D)


def rank(m, tol=None):
    """Number of singular values above ``tol`` times the largest one."""
    tol = resolve_tol(tol)
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    arr = np.asarray(m, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("non-finite entries")
    if arr.size == 0:
        return 0
    s = np.linalg.svd(arr, compute_uv=False)
    top = s[0] if s.size and s[0] > 0 else 1.0
    return int(np.sum(s > tol * top))


@dataclass(frozen=True)
class VectorSpace:
    """Subspace of C^n stored as orthonormal rows of ``basis``."""

    ambient_dim: int
    basis: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex).reshape(-1, self.ambient_dim)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self):
        return self.basis.shape[0]

    def projector(self):
        return self.basis.T @ self.basis.conj()

    def project(self, v):
        v = np.asarray(v, dtype=complex)
        return (v @ self.basis.conj().T) @ self.basis

    def coordinates(self, v):
        return np.asarray(v, dtype=complex) @ self.basis.conj().T

    def __len__(self):
        return self.dim


def zero_space(n, tol=None):
    return VectorSpace(n, np.zeros((0, n), dtype=complex), resolve_tol(tol))


def _residual_basis(vectors, scale, tol):
    """Orthonormal basis of the row space of ``vectors``, cut at ``tol*scale``."""
    if vectors.shape[0] == 0 or scale == 0:
        return np.zeros((0, vectors.shape[1]), dtype=complex)
    u, s, vh = np.linalg.svd(vectors, full_matrices=False)
    keep = s > tol * scale
    return vh[keep]


def orthonormalize(vectors, tol=None, scale=None):
    """Orthonormal basis for the span of ``vectors``.

    A direction is dropped when its residual is at most ``tol`` times the
    largest input norm (``scale`` overrides that reference norm).
    """
    tol = resolve_tol(tol)
    arr = np.asarray(vectors, dtype=complex)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise InvalidInput("vectors must share a positive ambient dimension")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("non-finite entries")
    n = arr.shape[1]
    if arr.shape[0] == 0:
        return zero_space(n, tol)
    if scale is None:
        scale = float(np.max(np.linalg.norm(arr, axis=1)))
    # Two passes of projection keep the result orthonormal to machine
    # precision even when the SVD cut is close to the threshold.
    basis = _residual_basis(arr, scale, tol)
    basis = _residual_basis(basis, 1.0, 1e-12) if basis.shape[0] else basis
    return VectorSpace(n, basis, tol)


def extend(space, vectors, scale=None):
    """Span of ``space`` together with ``vectors`` (same tolerance)."""
    arr = np.asarray(vectors, dtype=complex).reshape(-1, space.ambient_dim)
    if arr.shape[0] == 0:
        return space
    if scale is None:
        scale = float(np.max(np.linalg.norm(arr, axis=1)))
    resid = arr - space.project(arr)
    for _ in range(2):
        resid = resid - space.project(resid)
    new = _residual_basis(resid, scale, space.tol)
    if new.shape[0] == 0:
        return space
    merged = np.vstack([space.basis, new])
    q, _ = np.linalg.qr(merged.T)
    return VectorSpace(space.ambient_dim, q.T, space.tol)


def residual_norm(space, v):
    v = np.asarray(v, dtype=complex)
    return float(np.linalg.norm(v - space.project(v)))


def contains(space, v, tol=None):
    """Whether ``v`` lies in ``space`` up to a residual of ``tol*|v|``."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] != space.ambient_dim:
        raise InvalidInput(
            f"vector of length {v.shape[0]} in ambient dimension {space.ambient_dim}")
    tol = space.tol if tol is None else tol
    nv = np.linalg.norm(v)
    if nv == 0:
        return True
    return residual_norm(space, v) <= tol * nv


def contains_space(a, b, tol=None):
    """Whether every basis vector of ``b`` lies in ``a``."""
    return all(contains(a, v, tol) for v in b.basis)


def same_space(a, b, tol=None):
    return a.dim == b.dim and contains_space(a, b, tol) and contains_space(b, a, tol)


def complement(space):
    """Orthogonal complement within the ambient space."""
    n = space.ambient_dim
    if space.dim == 0:
        return VectorSpace(n, np.eye(n, dtype=complex), space.tol)
    # w is orthogonal to every basis row b iff conj(b) . w == 0
    kernel = null_space(space.basis.conj(), 1e-12)
    return VectorSpace(n, kernel.T, space.tol)


def intersect(a, b):
    """Basis of the intersection, via the null space of stacked complements."""
    if a.ambient_dim != b.ambient_dim:
        raise InvalidInput("spaces live in different ambient dimensions")
    n = a.ambient_dim
    tol = max(a.tol, b.tol)
    constraints = np.vstack([complement(a).basis.conj(), complement(b).basis.conj()])
    if constraints.shape[0] == 0:
        return VectorSpace(n, np.eye(n, dtype=complex), tol)
    kernel = null_space(constraints, tol)
    return VectorSpace(n, kernel.T, tol)


def null_space(m, tol=None):
    """Orthonormal columns spanning the right null space of ``m``."""
    tol = resolve_tol(tol)
    m = np.asarray(m, dtype=complex)
    if m.shape[0] == 0:
        return np.eye(m.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    top = s[0] if s.size and s[0] > 0 else 1.0
    r = int(np.sum(s > tol * top))
    return vh[r:].conj().T


def lstsq(a, b):
    """Least-squares solution and the residual norm of ``a x = b``."""
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    return x, float(np.linalg.norm(a @ x - b))
