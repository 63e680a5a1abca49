"""Sets of matrices, their fixed-length spans and the algebra they generate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics as nx
from .errors import CapExceeded, InvalidInput

DEFAULT_CAP_PHYS = 4096
DEFAULT_CAP_LEN = 64


@dataclass(frozen=True)
class MatrixSet:
    """The tensor {A^i}: ``mats[i]`` is the D x D matrix for physical index i."""

    mats: np.ndarray

    def __post_init__(self):
        arr = np.array(self.mats, dtype=complex)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise InvalidInput(f"expected shape (d, D, D), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidInput("need d >= 1 and D >= 1")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("matrices contain non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "mats", arr)

    @property
    def d(self):
        return self.mats.shape[0]

    @property
    def D(self):
        return self.mats.shape[1]

    def __getitem__(self, i):
        return self.mats[i]

    def __iter__(self):
        return iter(self.mats)

    def __len__(self):
        return self.d

    def conjugate(self, P, P_inv=None):
        """Return {P A^i P^-1}."""
        P = np.asarray(P, dtype=complex)
        P_inv = np.linalg.inv(P) if P_inv is None else P_inv
        return MatrixSet(np.einsum("ij,ajk,kl->ail", P, self.mats, P_inv))

    def word(self, letters):
        out = np.eye(self.D, dtype=complex)
        for x in letters:
            out = out @ self.mats[x]
        return out


@dataclass(frozen=True)
class MatSpan:
    D: int
    length: int
    space: nx.VectorSpace

    @property
    def dim(self):
        return self.space.dim

    def matrices(self):
        return self.space.basis.reshape(-1, self.D, self.D)


@dataclass(frozen=True)
class AlgebraRep:
    D: int
    space: nx.VectorSpace
    r_alg: int

    @property
    def dim(self):
        return self.space.dim

    def matrices(self):
        return self.space.basis.reshape(-1, self.D, self.D)


def _space_of_matrices(mats, tol):
    mats = np.asarray(mats, dtype=complex)
    D = mats.shape[-1]
    return nx.orthonormalize(mats.reshape(-1, D * D), tol)


def product_space(u, v, D, chunk=64):
    """span{a b : a in u, b in v} for spaces of vectorized D x D matrices."""
    ua = u.basis.reshape(-1, D, D)
    va = v.basis.reshape(-1, D, D)
    out = nx.zero_space(D * D, u.tol)
    if ua.shape[0] == 0 or va.shape[0] == 0:
        return out
    blocks = []
    scale = 0.0
    for start in range(0, ua.shape[0], chunk):
        prods = np.einsum("aij,bjk->abik", ua[start:start + chunk], va)
        prods = prods.reshape(-1, D * D)
        scale = max(scale, float(np.max(np.linalg.norm(prods, axis=1))))
        blocks.append(prods)
    for prods in blocks:
        out = nx.extend(out, prods, scale=scale)
        if out.dim == D * D:
            break
    return out


def span_fixed_length(s, length, tol=None):
    """Span of all products of ``length`` matrices, by repeated doubling."""
    if length < 1:
        raise InvalidInput("span length must be >= 1")
    tol = nx.resolve_tol(tol)
    D = s.D
    power = _space_of_matrices(s.mats, tol)
    result = None
    n = length
    while n:
        if n & 1:
            result = power if result is None else product_space(result, power, D)
        n >>= 1
        if n:
            power = product_space(power, power, D)
    return MatSpan(D, length, result)


def algebra_of_space(space, D, max_steps=None):
    """Algebra generated by a space of matrices, with its length r_alg."""
    limit = max_steps or D * D + 1
    gens = space
    acc = space
    for n in range(1, limit + 1):
        nxt = nx.extend(acc, product_space(acc, gens, D).basis)
        if nxt.dim == acc.dim:
            return AlgebraRep(D, acc, n)
        acc = nxt
    return AlgebraRep(D, acc, limit)


def generate_algebra(s, tol=None):
    """Alg(A^(1)): union of spans until the dimension stops growing."""
    tol = nx.resolve_tol(tol)
    return algebra_of_space(_space_of_matrices(s.mats, tol), s.D)


def unital_algebra(mats, tol=None):
    """Algebra generated by the matrices together with the identity."""
    mats = np.asarray(mats, dtype=complex)
    D = mats.shape[-1]
    gens = np.concatenate([mats.reshape(-1, D, D), np.eye(D, dtype=complex)[None]])
    return algebra_of_space(_space_of_matrices(gens, nx.resolve_tol(tol)), D)


def identity0(basis_info):
    """Identity with zeros on vanishing diagonal blocks, in original coordinates."""
    sizes = basis_info.partition.sizes
    vanishing = basis_info.vanishing_blocks()
    diag = []
    for j, size in enumerate(sizes):
        diag.extend([0.0 if j in vanishing else 1.0] * size)
    core = np.diag(np.array(diag, dtype=complex))
    return basis_info.gauge_inv @ core @ basis_info.gauge


def contains_identity0(s, length, id0, tol=None):
    span = span_fixed_length(s, length, tol)
    return nx.contains(span.space, nx.vec(id0))


def block_physical(s, length, cap=DEFAULT_CAP_PHYS):
    """All ``length``-fold products, indexed big-endian by the word."""
    if length < 1:
        raise InvalidInput("blocking length must be >= 1")
    size = s.d ** length
    if size > cap:
        raise CapExceeded(
            f"blocking {length} sites needs {s.d}^{length} = {size} matrices "
            f"(cap {cap})", bound=cap)
    mats = s.mats
    for _ in range(length - 1):
        mats = np.einsum("aij,bjk->abik", mats, s.mats).reshape(-1, s.D, s.D)
    return MatrixSet(mats)
