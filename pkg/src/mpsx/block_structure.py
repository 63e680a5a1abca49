"""Block-upper-triangular form, periods and classes of diagonal blocks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import numerics as nx
from .errors import StructureUncertain
from .matrix_sets import (DEFAULT_CAP_PHYS, DEFAULT_CAP_LEN, MatrixSet,
                          block_physical, span_fixed_length, unital_algebra)

DEFAULT_QMAX = 720
EPS = None  # class marker for vanishing 1x1 diagonal blocks


@dataclass(frozen=True)
class BlockPartition:
    """Block structure of a triangularized set.

    ``classes[j]`` is the label of diagonal block j or ``None`` for a block in
    the vanishing class.  For every non-vanishing block,
    ``block_k = mu[k] * Z[k] @ block_rep @ inv(Z[k])`` where ``rep`` is the
    first block of the class.  ``q is None`` stands for q = infinity.
    """

    sizes: tuple
    gauge: np.ndarray
    gauge_inv: np.ndarray
    classes: tuple = ()
    mu: tuple = ()
    z: tuple = ()
    periods: tuple = ()
    p: int = 1
    q: int | None = 1
    witness_mu: complex | None = None
    L0_diag: int | None = None
    LBI_diag: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def b(self):
        return len(self.sizes)

    @property
    def D(self):
        return int(sum(self.sizes))

    @property
    def offsets(self):
        return tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.sizes)]))

    def block(self, m, i, j):
        o = self.offsets
        return m[..., o[i]:o[i + 1], o[j]:o[j + 1]]

    def slices(self, i):
        o = self.offsets
        return slice(o[i], o[i + 1])

    @property
    def n_classes(self):
        labels = [c for c in self.classes if c is not None]
        return max(labels) + 1 if labels else 0

    def representative(self, label):
        return self.classes.index(label)

    def class_members(self, label):
        return [j for j, c in enumerate(self.classes) if c == label]


def _scale(mats):
    return max(float(np.max(np.abs(mats))), 1e-300)


def _standard_cuts(mats, tol):
    n = mats.shape[-1]
    sc = _scale(mats)
    return [k for k in range(1, n) if np.max(np.abs(mats[:, k:, :k])) <= tol * sc]


def _radical(alg_mats, tol):
    """Basis of the radical via the trace form (zero in characteristic 0)."""
    gram = np.einsum("aij,bji->ab", alg_mats, alg_mats)
    kern = nx.null_space(gram, max(tol, 1e-10))
    return np.einsum("ak,aij->kij", kern, alg_mats)


def _commutant(mats, tol):
    n = mats.shape[-1]
    eye = np.eye(n)
    rows = [np.kron(eye, a.T) - np.kron(a, eye) for a in mats]
    kern = nx.null_space(np.vstack(rows), max(tol, 1e-10))
    return kern.T.reshape(-1, n, n)


def _is_invariant(mats, q, tol):
    proj = np.eye(q.shape[0]) - q @ q.conj().T
    return np.max(np.abs(proj @ mats @ q)) <= max(tol, 1e-10) * 10 * _scale(mats)


def _invariant_subspace(mats, tol, rng):
    """Orthonormal columns of a proper invariant subspace, or None."""
    n = mats.shape[-1]
    alg = unital_algebra(mats, tol)
    if alg.dim == n * n:
        return None
    amats = alg.matrices()
    rad = _radical(amats, tol)
    if rad.shape[0]:
        cols = np.concatenate(list(rad), axis=1)
        u, s, _ = np.linalg.svd(cols, full_matrices=False)
        r = int(np.sum(s > max(tol, 1e-10) * s[0]))
        if 0 < r < n:
            q = u[:, :r]
            if _is_invariant(mats, q, tol):
                return q
    comm = _commutant(mats, tol)
    if comm.shape[0] > 1:
        for _ in range(8):
            coeffs = rng.normal(size=comm.shape[0]) + 1j * rng.normal(size=comm.shape[0])
            c = np.einsum("k,kij->ij", coeffs, comm)
            evals = np.linalg.eigvals(c)
            for lam in evals:
                kern = nx.null_space(c - lam * np.eye(n), 1e-7)
                if 0 < kern.shape[1] < n:
                    q, _ = np.linalg.qr(kern)
                    if _is_invariant(mats, q, tol):
                        return q
    raise StructureUncertain(
        "reducible block (algebra dimension {} < {}) but no invariant subspace "
        "was isolated".format(alg.dim, n * n), {"algebra_dim": alg.dim})


def _triangularize_rec(mats, tol, rng):
    """Unitary Q and block sizes with Q^H A Q block upper triangular."""
    n = mats.shape[-1]
    if n == 1:
        return np.eye(1, dtype=complex), [1]
    cuts = _standard_cuts(mats, tol)
    if cuts:
        bounds = [0] + cuts + [n]
        q = np.zeros((n, n), dtype=complex)
        sizes = []
        for a, b in zip(bounds[:-1], bounds[1:]):
            qs, ss = _triangularize_rec(mats[:, a:b, a:b], tol, rng)
            q[a:b, a:b] = qs
            sizes.extend(ss)
        return q, sizes
    sub = _invariant_subspace(mats, tol, rng)
    if sub is None:
        return np.eye(n, dtype=complex), [n]
    k = sub.shape[1]
    full, _ = np.linalg.qr(np.hstack([sub, rng.normal(size=(n, n - k))]))
    full[:, :k] = sub
    full, _ = np.linalg.qr(full)
    rot = np.einsum("ji,ajk,kl->ail", full.conj(), mats, full)
    q1, s1 = _triangularize_rec(rot[:, :k, :k], tol, rng)
    q2, s2 = _triangularize_rec(rot[:, k:, k:], tol, rng)
    inner = np.zeros((n, n), dtype=complex)
    inner[:k, :k] = q1
    inner[k:, k:] = q2
    return full @ inner, s1 + s2


def triangularize(s, tol=None, seed=None):
    """Gauge P with P A^i P^-1 block upper triangular, irreducible diagonal.

    Irreducibility of every diagonal block is certified by Burnside's theorem:
    the unital algebra of the block is the full matrix algebra.
    """
    tol = nx.resolve_tol(tol)
    rng = nx.make_rng(seed)
    q, sizes = _triangularize_rec(np.array(s.mats), tol, rng)
    P = q.conj().T
    P_inv = q
    out = s.conjugate(P, P_inv)
    # zero the strictly lower-block part that is numerically negligible
    mats = np.array(out.mats)
    o = np.concatenate([[0], np.cumsum(sizes)])
    for j in range(len(sizes)):
        mats[:, o[j + 1]:, o[j]:o[j + 1]] = 0
    part = BlockPartition(tuple(int(x) for x in sizes), P, P_inv)
    for j, size in enumerate(sizes):
        blk = mats[:, o[j]:o[j + 1], o[j]:o[j + 1]]
        if size > 1 and unital_algebra(blk, tol).dim != size * size:
            raise StructureUncertain(f"diagonal block {j} failed the Burnside check")
    return part, MatrixSet(mats)


def _transfer(b, c=None):
    c = b if c is None else c
    return np.einsum("aij,akl->ikjl", b, c.conj()).reshape(
        b.shape[1] * c.shape[1], b.shape[2] * c.shape[2])


def _spectral_radius(m):
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def block_period(blk, tol=None):
    """Number of peripheral eigenvalues of the block transfer operator."""
    tol = nx.resolve_tol(tol)
    ev = np.linalg.eigvals(_transfer(blk))
    rho = float(np.max(np.abs(ev)))
    if rho <= tol * max(1.0, _scale(blk) ** 2):
        return 1
    return int(np.sum(np.abs(ev) >= rho * (1 - 1e-6)))


def detect_period(s, part, tol=None):
    """Least common multiple of the periods of the diagonal blocks."""
    periods = [block_period(part.block(s.mats, j, j), tol) for j in range(part.b)]
    return math.lcm(*periods), tuple(periods)


def intertwiner(b, c, mu, tol):
    """Z with c^i = mu Z b^i Z^-1 for all i, or None."""
    n = b.shape[1]
    eye = np.eye(n)
    # c Z - mu Z b = 0, row-major vectorization of Z
    rows = [np.kron(ci, eye) - mu * np.kron(eye, bi.T) for bi, ci in zip(b, c)]
    stacked = np.vstack(rows)
    _, s, vh = np.linalg.svd(stacked)
    z = vh[-1].conj().reshape(n, n)
    if abs(np.linalg.det(z)) < 1e-12 * np.linalg.norm(z) ** n:
        return None
    z_inv = np.linalg.inv(z)
    resid = np.max(np.abs(c - mu * np.einsum("ij,ajk,kl->ail", z, b, z_inv)))
    if resid > max(tol, 1e-12) * 100 * max(_scale(b), _scale(c)):
        return None
    return z


def equivalent_blocks(b, c, tol=None):
    """(mu, Z) with c = mu Z b Z^-1 when the blocks are proportional, else None."""
    tol = nx.resolve_tol(tol)
    if b.shape != c.shape:
        return None
    rb = _spectral_radius(_transfer(b))
    rc = _spectral_radius(_transfer(c))
    if rb == 0 or rc == 0:
        return None
    mixed = _transfer(b, c) / math.sqrt(rb * rc)
    ev = np.linalg.eigvals(mixed)
    lam = ev[np.argmax(np.abs(ev))]
    if abs(abs(lam) - 1) > 1e-6:
        return None
    nu = lam * math.sqrt(rb / rc)
    mu = 1 / nu
    z = intertwiner(b, c, mu, tol)
    if z is None:
        return None
    return complex(mu), z


def _root_order(mus, qmax, tol):
    for n in range(1, qmax + 1):
        if all(abs(m ** n - 1) <= 1e-7 * n for m in mus):
            return n
    return None


def _wielandt_length(blk, tol, cap):
    n = blk.shape[-1]
    s = MatrixSet(blk)
    for ell in range(1, cap + 1):
        if span_fixed_length(s, ell, tol).dim == n * n:
            return ell
    return None


def classify_diagonal(s, part, tol=None, qmax=DEFAULT_QMAX, cap_len=DEFAULT_CAP_LEN):
    """Fill classes, proportionality constants and q for a period-free set."""
    tol = nx.resolve_tol(tol)
    mats = s.mats
    classes = [None] * part.b
    mu = [0j] * part.b
    zs = [None] * part.b
    reps = []
    for k in range(part.b):
        blk = part.block(mats, k, k)
        if np.max(np.abs(blk)) <= tol * _scale(mats):
            continue
        for label, j in enumerate(reps):
            found = equivalent_blocks(part.block(mats, j, j), blk, tol)
            if found is not None:
                classes[k] = label
                mu[k], zs[k] = found
                break
        else:
            classes[k] = len(reps)
            reps.append(k)
            mu[k] = 1 + 0j
            zs[k] = np.eye(part.sizes[k], dtype=complex)
    nonrep = [mu[k] for k in range(part.b) if classes[k] is not None and k not in reps]
    witness = None
    q = 1
    for m in nonrep:
        if abs(abs(m) - 1) > 1e-7:
            witness = m
            q = None
            break
    if q is not None:
        q = _root_order(nonrep, qmax, tol)
        if q is None:
            witness = next((m for m in nonrep if _root_order([m], qmax, tol) is None), None)
    lengths = []
    for j in range(part.b):
        if classes[j] is None:
            continue
        lengths.append(_wielandt_length(part.block(mats, j, j), tol, cap_len))
    L0 = None if any(x is None for x in lengths) else max(lengths, default=1)
    return replace(part, classes=tuple(classes), mu=tuple(mu), z=tuple(zs), q=q,
                   witness_mu=witness, L0_diag=L0, LBI_diag=L0)


def analyze_blocks(s, tol=None, seed=None, qmax=DEFAULT_QMAX, cap_phys=DEFAULT_CAP_PHYS):
    """Triangularize, remove periods by blocking, and classify.

    Returns the partition of the p-blocked set together with that set (in the
    triangular gauge).  ``partition.gauge`` maps original coordinates to it.
    """
    part, st = triangularize(s, tol, seed)
    p, periods = detect_period(st, part, tol)
    if p > 1:
        blocked = block_physical(st, p, cap_phys)
        part2, st = triangularize(blocked, tol, seed)
        gauge = part2.gauge @ part.gauge
        gauge_inv = part.gauge_inv @ part2.gauge_inv
        part = replace(part2, gauge=gauge, gauge_inv=gauge_inv)
    part = replace(part, p=p, periods=periods)
    return classify_diagonal(st, part, tol, qmax), st
