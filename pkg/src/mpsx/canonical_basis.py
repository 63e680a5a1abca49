"""Structured bases of matrix algebras and spans, Γ tensors and the matrix-CF.

The structured basis is computed in three gauge steps on a triangularized
set:

1. a block-diagonal gauge making every diagonal block literally equal to the
   first block of its class (up to the proportionality constant in span mode);
2. in algebra mode, a product of unitriangular gauges ``1 + N``, one per
   superdiagonal, that removes every dependence of off-diagonal blocks on the
   diagonal.  Each factor solves the linear commutator equation
   ``a_(n) + N t - t N = 0`` for lifts ``a`` of the block-diagonal elements;
3. a scan of the block positions in ≼-order that finds the free blocks and
   expresses every other block as a scalar combination of free blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics as nx
from .block_structure import BlockPartition, intertwiner
from .errors import CapExceeded, InconsistentBasis, InvalidMode, StructureUncertain
from .matrix_sets import (DEFAULT_CAP_PHYS, MatrixSet, algebra_of_space,
                          generate_algebra, span_fixed_length)

DEFAULT_ELL_MAX = 16


def preceq_positions(b):
    """Block positions (i, j), i <= j, in ≼-order: by superdiagonal, then row."""
    return [(i, i + n) for n in range(b) for i in range(b - n)]


def _offsets(sizes):
    return np.concatenate([[0], np.cumsum(sizes)]).astype(int)


def _entries(mats, o, pos):
    i, j = pos
    return mats[:, o[i]:o[i + 1], o[j]:o[j + 1]].reshape(mats.shape[0], -1)


def _rel_rank(m, tol):
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > tol))


def _space_mats(vectors, D, tol):
    sp = nx.orthonormalize(np.asarray(vectors).reshape(-1, D * D), tol)
    return sp.basis.reshape(-1, D, D)


def _conj(mats, P, P_inv):
    return np.einsum("ij,ajk,kl->ail", P, mats, P_inv)


@dataclass(frozen=True)
class StructuredBasis:
    """Canonical basis [A]_e = Σ_{i<=j} [k_{ij;e} A]_{ij} of an algebra or span.

    Labels are integers; ``0 .. n_inf-1`` are the diagonal classes (Σ_∞) and
    the following ones are free off-diagonal blocks (Σ_f), both numbered by
    first occurrence in ≼-order.  ``r1``/``r2`` give each label's sector, with
    ``None`` for the vanishing class ε.  ``k[i, j, e]`` are the coefficients.
    ``gauge`` maps the coordinates of the input of the analysis (normally the
    original tensor) to the structured coordinates.
    """

    partition: BlockPartition
    n_inf: int
    free_pos: tuple
    k: np.ndarray
    r1: tuple
    r2: tuple
    mode: str
    length: int | None
    gauge: np.ndarray
    gauge_inv: np.ndarray
    m: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)

    @property
    def labels(self):
        return tuple(range(len(self.free_pos)))

    @property
    def sigma_inf(self):
        return tuple(range(self.n_inf))

    @property
    def sigma_f(self):
        return tuple(range(self.n_inf, len(self.free_pos)))

    @property
    def b(self):
        return self.partition.b

    @property
    def sizes(self):
        return self.partition.sizes

    def sectors(self):
        """Map (r1, r2) -> list of Σ_f labels."""
        out = {}
        for e in self.sigma_f:
            out.setdefault((self.r1[e], self.r2[e]), []).append(e)
        return out

    def shape(self, e):
        i, j = self.free_pos[e]
        return self.sizes[i], self.sizes[j]

    def vanishing_blocks(self):
        return {j for j, c in enumerate(self.partition.classes) if c is None}

    def element(self, e, content):
        """The matrix [content]_e in structured coordinates."""
        o = _offsets(self.sizes)
        out = np.zeros((o[-1], o[-1]), dtype=complex)
        content = np.asarray(content, dtype=complex)
        for i in range(self.b):
            for j in range(i, self.b):
                c = self.k[i, j, e]
                if c != 0:
                    out[o[i]:o[i + 1], o[j]:o[j + 1]] += c * content
        return out

    def free_contents(self, mat):
        """Contents of every free block of a structured-coordinate matrix."""
        o = _offsets(self.sizes)
        return [np.array(mat[o[i]:o[i + 1], o[j]:o[j + 1]]) for i, j in self.free_pos]

    def a_low(self):
        return np.moveaxis(self.k, 2, 0).copy()

    def name(self, e):
        """Label in the set notation {0,k} / {s} used for worked examples."""
        if e < self.n_inf:
            return "{0,%d}" % (e + 1)
        return "{%d}" % (e - self.n_inf + 1)

    @property
    def dim(self):
        return int(sum(a * b for a, b in (self.shape(e) for e in self.labels)))


def _diag_relations(V, sizes, tol, mode):
    """Classes, constants and gauges of the diagonal blocks of a space V."""
    b = len(sizes)
    o = _offsets(sizes)
    K = V.shape[0]
    scale = max(float(np.max(np.abs(V))), 1e-300) if V.size else 1.0
    coords = np.eye(K, dtype=complex)
    classes, mus, zs, reps = [None] * b, [0j] * b, [None] * b, []
    resid = {}
    for k in range(b):
        n = sizes[k]
        Mk = _entries(V, o, (k, k))
        if np.max(np.abs(Mk), initial=0) <= tol * scale:
            if n > 1:
                raise StructureUncertain(f"vanishing diagonal block {k} of size {n}")
            continue
        sub = Mk.T @ coords
        r = _rel_rank(sub, tol * scale * max(1, K))
        if r == n * n:
            classes[k], mus[k], zs[k] = len(reps), 1 + 0j, np.eye(n, dtype=complex)
            reps.append(k)
            coords = coords @ nx.null_space(sub, tol)
            continue
        if r != 0:
            raise StructureUncertain(
                f"diagonal block {k} is neither free nor determined ({r} of {n * n})",
                {f"diag_rank_{k}": r})
        for label, j in enumerate(reps):
            if sizes[j] != n:
                continue
            Mj = _entries(V, o, (j, j))
            Tt, res = nx.lstsq(Mj, Mk)
            if res > 1e3 * tol * max(1.0, np.linalg.norm(Mk)):
                continue
            T = Tt.T
            R = T.reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)
            u, _, _ = np.linalg.svd(R)
            mu = complex(np.trace((T @ np.eye(n).reshape(-1)).reshape(n, n)) / n)
            if abs(mu) <= tol:
                continue
            bj = V[:, o[j]:o[j + 1], o[j]:o[j + 1]]
            bk = V[:, o[k]:o[k + 1], o[k]:o[k + 1]]
            z = intertwiner(bj, bk, mu, tol)
            if z is None:
                continue
            if mode == "algebra" and abs(mu - 1) > 1e-7:
                raise StructureUncertain(f"algebra block {k} proportional with mu={mu}")
            classes[k], mus[k], zs[k] = label, (1 + 0j if mode == "algebra" else mu), z
            break
        else:
            raise StructureUncertain(f"diagonal block {k} depends on several classes")
    return classes, mus, zs, resid


def _z_gauge(sizes, zs):
    D = int(sum(sizes))
    o = _offsets(sizes)
    G = np.eye(D, dtype=complex)
    G_inv = np.eye(D, dtype=complex)
    for k, z in enumerate(zs):
        if z is None:
            continue
        G[o[k]:o[k + 1], o[k]:o[k + 1]] = np.linalg.inv(z)
        G_inv[o[k]:o[k + 1], o[k]:o[k + 1]] = z
    return G, G_inv


def _diag_generators(sizes, classes, rng):
    """Class identities plus two random elements of the block-diagonal algebra."""
    D = int(sum(sizes))
    o = _offsets(sizes)
    labels = sorted({c for c in classes if c is not None})
    gens = []
    for c in labels:
        t = np.zeros((D, D), dtype=complex)
        for k in range(len(sizes)):
            if classes[k] == c:
                t[o[k]:o[k + 1], o[k]:o[k + 1]] = np.eye(sizes[k])
        gens.append(t)
    for _ in range(2):
        t = np.zeros((D, D), dtype=complex)
        for c in labels:
            members = [k for k in range(len(sizes)) if classes[k] == c]
            n = sizes[members[0]]
            g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            for k in members:
                t[o[k]:o[k + 1], o[k]:o[k + 1]] = g
        gens.append(t)
    return gens


def _superdiag_gauge(V, sizes, classes, tol, rng):
    """Unitriangular gauge putting the block-diagonal algebra inside V."""
    b = len(sizes)
    D = int(sum(sizes))
    o = _offsets(sizes)
    gens = _diag_generators(sizes, classes, rng)
    P = np.eye(D, dtype=complex)
    P_inv = np.eye(D, dtype=complex)
    scale = max(float(np.max(np.abs(V))), 1.0)
    diag_pos = [(i, i) for i in range(b)]
    Mdiag = np.hstack([_entries(V, o, p) for p in diag_pos])
    lifts = []
    for t in gens:
        target = np.concatenate([t[o[i]:o[i + 1], o[i]:o[i + 1]].reshape(-1) for i in range(b)])
        x, res = nx.lstsq(Mdiag.T, target)
        if res > 1e3 * tol * max(1.0, np.linalg.norm(target)):
            raise StructureUncertain("block-diagonal part is not reachable in the algebra",
                                     {"lift_residual": res})
        lifts.append(np.einsum("k,kij->ij", x, V))
    worst = 0.0
    for n in range(1, b):
        pos = [(i, i + n) for i in range(b - n)]
        lower = [(i, i + m) for m in range(n) for i in range(b - m)]
        Mlow = np.hstack([_entries(V, o, p) for p in lower])
        R = np.einsum("kc,kij->cij", nx.null_space(Mlow.T, tol), V)
        KR = R.shape[0]
        Rpos = np.hstack([_entries(R, o, p) for p in pos]) if KR else np.zeros((0, 0))
        nvar = sum(sizes[i] * sizes[j] for i, j in pos)
        neq = nvar
        T = len(lifts)
        # unknowns: c (T*KR) then N (nvar)
        A = np.zeros((T * neq, T * KR + nvar), dtype=complex)
        rhs = np.zeros(T * neq, dtype=complex)
        for a_idx, (t, a) in enumerate(zip(gens, lifts)):
            row0 = a_idx * neq
            rhs[row0:row0 + neq] = -np.concatenate(
                [a[o[i]:o[i + 1], o[j]:o[j + 1]].reshape(-1) for i, j in pos])
            if KR:
                A[row0:row0 + neq, a_idx * KR:(a_idx + 1) * KR] = Rpos.T
            col = T * KR
            r = row0
            for i, j in pos:
                di, dj = sizes[i], sizes[j]
                tii = t[o[i]:o[i + 1], o[i]:o[i + 1]]
                tjj = t[o[j]:o[j + 1], o[j]:o[j + 1]]
                A[r:r + di * dj, col:col + di * dj] = (
                    np.kron(np.eye(di), tjj.T) - np.kron(tii, np.eye(dj)))
                r += di * dj
                col += di * dj
        sol, res = nx.lstsq(A[:, :T * KR], rhs) if KR else (np.zeros(0), np.linalg.norm(rhs))
        if res <= 1e3 * tol * scale:
            sol = np.concatenate([sol, np.zeros(nvar)])
        else:
            sol, res = nx.lstsq(A, rhs)
        worst = max(worst, res)
        if res > 1e4 * tol * scale:
            raise StructureUncertain(
                f"superdiagonal {n} keeps a dependence on the diagonal",
                {f"superdiag_{n}": res})
        N = np.zeros((D, D), dtype=complex)
        col = T * KR
        for i, j in pos:
            di, dj = sizes[i], sizes[j]
            N[o[i]:o[i + 1], o[j]:o[j + 1]] = sol[col:col + di * dj].reshape(di, dj)
            col += di * dj
        step = np.eye(D) + N
        step_inv = np.linalg.inv(step)
        new_lifts = []
        for a_idx, a in enumerate(lifts):
            if KR:
                a = a + np.einsum("k,kij->ij", sol[a_idx * KR:(a_idx + 1) * KR], R)
            new_lifts.append(step @ a @ step_inv)
        lifts = new_lifts
        V = _space_mats(_conj(V, step, step_inv), D, tol)
        P = step @ P
        P_inv = P_inv @ step_inv
    return P, P_inv, V, worst


def _scan(V, sizes, tol):
    """Free positions in ≼-order and the coefficient table k."""
    b = len(sizes)
    o = _offsets(sizes)
    K = V.shape[0]
    scale = max(float(np.max(np.abs(V))), 1e-300) if K else 1.0
    coords = np.eye(K, dtype=complex)
    free, diag_free = [], []
    for pos in preceq_positions(b):
        M = _entries(V, o, pos).T @ coords
        full = sizes[pos[0]] * sizes[pos[1]]
        r = _rel_rank(M, 100 * tol * scale)
        if r == full:
            (diag_free if pos[0] == pos[1] else free).append(pos)
        elif r != 0:
            raise StructureUncertain(
                f"block {pos} is neither zero nor free given earlier blocks ({r}/{full})",
                {f"rank_{pos[0]}_{pos[1]}": r})
        if coords.shape[1] and r:
            coords = coords @ nx.null_space(M, 100 * tol * scale / max(1.0, scale))
    free_pos = diag_free + free
    dim_free = sum(sizes[i] * sizes[j] for i, j in free_pos)
    if dim_free != K:
        raise StructureUncertain(
            f"free blocks carry {dim_free} parameters but the space has dimension {K}",
            {"dim_free": dim_free, "dim": K})
    Phi = np.hstack([_entries(V, o, p) for p in free_pos])
    inv = np.linalg.inv(Phi)
    elems = np.einsum("uk,kij->uij", inv, V)
    L = len(free_pos)
    k = np.zeros((b, b, L), dtype=complex)
    worst = 0.0
    start = 0
    for e, (fi, fj) in enumerate(free_pos):
        di, dj = sizes[fi], sizes[fj]
        units = elems[start:start + di * dj]
        start += di * dj
        for i in range(b):
            for j in range(i, b):
                blk = units[:, o[i]:o[i + 1], o[j]:o[j + 1]]
                if (sizes[i], sizes[j]) == (di, dj):
                    coeff = np.mean(blk.reshape(di * dj, -1).diagonal())
                    expect = coeff * np.eye(di * dj).reshape(di * dj, di, dj)
                    err = float(np.max(np.abs(blk - expect)))
                    if abs(coeff) <= 1e3 * tol:
                        coeff = 0
                    k[i, j, e] = coeff
                else:
                    err = float(np.max(np.abs(blk), initial=0))
                worst = max(worst, err)
    if worst > 1e5 * tol:
        raise StructureUncertain(
            "off-diagonal dependence is not a scalar combination of free blocks",
            {"k_residual": worst})
    return free_pos, len(diag_free), k, worst


def _classes_from_k(k, n_inf):
    b = k.shape[0]
    classes = []
    for i in range(b):
        labels = [e for e in range(n_inf) if abs(k[i, i, e]) > 0]
        classes.append(labels[0] if labels else None)
    return classes


def _structure(V, sizes, tol, mode, rng, gauge_only=False):
    D = int(sum(sizes))
    classes, mus, zs, _ = _diag_relations(V, sizes, tol, mode)
    G, G_inv = _z_gauge(sizes, zs)
    V = _space_mats(_conj(V, G, G_inv), D, tol)
    superdiag = 0.0
    if mode == "algebra":
        P, P_inv, V, superdiag = _superdiag_gauge(V, sizes, classes, tol, rng)
        G, G_inv = P @ G, G_inv @ P_inv
    if gauge_only:
        return G, G_inv
    free_pos, n_inf, k, kres = _scan(V, sizes, tol)
    return G, G_inv, free_pos, n_inf, k, {"k_residual": kres, "superdiag_residual": superdiag}


def build_structured_basis(s, part, mode="algebra", length=None, tol=None, seed=None):
    """Structured basis of Alg(s) (``mode="algebra"``) or of s^(length).

    ``s`` must be in the triangular gauge of ``part``.  Returns the basis and
    the extra gauge applied on top of ``s``; ``basis.gauge`` already includes
    ``part.gauge``.
    """
    tol = nx.resolve_tol(tol)
    rng = nx.make_rng(seed)
    sizes = part.sizes
    D = s.D
    if mode == "algebra":
        V = generate_algebra(s, tol).matrices()
        G, G_inv, free_pos, n_inf, k, res = _structure(V, sizes, tol, "algebra", rng)
    elif mode == "span":
        if length is None or length < 1:
            raise InvalidMode("span mode needs a length >= 1")
        span = span_fixed_length(s, length, tol)
        alg = algebra_of_space(span.space, D).matrices()
        A, A_inv = _structure(alg, sizes, tol, "algebra", rng, gauge_only=True)
        V = _space_mats(_conj(span.matrices(), A, A_inv), D, tol)
        G, G_inv, free_pos, n_inf, k, res = _structure(V, sizes, tol, "span", rng)
        G, G_inv = G @ A, A_inv @ G_inv
    else:
        raise InvalidMode(f"unknown mode {mode!r}")
    classes = _classes_from_k(k, n_inf)
    r1 = tuple(classes[i] for i, _ in free_pos)
    r2 = tuple(classes[j] for _, j in free_pos)
    mu = tuple(complex(k[i, i, classes[i]]) if classes[i] is not None else 0j
               for i in range(len(sizes)))
    from dataclasses import replace
    new_part = replace(part, classes=tuple(classes), mu=mu,
                       z=tuple(None for _ in sizes),
                       gauge=G @ part.gauge, gauge_inv=part.gauge_inv @ G_inv)
    m = {}
    if mode == "span":
        m = {e: length for e in range(n_inf, len(free_pos))}
    basis = StructuredBasis(new_part, n_inf, tuple(free_pos), k, r1, r2, mode, length,
                            new_part.gauge, new_part.gauge_inv, m, res)
    return basis, G


def isolatability_lengths(s_struct, basis, ell_max=DEFAULT_ELL_MAX, tol=None):
    """Smallest span length at which each free off-diagonal block is free.

    ``s_struct`` is the tensor in structured coordinates.  Labels whose block
    never becomes free up to ``ell_max`` map to ``None``.
    """
    tol = nx.resolve_tol(tol)
    sizes = basis.sizes
    o = _offsets(sizes)
    order = preceq_positions(basis.b)
    todo = {basis.free_pos[e]: e for e in basis.sigma_f}
    out = {e: None for e in basis.sigma_f}
    for ell in range(1, ell_max + 1):
        if not todo:
            break
        V = span_fixed_length(s_struct, ell, tol).matrices()
        scale = max(float(np.max(np.abs(V))), 1e-300)
        coords = np.eye(V.shape[0], dtype=complex)
        for pos in order:
            M = _entries(V, o, pos).T @ coords
            r = _rel_rank(M, 100 * tol * scale)
            if pos in todo and r == sizes[pos[0]] * sizes[pos[1]]:
                out[todo.pop(pos)] = ell
            if r and coords.shape[1]:
                coords = coords @ nx.null_space(M, 100 * tol)
    return out


@dataclass(frozen=True)
class GammaTensor:
    """Structure constants: A_low^i A_low^j = Σ_k g[i, j, k] A_low^k."""

    symbols: tuple
    g: np.ndarray
    residual: float = 0.0

    def __call__(self, i, j, k):
        return self.g[i, j, k]

    def nonzero(self, tol=1e-12):
        idx = np.argwhere(np.abs(self.g) > tol)
        return [(int(i), int(j), int(k), complex(self.g[i, j, k])) for i, j, k in idx]

    def associativity_residual(self):
        lhs = np.einsum("ijm,mkl->ijkl", self.g, self.g)
        rhs = np.einsum("jkm,iml->ijkl", self.g, self.g)
        return float(np.max(np.abs(lhs - rhs), initial=0))

    def fine_state(self, k, ell):
        """Γ_ℓ(k): the length-ℓ string state that coarse symbol k stands for."""
        n = len(self.symbols)
        cur = np.zeros((n,) * 1, dtype=complex)
        cur[k] = 1
        for _ in range(ell - 1):
            # split the last site: Σ_j cur[..., j] Γ^{ab}_j
            cur = np.tensordot(cur, self.g, axes=([-1], [2]))
        return cur

    def to_json(self, names=None):
        names = list(names or [str(s) for s in self.symbols])
        return {"symbols": names,
                "entries": [{"out": names[k], "in": [names[i], names[j]],
                             "w": [w.real, w.imag]} for i, j, k, w in self.nonzero()]}

    @classmethod
    def from_json(cls, doc):
        names = [str(s) for s in doc["symbols"]]
        n = len(names)
        g = np.zeros((n, n, n), dtype=complex)
        index = {s: a for a, s in enumerate(names)}
        for ent in doc["entries"]:
            i, j = (index[str(x)] for x in ent["in"])
            w = ent.get("w", [1.0, 0.0])
            g[i, j, index[str(ent["out"])]] += complex(w[0], w[1])
        return cls(tuple(names), g)


def gamma_from_low(a_low, tol=None):
    tol = nx.resolve_tol(tol)
    a_low = np.asarray(a_low, dtype=complex)
    L = a_low.shape[0]
    basis = a_low.reshape(L, -1).T
    prods = np.einsum("iab,jbc->ijac", a_low, a_low).reshape(L * L, -1).T
    sol = np.linalg.lstsq(basis, prods, rcond=None)[0]
    resid = float(np.max(np.abs(basis @ sol - prods), initial=0))
    if resid > 1e3 * tol * max(1.0, float(np.max(np.abs(a_low)))):
        raise InvalidMode(f"A_low basis is not closed under products (residual {resid:.2e})")
    g = sol.T.reshape(L, L, L)
    g[np.abs(g) < 1e3 * tol] = 0
    return GammaTensor(tuple(range(L)), g, resid)


def gamma_tensor(basis, tol=None):
    """Structure constants of the algebra spanned by the A_low matrices."""
    if basis.mode != "algebra":
        raise InvalidMode("Γ needs an algebra-mode basis; span bases are not closed")
    return gamma_from_low(basis.a_low(), tol)


@dataclass(frozen=True)
class MatrixCF:
    """A^x = Σ_e Σ_{ij} k_{ij;e} [A_e^x]_{ij}; ``a_up[x][e]`` is A_e^x."""

    a_low: np.ndarray
    a_up: tuple
    basis: StructuredBasis
    length: int = 1
    residual: float = 0.0

    @property
    def d(self):
        return len(self.a_up)

    def reconstruct(self, x):
        return sum(self.basis.element(e, self.a_up[x][e]) for e in self.basis.labels)


def matrix_cf(s_struct, basis, length=1, tol=None):
    """Decompose every matrix of a structured-gauge tensor in the basis."""
    tol = nx.resolve_tol(tol)
    mats = s_struct.mats
    scale = max(float(np.max(np.abs(mats))), 1.0)
    ups = []
    worst = 0.0
    for x in range(mats.shape[0]):
        contents = basis.free_contents(mats[x])
        rec = sum(basis.element(e, c) for e, c in enumerate(contents))
        err = float(np.max(np.abs(rec - mats[x]), initial=0))
        worst = max(worst, err)
        ups.append(tuple(contents))
    if worst > 1e3 * tol * scale:
        raise InconsistentBasis(f"tensor is not in the span of the basis (residual {worst:.2e})")
    return MatrixCF(basis.a_low(), tuple(ups), basis, length, worst)


def blocked_upper(cf, gamma, ell):
    """Blocked upper tensor: entry [w][e] is B_e^(ℓ)(w) via the Γ recursion."""
    labels = cf.basis.labels
    cur = [list(up) for up in cf.a_up]
    nz = gamma.nonzero()
    for _ in range(ell - 1):
        nxt = []
        for left in cur:
            for up in cf.a_up:
                out = [np.zeros(cf.basis.shape(g), dtype=complex) for g in labels]
                for e, f, g, w in nz:
                    a, b = left[e], up[f]
                    if a.shape[1] == b.shape[0] and out[g].shape == (a.shape[0], b.shape[1]):
                        out[g] = out[g] + w * (a @ b)
                nxt.append(out)
        cur = nxt
    return cur


@dataclass(frozen=True)
class BlockInjectivity:
    length: int | None
    rank: int
    needed: int
    left_inverse: np.ndarray | None = None
    forward: np.ndarray | None = None

    def delta_residual(self):
        if self.left_inverse is None:
            return None
        prod = self.forward @ self.left_inverse
        return float(np.max(np.abs(prod - np.eye(prod.shape[0])), initial=0))


def _forward_map(blocked):
    rows = []
    for per_word in blocked:
        rows.append(np.concatenate([m.reshape(-1) for m in per_word]))
    return np.array(rows).T


def block_injectivity(cf, ell_max=DEFAULT_ELL_MAX, cap=DEFAULT_CAP_PHYS, tol=None, gamma=None):
    """Smallest ℓ at which the blocked upper tensor is block-injective."""
    tol = nx.resolve_tol(tol)
    gamma = gamma or gamma_from_low(cf.a_low, tol)
    needed = cf.basis.dim
    last = 0
    for ell in range(1, ell_max + 1):
        if cf.d ** ell > cap:
            if ell == 1:
                raise CapExceeded(f"{cf.d} physical indices exceed cap {cap}", cap)
            break
        F = _forward_map(blocked_upper(cf, gamma, ell))
        last = nx.rank(F, tol) if F.size else 0
        if last == needed:
            return BlockInjectivity(ell, last, needed, np.linalg.pinv(F), F)
    return BlockInjectivity(None, last, needed)


def block_injectivity_length(cf, ell_max=DEFAULT_ELL_MAX, cap=DEFAULT_CAP_PHYS, tol=None):
    return block_injectivity(cf, ell_max, cap, tol).length
