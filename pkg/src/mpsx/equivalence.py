"""Exact equivalence of MPS-X families through weighted finite automata.

Also covers what is needed to compare two representations: negligible free
blocks, physical subspaces, reduction of a pair and the stacking trick that
relates the upper tensors of two equivalent representations.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import numerics as nx
from .errors import InvalidInput, NotEquivalent, RelationNotFound, StructureUncertain
from .matrix_sets import MatrixSet
from .mpsx_states import MpsX


@dataclass(frozen=True)
class Wfa:
    """weight(w) = initial · T^{w1} ... T^{wN} · final."""

    initial: np.ndarray
    transitions: np.ndarray
    final: np.ndarray

    @property
    def d(self):
        return self.transitions.shape[0]

    @property
    def n(self):
        return self.initial.shape[0]

    def weight(self, word):
        v = self.initial
        for x in word:
            v = v @ self.transitions[x]
        return complex(v @ self.final)


def to_wfa(m, check_words=8, seed=None):
    """Linear representation of Tr[X A^w] on D² states.

    The state after reading w is the row-major vec of X A^w, so the
    transitions are I ⊗ A^x and the final vector is vec(I).
    """
    D = m.D
    eye = np.eye(D)
    T = np.array([np.kron(eye, a) for a in m.tensor.mats])
    w = Wfa(nx.vec(m.X), T, nx.vec(eye))
    rng = nx.make_rng(seed)
    scale = max(float(np.linalg.norm(m.X)), 1.0)
    for _ in range(check_words):
        word = rng.integers(0, m.d, size=int(rng.integers(0, 6)))
        ref = m.amplitude(word)
        if abs(w.weight(word) - ref) > 1e-8 * scale * max(1.0, abs(ref)):
            raise AssertionError("automaton does not reproduce the amplitudes")
    return w


def _difference(a, b):
    if a.d != b.d:
        raise InvalidInput(f"alphabets differ: {a.d} vs {b.d}")
    na, nb = a.n, b.n
    T = np.zeros((a.d, na + nb, na + nb), dtype=complex)
    T[:, :na, :na] = a.transitions
    T[:, na:, na:] = b.transitions
    init = np.concatenate([a.initial, -b.initial])
    final = np.concatenate([a.final, b.final])
    return init, T, final


def _level_words(d, n):
    if n == 0:
        return [()]
    return [tuple(int(c) for c in np.unravel_index(i, (d,) * n)) for i in range(d ** n)]


def _scale_of(a, b):
    return max(np.linalg.norm(a.initial) * np.linalg.norm(a.final),
               np.linalg.norm(b.initial) * np.linalg.norm(b.final), 1.0)


def _forward_basis(init, T, start, tol):
    """Orthonormal basis of the space reached from the given start words."""
    basis = np.zeros((0, init.shape[0]), dtype=complex)
    queue = deque()
    for word in start:
        v = init
        for x in word:
            v = v @ T[x]
        queue.append(v)
    ref = max(float(np.linalg.norm(init)), 1e-300)
    while queue:
        v = queue.popleft()
        r = v - (v @ basis.conj().T) @ basis if basis.size else v
        nr = float(np.linalg.norm(r))
        if nr <= tol * max(ref, float(np.linalg.norm(v))):
            continue
        # second pass keeps the basis orthonormal to working precision
        r = r - (r @ basis.conj().T) @ basis if basis.size else r
        r = r / np.linalg.norm(r)
        basis = np.vstack([basis, r])
        for x in range(T.shape[0]):
            queue.append(r @ T[x])
    return basis


def wfa_compare(a, b, min_length=0, tol=None):
    """(equal, witness): equality of the weights of all words of length >= min_length.

    The witness is the first distinguishing word in length-lexicographic
    order, or ``None`` when the automata are equal.
    """
    tol = nx.resolve_tol(tol)
    init, T, final = _difference(a, b)
    d = T.shape[0]
    start = _level_words(d, min_length) if d ** min_length <= 4096 else None
    if start is None:
        raise InvalidInput("min_length too large for the alphabet")
    basis = _forward_basis(init, T, start, tol)
    scale = _scale_of(a, b)
    fnorm = max(float(np.linalg.norm(final)), 1e-300)
    # basis rows are unit vectors; compare their functional against the final norm
    if basis.size == 0 or float(np.max(np.abs(basis @ final))) <= 1e3 * tol * fnorm:
        return True, None
    return False, _witness(init, T, final, min_length, tol, scale)


def _orth(vectors, n):
    sp = nx.orthonormalize(np.array(vectors), 1e-12)
    return sp.basis if sp.dim else np.zeros((0, n), dtype=complex)


def _witness(init, T, final, min_length, tol, scale):
    """First distinguishing word in length-lexicographic order.

    Per-level forward spaces give the shortest length, backward spaces
    {T^w final : |w| = k} then fix the letters greedily.
    """
    d, n = T.shape[0], init.shape[0]
    fn = final / np.linalg.norm(final)
    level = _orth([init], n)
    length = 0
    while True:
        if length >= min_length and level.size and float(np.max(np.abs(level @ fn))) > 1e3 * tol:
            break
        if length > min_length + n + 1:
            return None
        level = _orth([v @ T[x] for v in level for x in range(d)], n)
        length += 1
    back = [_orth([fn], n)]
    for _ in range(length):
        back.append(_orth([T[x] @ v for v in back[-1] for x in range(d)], n))
    word = []
    v = init / np.linalg.norm(init)
    for pos in range(length):
        B = back[length - pos - 1]
        for x in range(d):
            w = v @ T[x]
            nw = float(np.linalg.norm(w))
            if nw > 0 and B.size and float(np.max(np.abs(B @ w))) > 1e3 * tol * nw:
                word.append(x)
                v = w / nw
                break
        else:
            return None
    return tuple(word)


def wfa_equal(a, b, tol=None):
    """Exact equality of the two weight functions."""
    return wfa_compare(a, b, 0, tol)[0]


def mpsx_equal(a, b, min_length=0, tol=None):
    return wfa_compare(to_wfa(a), to_wfa(b), min_length, tol)


def structured_form(m, mode="span", length=1, tol=None, seed=None, qmax=720):
    """(m in the structured gauge, matrix-CF) for a tensor at blocking ``length``."""
    from .block_structure import analyze_blocks
    from .canonical_basis import build_structured_basis, matrix_cf

    tol = nx.resolve_tol(tol)
    mb = m.blocked(length) if length > 1 else m
    part, st = analyze_blocks(mb.tensor, tol, seed, qmax)
    basis, G = build_structured_basis(st, part, mode, length=1 if mode == "span" else None,
                                      tol=tol, seed=seed)
    ms = MpsX(st.conjugate(G), basis.gauge @ mb.X @ basis.gauge_inv)
    return ms, matrix_cf(ms.tensor, basis, length=length, tol=tol)


def _rebuild(cf, drop):
    D = cf.basis.gauge.shape[0]
    mats = np.zeros((cf.d, D, D), dtype=complex)
    for x in range(cf.d):
        for e in cf.basis.labels:
            if e not in drop:
                mats[x] += cf.basis.element(e, cf.a_up[x][e])
    return MatrixSet(mats)


def negligible_blocks(m, cf=None, tol=None, seed=None):
    """Labels whose free block can be zeroed without changing the family.

    ``m`` must be in the coordinates of ``cf``; when ``cf`` is omitted the
    span-mode matrix-CF at length one is computed and labels refer to it.
    If the single-site span is not block structured the algebra basis is used.
    """
    if cf is None:
        try:
            m, cf = structured_form(m, "span", 1, tol, seed)
        except StructureUncertain:
            m, cf = structured_form(m, "algebra", 1, tol, seed)
    ref = to_wfa(m)
    out = set()
    for t in cf.basis.labels:
        trial = MpsX(_rebuild(cf, {t}), m.X)
        if wfa_equal(ref, to_wfa(trial), tol):
            out.add(t)
    return out


def physical_subspace(s, tol=None):
    """Span of the vectors (Tr[Y A^i])_i over all Y, inside C^d."""
    s = s if isinstance(s, MatrixSet) else MatrixSet(s)
    M = s.mats.reshape(s.d, -1)
    return nx.orthonormalize(M.T, nx.resolve_tol(tol))


def _apply_physical(P, s):
    return MatrixSet(np.einsum("ij,jab->iab", P, s.mats))


def reduce_pair(a, b, tol=None):
    """Project both physical legs onto V_A ∩ V_B."""
    tol = nx.resolve_tol(tol)
    if a.d != b.d:
        raise InvalidInput("tensors act on different physical dimensions")
    if not wfa_equal(to_wfa(a), to_wfa(b), tol):
        raise NotEquivalent("the two MPS-X generate different families")
    inter = nx.intersect(physical_subspace(a.tensor, tol), physical_subspace(b.tensor, tol))
    P = inter.projector() if inter.dim else np.zeros((a.d, a.d), dtype=complex)
    ra = MpsX(_apply_physical(P, a.tensor), a.X)
    rb = MpsX(_apply_physical(P, b.tensor), b.X)
    if not wfa_equal(to_wfa(ra), to_wfa(rb), tol):
        raise NotEquivalent("projected pair is no longer equivalent")
    return ra, rb


@dataclass(frozen=True)
class GaugeRelation:
    """Relation B_up^t = Σ_s P_B[s, t] C_up^s between two representations.

    C is A ⊕ B written in a basis whose first labels coincide with A's basis
    (``n_a`` of them, in matrix-CF coordinates); the remaining labels have a
    vanishing A-part.  ``P_B`` maps the coordinates of B's free blocks to
    those of C.  ``pi`` sends each Σ_∞ label of B to a label of C and
    ``alpha`` holds the scalar it picks up.  ``z`` holds the per-class gauges,
    which are identities when every block is one-dimensional.
    """

    P_B: np.ndarray
    pi: dict
    alpha: dict
    z: dict
    n_a: int
    c_up: np.ndarray
    b_up: np.ndarray
    residuals: dict = field(default_factory=dict)


def _coords(cf):
    """Span elements of a matrix-CF basis, one per (label, content entry)."""
    basis = cf.basis
    elems, index = [], []
    for e in basis.labels:
        r, c = basis.shape(e)
        for p in range(r):
            for q in range(c):
                E = np.zeros((r, c))
                E[p, q] = 1
                elems.append(basis.element(e, E))
                index.append((e, p, q))
    return np.array(elems), index


def _up_coords(cf, index):
    return np.array([[cf.a_up[x][e][p, q] for e, p, q in index] for x in range(cf.d)])


def _preceq_order(basis):
    from .canonical_basis import preceq_positions

    o = np.concatenate([[0], np.cumsum(basis.sizes)]).astype(int)
    D = o[-1]
    order = []
    for i, j in preceq_positions(basis.b):
        for p in range(o[i], o[i + 1]):
            for q in range(o[j], o[j + 1]):
                order.append(p * D + q)
    rest = sorted(set(range(D * D)) - set(order))
    return np.array(order + rest)


def stack_and_relate(a, b, cf_a=None, cf_b=None, tol=None, seed=None):
    """Stacking trick for two representations of the same family.

    Without ``cf_a``/``cf_b`` both tensors are brought to the span-mode
    matrix-CF at length one first.  Raises :class:`RelationNotFound` when the
    linear systems have no consistent solution.
    """
    tol = nx.resolve_tol(tol)
    if cf_a is None:
        a, cf_a = structured_form(a, "span", 1, tol, seed)
    if cf_b is None:
        b, cf_b = structured_form(b, "span", 1, tol, seed)
    if a.d != b.d:
        raise InvalidInput("tensors act on different physical dimensions")
    DA, DB = a.D, b.D
    ea, ia = _coords(cf_a)
    eb, ib = _coords(cf_b)
    va = ea.reshape(len(ea), -1)
    vb = eb.reshape(len(eb), -1)
    # span of C = A ⊕ B, stored as (vec A-part | vec B-part)
    rows = np.hstack([a.tensor.mats.reshape(a.d, -1), b.tensor.mats.reshape(b.d, -1)])
    scale = max(float(np.max(np.abs(rows), initial=0)), 1.0)
    cspace = nx.orthonormalize(rows, tol, scale)
    Q = cspace.basis
    QA, QB = Q[:, :DA * DA], Q[:, DA * DA:]
    ker = nx.null_space(QA.T, tol)
    W = (ker.T @ QB) if ker.size else np.zeros((0, DB * DB), dtype=complex)
    # echelon form of the B-only part in ≼ order of B's blocks
    order = _preceq_order(cf_b.basis)
    W = W[:, order]
    pivots, wrows = [], []
    for row in W:
        for pv, w in zip(pivots, wrows):
            row = row - row[pv] * w
        nz = np.flatnonzero(np.abs(row) > 1e3 * tol * max(1.0, float(np.max(np.abs(row), initial=0))))
        if nz.size == 0:
            continue
        pv = int(nz[0])
        row = row / row[pv]
        for k, w in enumerate(wrows):
            wrows[k] = w - w[pv] * row
        pivots.append(pv)
        wrows.append(row)
    inv_order = np.argsort(order)
    w_nat = [w[inv_order] for w in wrows]
    # lift every A coordinate into C and clear the B-only pivots
    lifts = []
    worst = 0.0
    for v in va:
        y, _ = nx.lstsq(QA.T, v)
        err = float(np.max(np.abs(QA.T @ y - v), initial=0))
        worst = max(worst, err)
        beta = (QB.T @ y)[order]
        for pv, w in zip(pivots, wrows):
            beta = beta - beta[pv] * w
        lifts.append(beta[inv_order])
    if worst > 1e3 * tol:
        raise RelationNotFound("A-part of the stacked span does not contain A's basis",
                               {"lift": worst})
    c_b_parts = np.array(lifts + w_nat) if (lifts or w_nat) else np.zeros((0, DB * DB))
    a_up = _up_coords(cf_a, ia)
    # C_up: A coordinates are A_up; B-only coordinates are read at the pivots
    c_up = np.zeros((a.d, len(lifts) + len(w_nat)), dtype=complex)
    c_up[:, :len(lifts)] = a_up
    bmat = b.tensor.mats.reshape(b.d, -1)
    rem = bmat - a_up @ np.array(lifts) if lifts else bmat.copy()
    for u, pv in enumerate(pivots):
        c_up[:, len(lifts) + u] = rem[:, order][:, pv]
    rec = c_up @ c_b_parts
    res_c = float(np.max(np.abs(rec - bmat), initial=0))
    # express the B-parts of C's basis in B's basis: B-part(c_s) = Σ_t M[t, s] b_t
    M, _ = nx.lstsq(vb.T, c_b_parts.T)
    res_m = float(np.max(np.abs(vb.T @ M - c_b_parts.T), initial=0))
    P = M.T
    b_up = _up_coords(cf_b, ib)
    res_b = float(np.max(np.abs(c_up @ P - b_up), initial=0))
    residuals = {"lift": worst, "c_reconstruction": res_c, "basis_change": res_m,
                 "b_up": res_b}
    if max(res_c, res_m, res_b) > 1e3 * tol * scale:
        raise RelationNotFound("no consistent relation between the upper tensors", residuals)
    pi, alpha = {}, {}
    scalar = all(cf_b.basis.shape(e) == (1, 1) for e in cf_b.basis.labels) and \
        all(cf_a.basis.shape(e) == (1, 1) for e in cf_a.basis.labels)
    if scalar:
        for t in cf_b.basis.sigma_inf:
            col = P[:, ib.index((t, 0, 0))]
            s = int(np.argmax(np.abs(col)))
            pi[t] = s
            alpha[t] = complex(col[s])
        z = {j: np.eye(1) for j in range(cf_b.basis.n_inf)}
        Pl = P
    else:
        z = {}
        Pl = P
    return GaugeRelation(Pl, pi, alpha, z, len(lifts), c_up, b_up, residuals)
