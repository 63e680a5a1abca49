"""MPS-X families: amplitudes, translational invariance, boundary simplification, gCF."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics as nx
from .errors import CapExceeded, InvalidInput, NotStable, NotTI
from .matrix_sets import DEFAULT_CAP_PHYS, MatrixSet, block_physical, generate_algebra

DEFAULT_STATE_CAP = 2 ** 20
DEFAULT_VERIFY_N = 6


@dataclass(frozen=True)
class MpsX:
    """Boundary matrix ``X`` and tensor; amplitude of w is Tr[X A^{w1}...A^{wN}]."""

    tensor: MatrixSet
    X: np.ndarray

    def __post_init__(self):
        t = self.tensor if isinstance(self.tensor, MatrixSet) else MatrixSet(self.tensor)
        x = nx.as_cmatrix(self.X, "boundary")
        if x.shape != (t.D, t.D):
            raise InvalidInput(f"boundary has shape {x.shape}, expected {(t.D, t.D)}")
        x.setflags(write=False)
        object.__setattr__(self, "tensor", t)
        object.__setattr__(self, "X", x)

    @property
    def d(self):
        return self.tensor.d

    @property
    def D(self):
        return self.tensor.D

    @classmethod
    def pbc(cls, mats):
        s = MatrixSet(mats)
        return cls(s, np.eye(s.D))

    def conjugate(self, P, P_inv=None):
        P = np.asarray(P, dtype=complex)
        P_inv = np.linalg.inv(P) if P_inv is None else P_inv
        return MpsX(self.tensor.conjugate(P, P_inv), P @ self.X @ P_inv)

    def blocked(self, length, cap=DEFAULT_CAP_PHYS):
        return MpsX(block_physical(self.tensor, length, cap), self.X)

    def amplitude(self, word):
        return complex(np.trace(self.X @ self.tensor.word(word)))


def generate_state(m, N, cap=DEFAULT_STATE_CAP):
    """All d^N amplitudes, indexed big-endian by the word.

    The boundary is split by an SVD into rank-one terms and row vectors are
    propagated from the left, so the cost is O(d^N * rank(X) * D^2).
    """
    if N < 0:
        raise InvalidInput("N must be >= 0")
    if m.d ** N > cap:
        raise CapExceeded(f"{m.d}^{N} amplitudes exceed cap {cap}", bound=cap)
    if N == 0:
        return np.array([np.trace(m.X)], dtype=complex)
    u, s, vh = np.linalg.svd(m.X)
    keep = s > 0
    if not np.any(keep):
        return np.zeros(m.d ** N, dtype=complex)
    u, s, vh = u[:, keep], s[keep], vh[keep]
    cur = (s[:, None] * vh)[None]
    mats = m.tensor.mats[None]
    for _ in range(N):
        cur = np.matmul(cur[:, None], mats).reshape(-1, *cur.shape[1:])
    return np.einsum("wre,er->w", cur, u)


def ti_check_general(m, tol=None):
    """Tr[X [a, b]] = 0 for every pair of algebra basis elements."""
    tol = nx.resolve_tol(tol)
    basis = generate_algebra(m.tensor, tol).matrices()
    xa = np.einsum("ij,ajk->aik", m.X, basis)
    # Tr[X a b] for all pairs
    t = np.einsum("aij,bji->ab", xa, basis)
    scale = max(np.linalg.norm(m.X), 1e-300)
    return float(np.max(np.abs(t - t.T), initial=0)) <= 1e3 * tol * scale


def cyclic_shift_invariant(m, N, cap=DEFAULT_STATE_CAP, tol=None):
    """Amplitude tensor of length N is invariant under one cyclic shift."""
    tol = nx.resolve_tol(tol)
    psi = generate_state(m, N, cap).reshape((m.d,) * N) if N else generate_state(m, 0)
    if N == 0:
        return True
    shifted = np.moveaxis(psi, 0, -1)
    scale = max(float(np.max(np.abs(psi))), 1.0)
    return float(np.max(np.abs(psi - shifted))) <= 1e3 * tol * scale


@dataclass(frozen=True)
class TiReport:
    """Translational-invariance verdict with the simplified boundary.

    ``beta[t]`` is the constant of label t; ``forced_zero`` lists Σ_f labels
    whose constant must vanish by the Γ relations.
    """

    is_ti: bool
    beta: np.ndarray
    x_tilde: np.ndarray
    y: np.ndarray
    residuals: dict
    forced_zero: tuple = ()
    violations: tuple = ()

    def to_dict(self):
        return {"is_ti": self.is_ti,
                "beta": [[float(b.real), float(b.imag)] for b in self.beta],
                "forced_zero": list(self.forced_zero),
                "violations": list(self.violations),
                "residuals": {k: float(v) for k, v in self.residuals.items()}}


def simplify_boundary(m, basis, gamma, tol=None):
    """Conditions (i) and (ii) of the TI criterion and the simplified boundary.

    ``m`` must be in the coordinates of ``basis`` (the matrix-CF gauge).
    """
    tol = nx.resolve_tol(tol)
    sizes = basis.sizes
    o = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    X = m.X
    scale = max(float(np.max(np.abs(X))), 1e-300)
    labels = basis.labels
    beta = np.zeros(len(labels), dtype=complex)
    res_i = 0.0
    violations = []
    for t in labels:
        ri, rj = basis.free_pos[t]
        S = np.zeros((sizes[rj], sizes[ri]), dtype=complex)
        for i in range(basis.b):
            for j in range(i, basis.b):
                k = basis.k[i, j, t]
                if k != 0:
                    S = S + k * X[o[j]:o[j + 1], o[i]:o[i + 1]]
        square_sector = basis.r1[t] == basis.r2[t] and S.shape[0] == S.shape[1]
        if square_sector:
            beta[t] = np.trace(S) / S.shape[0]
            err = float(np.max(np.abs(S - beta[t] * np.eye(S.shape[0])), initial=0))
        else:
            err = float(np.max(np.abs(S), initial=0))
        if err > 1e3 * tol * scale:
            violations.append(("i", t))
        res_i = max(res_i, err)
    sf = list(basis.sigma_f)
    g = gamma.g
    rows = []
    for p in sf:
        for q in sf:
            row = np.zeros(len(labels), dtype=complex)
            for r in sf:
                row[r] = g[p, q, r] - g[q, p, r]
            if np.any(np.abs(row) > 0):
                rows.append(row)
    res_ii = 0.0
    forced = []
    if rows:
        C = np.array(rows)
        vals = C @ beta
        res_ii = float(np.max(np.abs(vals)))
        if res_ii > 1e3 * tol * max(scale, 1.0):
            violations.append(("ii", None))
        row_space = nx.orthonormalize(C, 1e-9)
        for r in sf:
            unit = np.zeros(len(labels), dtype=complex)
            unit[r] = 1
            if nx.contains(row_space, unit, 1e-8):
                forced.append(r)
    small = np.abs(beta) <= 1e3 * tol * scale
    beta = np.where(small, 0, beta)
    x_tilde = np.zeros_like(X)
    y = np.zeros((basis.b, basis.b), dtype=complex)
    for t in labels:
        if beta[t] == 0:
            continue
        i, j = basis.free_pos[t]
        x_tilde[o[j]:o[j + 1], o[i]:o[i + 1]] = beta[t] * np.eye(sizes[j], sizes[i])
        y[j, i] = beta[t]
    return TiReport(not violations, beta, x_tilde, y,
                    {"cond_i": res_i, "cond_ii": res_ii}, tuple(forced), tuple(violations))


def _class_dims(basis):
    dims = {}
    for j, c in enumerate(basis.partition.classes):
        key = "eps" if c is None else c
        dims.setdefault(key, basis.sizes[j])
    return dims


def upper_embedding(cf):
    """Embed the upper tensor in ⊕ class spaces; returns (U[x][e], J, offsets).

    Tr[J U_{e1}...U_{eN}] equals the contraction of the upper MPO along a
    sector-consistent string, closed by identities between classes of equal
    size.
    """
    basis = cf.basis
    dims = _class_dims(basis)
    keys = list(dims)
    off = {}
    pos = 0
    for key in keys:
        off[key] = pos
        pos += dims[key]
    W = pos
    U = np.zeros((cf.d, len(basis.labels), W, W), dtype=complex)
    for x in range(cf.d):
        for e in basis.labels:
            a = "eps" if basis.r1[e] is None else basis.r1[e]
            b = "eps" if basis.r2[e] is None else basis.r2[e]
            blk = cf.a_up[x][e]
            U[x, e, off[a]:off[a] + blk.shape[0], off[b]:off[b] + blk.shape[1]] = blk
    J = np.zeros((W, W), dtype=complex)
    for a in keys:
        for b in keys:
            if dims[a] == dims[b]:
                J[off[a]:off[a] + dims[a], off[b]:off[b] + dims[b]] = np.eye(dims[a])
    return U, J


def combine_backbone_upper(backbone_mpsx, cf):
    """MPS-X whose states are the upper MPO applied to the backbone family."""
    U, J = upper_embedding(cf)
    B = backbone_mpsx.tensor.mats
    C = np.einsum("eij,xeab->xiajb", B, U)
    Dl, W = B.shape[1], U.shape[2]
    C = C.reshape(cf.d, Dl * W, Dl * W)
    return MpsX(MatrixSet(C), np.kron(backbone_mpsx.X, J))


@dataclass(frozen=True)
class GcfResult:
    """Everything produced by the gCF pipeline for one MPS-X."""

    backbone: object
    backbone_text: str
    backbone_symbolic: str
    gamma: object
    cf: object
    basis: object
    ti: TiReport
    stability: object
    injectivity: object
    blocking: int
    gauge: np.ndarray
    verify: dict = field(default_factory=dict)

    @property
    def L_BI(self):
        return self.injectivity.length


@dataclass(frozen=True)
class TiAnalysis:
    """Blocked MPS-X in the structured gauge with its Γ, matrix-CF and TI verdict."""

    stability: object
    blocking: int
    blocked: MpsX
    structured: MpsX
    basis: object
    gamma: object
    cf: object
    ti: TiReport


def analyze_ti(m, tol=None, seed=None, qmax=720, cap_phys=DEFAULT_CAP_PHYS):
    """Block by the certified stabilization length and test the TI conditions.

    Raises :class:`NotStable` for non-stable tensors; the TI verdict itself is
    returned, not raised.
    """
    from .block_structure import analyze_blocks
    from .canonical_basis import build_structured_basis, gamma_tensor, matrix_cf
    from .stability import check_stability

    tol = nx.resolve_tol(tol)
    rep = check_stability(m.tensor, tol, seed, qmax, cap_phys=cap_phys)
    if not rep.stable:
        raise NotStable(f"tensor is not stable ({rep.witness})", rep)
    L = rep.certified_length
    mb = m.blocked(L, cap_phys) if L > 1 else m
    part, st = analyze_blocks(mb.tensor, tol, seed, qmax, cap_phys)
    if part.p != 1 or part.q != 1:
        raise NotStable(f"blocked tensor still has p={part.p}, q={part.q}", rep)
    basis, G = build_structured_basis(st, part, "algebra", tol=tol, seed=seed)
    ms = MpsX(st.conjugate(G), basis.gauge @ mb.X @ basis.gauge_inv)
    gamma = gamma_tensor(basis, tol)
    cf = matrix_cf(ms.tensor, basis, length=L, tol=tol)
    ti = simplify_boundary(ms, basis, gamma, tol)
    return TiAnalysis(rep, L, mb, ms, basis, gamma, cf, ti)


def assemble_gcf(m, tol=None, seed=None, verify_n=DEFAULT_VERIFY_N, cap_phys=DEFAULT_CAP_PHYS,
                 cap_state=DEFAULT_STATE_CAP, qmax=720, ell_max=16):
    """Bring a stable TI MPS-X to the generalized canonical form.

    The tensor is blocked by the certified stabilization length L, brought to
    the structured gauge, split into lower and upper tensors, the boundary is
    simplified and the backbone extracted.  The contraction of the upper MPO
    with the backbone is compared with the original family for every N up to
    ``verify_n`` (in blocked sites).
    """
    from .canonical_basis import block_injectivity
    from .rls import extract_backbone, render, rls_to_mpsx, symbolic_backbone

    tol = nx.resolve_tol(tol)
    an = analyze_ti(m, tol, seed, qmax, cap_phys)
    ti, cf, basis, mb = an.ti, an.cf, an.basis, an.blocked
    if not ti.is_ti:
        raise NotTI(f"boundary violates the TI conditions {list(ti.violations)}", ti)
    backbone = extract_backbone(ti.y, cf.a_low, basis=basis)
    sym = symbolic_backbone(cf.a_low, basis=basis)
    inj = block_injectivity(cf, ell_max, cap_phys, tol, an.gamma)
    verify = {}
    combined = combine_backbone_upper(rls_to_mpsx(backbone), cf)
    worst = 0.0
    for n in range(1, verify_n + 1):
        if mb.d ** n > cap_state:
            break
        ref = generate_state(mb, n, cap_state)
        got = generate_state(combined, n, cap_state)
        scale = max(float(np.max(np.abs(ref))), 1.0)
        verify[n] = float(np.max(np.abs(ref - got))) / scale
        worst = max(worst, verify[n])
    verify["max_rel_error"] = worst
    return GcfResult(backbone, render(backbone), sym, an.gamma, cf, basis, ti, an.stability,
                     inj, an.blocking, basis.gauge, verify)
