"""Stability of the span under blocking (generalized quantum Wielandt criterion).

A set is stable iff q is finite and the padded identity appears in some span.
The search lengths below are practical caps; the theoretical lengths are
reported next to the observations but never iterated to.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics as nx
from .block_structure import analyze_blocks
from .canonical_basis import build_structured_basis
from .errors import Undecided
from .matrix_sets import (DEFAULT_CAP_LEN, DEFAULT_CAP_PHYS, algebra_of_space,
                          block_physical, product_space, span_fixed_length)

INT64_MAX = 2 ** 63 - 1


def _bound(value, formula):
    return int(value) if value <= INT64_MAX else formula


def theoretical_bounds(b, D, p=1, q=1, r_alg=None, L0_diag=None, LBI_diag=None):
    """Worst-case lengths, as ints or as formula strings when they overflow."""
    out = {
        "L_span_worst": _bound(45 * b * b * D ** 3 * 2 ** (b * b), f"45*{b}^2*{D}^3*2^({b}^2)"),
        "L_BI_max": D * D,
        "r_alg_max": D * D,
    }
    if L0_diag is not None and LBI_diag is not None:
        # (L_BI + 2/3 L0) 2^{b(b-1)} - 2/3 L0, kept exact in thirds
        thirds = (3 * LBI_diag + 2 * L0_diag) * 2 ** (b * (b - 1)) - 2 * L0_diag
        val = -(-thirds // 3)
        out["L_span"] = _bound(
            val, f"({LBI_diag}+2/3*{L0_diag})*2^({b}*{b - 1})-2/3*{L0_diag}")
    if q is not None:
        span = out.get("L_span", out["L_span_worst"])
        ra = r_alg if r_alg is not None else D * D
        if isinstance(span, int):
            out["L_stab"] = _bound(p * q * span * 2 ** b * (ra * b + 1),
                                   f"{p}*{q}*L_span*2^{b}*({ra}*{b}+1)")
        else:
            out["L_stab"] = f"{p}*{q}*({span})*2^{b}*({ra}*{b}+1)"
    return out


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of the stability pipeline.

    ``verdict`` is ``"stable"``, ``"non-stable"`` or ``"undecided"``.  Lengths
    are in original sites.  ``witness`` explains a non-stable verdict: kind
    ``"q_infinite"`` carries the offending constant, kind
    ``"identity0_absent"`` the largest probed length.
    """

    verdict: str
    p: int
    q: int | None
    b: int
    D: int
    identity0_length: int | None = None
    certified_length: int | None = None
    L_stab_observed: int | None = None
    r_alg: int | None = None
    alg_dim: int | None = None
    probed_dims: tuple = ()
    bounds: dict = field(default_factory=dict)
    witness: dict | None = None

    @property
    def stable(self):
        return self.verdict == "stable"

    def to_dict(self):
        return {
            "verdict": self.verdict, "stable": self.stable, "p": self.p,
            "q": "inf" if self.q is None else self.q, "b": self.b, "D": self.D,
            "identity0_length": self.identity0_length,
            "certified_length": self.certified_length,
            "L_stab_observed": self.L_stab_observed, "r_alg": self.r_alg,
            "alg_dim": self.alg_dim,
            "probed_dims": [list(x) for x in self.probed_dims],
            "bounds": dict(self.bounds), "witness": self.witness,
        }


def _id0_search(st, id0, cap):
    span1 = span_fixed_length(st, 1)
    cur = span1
    target = nx.vec(id0)
    for ell in range(1, cap + 1):
        if ell > 1:
            cur = type(cur)(cur.D, ell, product_space(cur.space, span1.space, cur.D))
        if nx.contains(cur.space, target):
            return ell
    return None


def _is_algebra(space, D):
    alg = algebra_of_space(space, D)
    return alg.dim == space.dim, alg


def check_stability(s, tol=None, seed=None, qmax=720, cap_len=DEFAULT_CAP_LEN,
                    cap_phys=DEFAULT_CAP_PHYS, raise_undecided=True):
    """Run the stability pipeline on ``s`` and return a :class:`StabilityReport`.

    Raises :class:`Undecided` (with the report attached) when neither a
    certificate nor a witness is found within the caps, unless
    ``raise_undecided`` is false.
    """
    tol = nx.resolve_tol(tol)
    part, st = analyze_blocks(s, tol, seed, qmax, cap_phys)
    b, D, p, q = part.b, part.D, part.p, part.q
    base = dict(p=p, q=q, b=b, D=D)
    if q is None:
        bounds = theoretical_bounds(b, D, p, None, None, part.L0_diag, part.LBI_diag)
        mu = part.witness_mu
        return StabilityReport("non-stable", bounds=bounds,
                               witness={"kind": "q_infinite",
                                        "mu": [float(np.real(mu)), float(np.imag(mu))]},
                               **base)
    if q > 1:
        st = block_physical(st, q, cap_phys)
    basis, G = build_structured_basis(st, part, "algebra", tol=tol, seed=seed)
    sst = st.conjugate(G)
    diag = np.concatenate([np.full(n, 0.0 if c is None else 1.0)
                           for n, c in zip(basis.sizes, basis.partition.classes)])
    id0 = np.diag(diag).astype(complex)
    unit = p * q
    cap = min(2 ** b * 8, cap_len)
    ell0 = _id0_search(sst, id0, cap)
    alg_full = algebra_of_space(span_fixed_length(sst, 1).space, D)
    bounds = theoretical_bounds(b, D, p, q, alg_full.r_alg, part.L0_diag, part.LBI_diag)
    if ell0 is None:
        return StabilityReport("non-stable", r_alg=alg_full.r_alg, alg_dim=alg_full.dim,
                               bounds=bounds,
                               witness={"kind": "identity0_absent",
                                        "probed_up_to": cap * unit}, **base)
    probed = []
    for m in range(1, b * 2 ** b + 1):
        L = ell0 * m
        span_L = span_fixed_length(sst, L)
        alg_L = algebra_of_space(span_L.space, D)
        ok = True
        for k in range(alg_L.r_alg, alg_L.r_alg + 3):
            dim = span_fixed_length(sst, k * L).dim
            probed.append((k * L * unit, dim))
            if dim != alg_L.dim or not nx.same_space(
                    span_fixed_length(sst, k * L).space, alg_L.space, 1e3 * tol):
                ok = False
                break
        if ok:
            last = (alg_L.r_alg + 2) * L
            stab = _observed_stab_length(sst, last)
            return StabilityReport(
                "stable", identity0_length=ell0 * unit, certified_length=L * unit,
                L_stab_observed=stab * unit, r_alg=alg_L.r_alg, alg_dim=alg_L.dim,
                probed_dims=tuple(probed), bounds=bounds, **base)
    report = StabilityReport("undecided", identity0_length=ell0 * unit, r_alg=alg_full.r_alg,
                             alg_dim=alg_full.dim, probed_dims=tuple(probed),
                             bounds=bounds, **base)
    if raise_undecided:
        raise Undecided("stability not certified within the probing caps", report)
    return report


def _observed_stab_length(s, upto):
    """Smallest n such that every probed span of length n..upto is an algebra."""
    span1 = span_fixed_length(s, 1)
    cur = span1
    closed = []
    for n in range(1, upto + 1):
        if n > 1:
            cur = type(cur)(cur.D, n, product_space(cur.space, span1.space, cur.D))
        closed.append(_is_algebra(cur.space, cur.D)[0])
    n = upto
    while n > 1 and closed[n - 2]:
        n -= 1
    return n
