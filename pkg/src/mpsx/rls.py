"""Regular-language states: grammar, MPS-X constructions, Γ-blocking, backbones.

Surface syntax (whitespace separates ket tokens)::

    rls     := term ('+' term)*
    term    := weight? 'S' int? ket ('(' ketsum ')')?  |  weight? ket
    ket     := '|' (sym '*' | sym | 'f' | '_*')+ '>'
    ketsum  := weight? '|' sym+ '>' ('+' weight? '|' sym+ '>')*
    weight  := (number | complex 'a+bi' | identifier | '(' ... ')') '*'

A bare letter inside a ket is sugar for an ``f`` slot filled with that letter,
so ``|0* 1 0*>`` means ``S1|0* f 0*>(|1>)``.  Adjacent slots get an ε run
(``_*``) between them.  Identifier weights stay symbolic until bound.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from . import numerics as nx
from .errors import (CapExceeded, InvalidALow, InvalidInput, RlsSyntaxError,
                     SectorConflict)
from .matrix_sets import MatrixSet

EPS = None

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_COMPLEX = re.compile(
    rf"\s*([-+]?\s*(?:{_NUM}\s*[-+]\s*(?:{_NUM})?\s*i|(?:{_NUM})?\s*i|{_NUM}))\s*\*")
_IDENT_W = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*\*")
_PAREN_W = re.compile(r"\s*\(([^()|]*)\)\s*\*")
_SYM = re.compile(r"[A-Za-z0-9_]+$")


def _parse_number(text):
    t = text.replace(" ", "")
    if t.endswith("i"):
        t = t[:-1] + "j"
        if t in ("j", "+j", "-j"):
            t = t.replace("j", "1j")
        elif t[-2] in "+-":
            t = t[:-1] + "1j"
    return complex(t)


def _fmt_num(w):
    w = complex(w)
    re_, im = w.real, w.imag
    if abs(im) <= 1e-15 * max(1.0, abs(re_)):
        return f"{re_:.12g}"
    if abs(re_) <= 1e-15 * max(1.0, abs(im)):
        return f"({im:.12g}i)"
    return f"({re_:.12g}{im:+.12g}i)"


def _fmt_weight(w):
    if isinstance(w, str):
        return w if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*|\(.*\)", w) else f"({w})"
    return _fmt_num(w)


def _mul(a, b):
    if isinstance(a, str) or isinstance(b, str):
        parts = [x if isinstance(x, str) else _fmt_num(x) for x in (a, b)
                 if isinstance(x, str) or complex(x) != 1]
        return "*".join(parts) if parts else 1 + 0j
    return complex(a) * complex(b)


def _add(a, b):
    if isinstance(a, str) or isinstance(b, str):
        return f"{_fmt_weight(a)}+{_fmt_weight(b)}"
    return complex(a) + complex(b)


def _sort_alphabet(symbols):
    if all(s.isdigit() for s in symbols):
        return tuple(sorted(symbols, key=int))
    return tuple(symbols)


@dataclass(frozen=True)
class AlgebraicRls:
    """Algebraic RLS: defining states |X_O> for O in (Σ_∞ ∪ {ε})^{m+1}.

    ``sector[x]`` is the pair (O_{k-1}, O_k) of every Σ_f letter; ``None``
    stands for ε.  ``defining[O]`` maps letter strings to weights, which are
    complex numbers or symbolic strings.  ``alphabet`` fixes the physical
    index of every symbol.
    """

    sigma_inf: tuple
    sector: dict
    defining: dict
    alphabet: tuple

    @property
    def sigma_f(self):
        out = {}
        for x, sec in self.sector.items():
            out.setdefault(sec, []).append(x)
        return {k: tuple(v) for k, v in out.items()}

    @property
    def M(self):
        return max((len(O) - 1 for O in self.defining), default=0)

    def free_symbols(self):
        names = set()
        for strings in self.defining.values():
            for w in strings.values():
                if isinstance(w, str):
                    names.update(re.findall(r"[A-Za-z_][A-Za-z0-9_]*", w))
        return sorted(names)

    def bind(self, params):
        """Replace symbolic weights using ``params`` (name -> number)."""
        env = {k: complex(v) for k, v in params.items()}

        def value(w):
            if not isinstance(w, str):
                return w
            expr = w.replace("i)", "j)")
            try:
                return complex(eval(expr, {"__builtins__": {}}, env))  # noqa: S307
            except NameError as exc:
                raise RlsSyntaxError(f"unbound weight parameter: {exc}") from None

        defining = {O: {x: value(w) for x, w in strings.items()}
                    for O, strings in self.defining.items()}
        return AlgebraicRls(self.sigma_inf, dict(self.sector), defining, self.alphabet)

    def index(self, sym):
        return self.alphabet.index(sym)


class _Parser:
    def __init__(self, text, params):
        self.text = text
        self.pos = 0
        self.params = params or {}

    def error(self, msg):
        raise RlsSyntaxError(msg, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def weight(self):
        for rx, kind in ((_PAREN_W, "paren"), (_COMPLEX, "num"), (_IDENT_W, "ident")):
            m = rx.match(self.text, self.pos)
            if not m:
                continue
            body = m.group(1).strip()
            if kind == "ident" and body == "S":
                continue
            self.pos = m.end()
            if kind == "num":
                return _parse_number(body)
            if kind == "ident":
                return complex(self.params[body]) if body in self.params else body
            try:
                return _parse_number(body)
            except ValueError:
                if body in self.params:
                    return complex(self.params[body])
                if not re.fullmatch(r"[A-Za-z0-9_.+\-*/ ()ij]+", body):
                    self.error(f"bad weight {body!r}")
                return f"({body})"
        return 1 + 0j

    def ket_tokens(self):
        self.expect("|")
        end = self.text.find(">", self.pos)
        if end < 0:
            self.error("unterminated ket")
        start = self.pos
        toks = self.text[start:end].split()
        if not toks:
            self.error("empty ket")
        self.pos = end + 1
        return toks, start

    def term(self):
        w = self.weight()
        m_decl = None
        if self.peek() == "S":
            self.pos += 1
            mm = re.match(r"\d+", self.text[self.pos:])
            if mm:
                m_decl = int(mm.group(0))
                self.pos += mm.end()
        toks, start = self.ket_tokens()
        runs, slots = [], []
        expect_run = True
        for tok in toks:
            if tok.endswith("*"):
                sym = tok[:-1]
                if sym != "_" and not _SYM.match(sym):
                    raise RlsSyntaxError(f"bad run symbol {sym!r}", start)
                if not expect_run:
                    raise RlsSyntaxError("two runs without a slot between them", start)
                runs.append(EPS if sym == "_" else sym)
                expect_run = False
            else:
                if not _SYM.match(tok):
                    raise RlsSyntaxError(f"bad ket token {tok!r}", start)
                if expect_run:
                    runs.append(EPS)
                slots.append(tok)
                expect_run = True
        if expect_run:
            runs.append(EPS)
        m = len(slots)
        if m_decl is not None and m_decl != m:
            raise RlsSyntaxError(f"S{m_decl} with {m} slots", start)
        fixed = [s for s in slots if s != "f"]
        if fixed and len(fixed) != m:
            raise RlsSyntaxError("cannot mix 'f' slots with fixed letters", start)
        entries = []
        if self.peek() == "(":
            if fixed:
                self.error("fixed letters cannot take a ket sum")
            self.pos += 1
            while True:
                ew = self.weight()
                syms, _ = self.ket_tokens()
                if len(syms) != m:
                    self.error(f"ket of length {len(syms)} for {m} slots")
                entries.append((tuple(syms), ew))
                if self.peek() == "+":
                    self.pos += 1
                    continue
                self.expect(")")
                break
        elif fixed:
            entries.append((tuple(fixed), 1 + 0j))
        elif m == 0:
            entries.append(((), 1 + 0j))
        else:
            self.error("slots without a ket sum")
        return tuple(runs), [(x, _mul(w, ew)) for x, ew in entries]

    def parse(self):
        terms = [self.term()]
        while self.peek() == "+":
            self.pos += 1
            terms.append(self.term())
        if self.peek():
            self.error("trailing input")
        return terms


def build_rls(terms, alphabet=None):
    """AlgebraicRls from (O, [(string, weight)]) terms, checking sectors."""
    sigma_inf, sector, defining = [], {}, {}
    letters = []
    for O, entries in terms:
        for o in O:
            if o is not None and o not in sigma_inf:
                if o in sector:
                    raise SectorConflict(f"symbol {o} used both as a run and as a letter")
                sigma_inf.append(o)
        for x, w in entries:
            for k, sym in enumerate(x):
                sec = (O[k], O[k + 1])
                if sym in sigma_inf:
                    raise SectorConflict(f"symbol {sym} used both as a run and as a letter")
                if sector.setdefault(sym, sec) != sec:
                    raise SectorConflict(
                        f"symbol {sym} appears in sectors {sector[sym]} and {sec}")
                if sym not in letters:
                    letters.append(sym)
            bucket = defining.setdefault(tuple(O), {})
            bucket[x] = _add(bucket[x], w) if x in bucket else w
    for sym in letters:
        if sym in sigma_inf:
            raise SectorConflict(f"symbol {sym} used both as a run and as a letter")
    if alphabet is None:
        alphabet = _sort_alphabet(sigma_inf + letters)
    else:
        alphabet = tuple(str(a) for a in alphabet)
        missing = set(sigma_inf + letters) - set(alphabet)
        if missing:
            raise InvalidInput(f"alphabet misses symbols {sorted(missing)}")
    return AlgebraicRls(tuple(sigma_inf), sector, defining, alphabet)


def parse_rls(text, params=None, alphabet=None):
    """Parse the surface syntax into an :class:`AlgebraicRls`."""
    return build_rls(_Parser(text, params).parse(), alphabet)


def _pattern(O):
    return " f ".join("_*" if o is None else f"{o}*" for o in O)


def render(r):
    """Canonical text of an RLS in the surface syntax."""
    parts = []
    for O, strings in r.defining.items():
        items = [(x, w) for x, w in strings.items()
                 if isinstance(w, str) or abs(complex(w)) > 0]
        if not items:
            continue
        m = len(O) - 1
        if m == 0:
            parts.append(f"{_fmt_weight(items[0][1])}*|{_pattern(O)}>")
        elif len(items) == 1:
            x, w = items[0]
            parts.append(f"{_fmt_weight(w)}*S{m}|{_pattern(O)}>(|{' '.join(x)}>)")
        else:
            ks = " + ".join(f"{_fmt_weight(w)}*|{' '.join(x)}>" for x, w in items)
            parts.append(f"S{m}|{_pattern(O)}>({ks})")
    return " + ".join(parts) if parts else "0"


def algebraic_bond_bound(r):
    nf = len(r.sector)
    M = r.M
    return len(r.sigma_inf) + (M * (M + 3) // 2 if nf == 1 else (M + 1) * nf ** (M + 1))


def rls_to_mpsx(r, alphabet=None):
    """Block-diagonal MPS-X of an algebraic RLS.

    One block of size m+1 per string with a nonzero weight, plus a diagonal
    block for the m = 0 terms that carries only the Σ_∞ symbols with a
    nonzero weight.
    """
    from .mpsx_states import MpsX

    if r.free_symbols():
        raise InvalidInput(f"unbound weight parameters: {', '.join(r.free_symbols())}")
    alphabet = tuple(alphabet) if alphabet is not None else r.alphabet
    idx = {s: a for a, s in enumerate(alphabet)}
    d = len(alphabet)
    blocks = []
    zero_terms = [(O[0], complex(w)) for O, strings in r.defining.items() if len(O) == 1
                  for w in strings.values() if complex(w) != 0 and O[0] is not None]
    if zero_terms:
        n = len(zero_terms)
        B = np.zeros((d, n, n), dtype=complex)
        X = np.zeros((n, n), dtype=complex)
        for a, (sym, w) in enumerate(zero_terms):
            B[idx[sym], a, a] = 1
            X[a, a] = w
        blocks.append((B, X))
    for O, strings in r.defining.items():
        m = len(O) - 1
        if m == 0:
            continue
        for x, w in strings.items():
            if complex(w) == 0:
                continue
            B = np.zeros((d, m + 1, m + 1), dtype=complex)
            for i, o in enumerate(O):
                if o is not None:
                    B[idx[o], i, i] = 1
            for i, sym in enumerate(x, start=1):
                B[idx[sym], i - 1, i] += 1
            X = np.zeros((m + 1, m + 1), dtype=complex)
            X[m, 0] = w
            blocks.append((B, X))
    if not blocks:
        return MpsX(MatrixSet(np.zeros((d, 1, 1))), np.zeros((1, 1)))
    D = sum(b.shape[1] for b, _ in blocks)
    A = np.zeros((d, D, D), dtype=complex)
    Xf = np.zeros((D, D), dtype=complex)
    o = 0
    for B, X in blocks:
        n = B.shape[1]
        A[:, o:o + n, o:o + n] = B
        Xf[o:o + n, o:o + n] = X
        o += n
    return MpsX(MatrixSet(A), Xf)


@dataclass(frozen=True)
class SpanTerm:
    """One string of a span RLS with its amplitude law Σ_j α_j Π_i λ_{j,i}^{n_i}."""

    O: tuple
    x: tuple
    laws: tuple  # ((alpha, (lambda_0, ..., lambda_m)), ...)

    def amplitude(self, ns):
        return sum(a * np.prod([lam ** n for lam, n in zip(lams, ns)]) for a, lams in self.laws)


@dataclass(frozen=True)
class SpanRls:
    """Span RLS; letters may be Σ_∞ symbols (Jordan-type slots in sector [y, y])."""

    sigma_inf: tuple
    sector: dict
    terms: tuple
    alphabet: tuple

    def __post_init__(self):
        for t in self.terms:
            if len(t.laws) < 1:
                raise InvalidInput("each span term needs K >= 1 laws")
            for a, lams in t.laws:
                if len(lams) != len(t.O):
                    raise InvalidInput("need one λ per run")
                if not np.all(np.isfinite(np.asarray(lams, dtype=complex))) or not np.isfinite(a):
                    raise InvalidInput("non-finite amplitude law")
            for k, sym in enumerate(t.x):
                sec = (t.O[k], t.O[k + 1])
                if sym in self.sigma_inf:
                    if sec != (sym, sym):
                        raise SectorConflict(f"Σ_∞ letter {sym} outside sector [{sym},{sym}]")
                elif self.sector.get(sym) != sec:
                    raise SectorConflict(f"letter {sym} not in sector {sec}")

    @property
    def K(self):
        return max((len(t.laws) for t in self.terms), default=1)

    @property
    def M(self):
        return max((len(t.O) - 1 for t in self.terms), default=0)

    @classmethod
    def from_algebraic(cls, r):
        terms = []
        for O, strings in r.defining.items():
            for x, w in strings.items():
                if complex(w) != 0:
                    terms.append(SpanTerm(O, x, ((complex(w), (1.0,) * len(O)),)))
        return cls(r.sigma_inf, dict(r.sector), tuple(terms), r.alphabet)


def span_bond_bound(r):
    n = len(r.alphabet)
    M, K = r.M, r.K
    return K * len(r.sigma_inf) + (M * (M + 3) * K // 2 if n == 1 else (M + 1) * K * n ** (M + 1))


def span_rls_to_mpsx(r):
    """Block-diagonal MPS-X of a span RLS, one block per (string, law)."""
    from .mpsx_states import MpsX

    idx = {s: a for a, s in enumerate(r.alphabet)}
    d = len(r.alphabet)
    blocks = []
    for t in r.terms:
        m = len(t.O) - 1
        if m == 0:
            if t.O[0] is None:
                continue
            K = len(t.laws)
            B = np.zeros((d, K, K), dtype=complex)
            X = np.zeros((K, K), dtype=complex)
            for k, (a, lams) in enumerate(t.laws):
                B[idx[t.O[0]], k, k] = lams[0]
                X[k, k] = a
            blocks.append((B, X))
            continue
        for a, lams in t.laws:
            B = np.zeros((d, m + 1, m + 1), dtype=complex)
            for i, o in enumerate(t.O):
                if o is not None:
                    B[idx[o], i, i] = lams[i]
            for i, sym in enumerate(t.x, start=1):
                B[idx[sym], i - 1, i] += 1
            X = np.zeros((m + 1, m + 1), dtype=complex)
            X[m, 0] = a
            blocks.append((B, X))
    if not blocks:
        return MpsX(MatrixSet(np.zeros((d, 1, 1))), np.zeros((1, 1)))
    D = sum(b.shape[1] for b, _ in blocks)
    A = np.zeros((d, D, D), dtype=complex)
    Xf = np.zeros((D, D), dtype=complex)
    o = 0
    for B, X in blocks:
        n = B.shape[1]
        A[:, o:o + n, o:o + n] = B
        Xf[o:o + n, o:o + n] = X
        o += n
    return MpsX(MatrixSet(A), Xf)


def _classify_low(a_low, n_inf=None, tol=1e-9):
    """Classes of the diagonal positions and sectors of the Σ_f labels."""
    a_low = np.asarray(a_low, dtype=complex)
    L, b, _ = a_low.shape
    inf_labels, f_labels = [], []
    for e in range(L):
        m = a_low[e]
        off = m - np.diag(np.diag(m))
        if np.any(np.abs(np.tril(m, -1)) > tol):
            raise InvalidALow(f"label {e} has entries below the diagonal")
        is_diag = not np.any(np.abs(off) > tol)
        if n_inf is not None:
            is_inf = e < n_inf
        else:
            is_inf = is_diag and np.any(np.abs(np.diag(m)) > tol)
        if is_inf:
            if not is_diag:
                raise InvalidALow(f"diagonal label {e} has off-diagonal entries")
            dg = np.diag(m)
            if np.any((np.abs(dg) > tol) & (np.abs(dg - 1) > tol)):
                raise InvalidALow(f"diagonal label {e} has entries other than 0/1")
            inf_labels.append(e)
        else:
            if np.any(np.abs(np.diag(m)) > tol):
                raise InvalidALow(f"label {e} mixes diagonal and off-diagonal entries")
            f_labels.append(e)
    classes = [None] * b
    for e in inf_labels:
        for i in np.flatnonzero(np.abs(np.diag(a_low[e])) > tol):
            if classes[i] is not None:
                raise InvalidALow(f"diagonal position {i} belongs to two classes")
            classes[i] = e
    sectors = {}
    for e in f_labels:
        for i, j in zip(*np.nonzero(np.abs(a_low[e]) > tol)):
            sec = (classes[i], classes[j])
            if sectors.setdefault(e, sec) != sec:
                raise InvalidALow(f"label {e} spans two sectors")
    return inf_labels, f_labels, classes, sectors


def _paths(a_low, f_labels, b, tol):
    """Strictly increasing block paths through Σ_f letters: (i_0..i_m, letters, weight)."""
    out = []

    def walk(path, letters, w):
        out.append((tuple(path), tuple(letters), w))
        i = path[-1]
        for j in range(i + 1, b):
            for e in f_labels:
                k = a_low[e][i, j]
                if abs(k) > tol:
                    walk(path + [j], letters + [e], w * k)

    for i0 in range(b):
        walk([i0], [], 1 + 0j)
    return out


def _backbone_terms(a_low, weight_of, n_inf=None, tol=1e-9):
    a_low = np.asarray(a_low, dtype=complex)
    L, b, _ = a_low.shape
    inf_labels, f_labels, classes, sectors = _classify_low(a_low, n_inf, tol)
    grouped = {}
    for path, letters, w in _paths(a_low, f_labels, b, tol):
        if len(path) == 1 and classes[path[0]] is None:
            continue
        wt = weight_of(path[-1], path[0], w)
        if wt is None:
            continue
        O = tuple(None if classes[i] is None else str(classes[i]) for i in path)
        x = tuple(str(e) for e in letters)
        grouped.setdefault(O, {}).setdefault(x, []).append(wt)
    sector = {str(e): tuple(None if c is None else str(c) for c in sec)
              for e, sec in sectors.items()}
    return inf_labels, f_labels, sector, grouped


def _string_key(x):
    return tuple(int(e) if e.isdigit() else e for e in x)


def extract_backbone(y, a_low, basis=None, tol=1e-9):
    """Backbone algebraic RLS of Tr[Y A_low^{w1} ... A_low^{wN}]."""
    y = np.asarray(y, dtype=complex)
    n_inf = basis.n_inf if basis is not None else None

    def weight_of(last, first, w):
        v = y[last, first] * w
        return v if abs(v) > tol else None

    inf_labels, f_labels, sector, grouped = _backbone_terms(a_low, weight_of, n_inf, tol)
    L = np.asarray(a_low).shape[0]
    defining = {}
    for O in sorted(grouped, key=len):
        for x, ws in sorted(grouped[O].items(), key=lambda kv: _string_key(kv[0])):
            w = complex(sum(ws))
            if abs(w) > tol:
                defining.setdefault(O, {})[x] = w
    alphabet = tuple(str(e) for e in range(L))
    return AlgebraicRls(tuple(str(e) for e in inf_labels), sector, defining, alphabet)


def symbolic_backbone(a_low, basis, tol=1e-9):
    """Backbone text with the boundary constants kept as symbols b0, b1, ...

    Y carries β_t at the transpose of the free position of label t; labels
    outside the diagonal sectors [p, p] have no constant.
    """
    at = {(basis.free_pos[t][1], basis.free_pos[t][0]): t for t in basis.labels
          if basis.r1[t] is not None and basis.r1[t] == basis.r2[t]}

    def weight_of(last, first, w):
        t = at.get((last, first))
        return None if t is None else {t: w}

    _, _, sector, grouped = _backbone_terms(a_low, weight_of, basis.n_inf, tol)
    defining = {}
    for O in sorted(grouped, key=len):
        for x, forms in sorted(grouped[O].items(), key=lambda kv: _string_key(kv[0])):
            acc = {}
            for form in forms:
                for t, c in form.items():
                    acc[t] = acc.get(t, 0) + c
            acc = {t: c for t, c in acc.items() if abs(c) > tol}
            if acc:
                defining.setdefault(O, {})[x] = _fmt_form(acc)
    alphabet = tuple(str(e) for e in basis.labels)
    r = AlgebraicRls(tuple(str(e) for e in basis.sigma_inf), sector, defining, alphabet)
    return render(r)


def _fmt_form(acc):
    terms = []
    for t in sorted(acc):
        c = acc[t]
        terms.append(f"b{t}" if abs(c - 1) < 1e-12 else f"{_fmt_num(c)}*b{t}")
    return terms[0] if len(terms) == 1 and "*" not in terms[0] else "(" + "+".join(terms) + ")"


def gamma_fine_matrix(gamma, ell):
    """Matrix whose column k is Γ_ℓ(k) as a big-endian vector of length d^ℓ."""
    d = len(gamma.symbols)
    cols = [gamma.fine_state(k, ell).reshape(-1) for k in range(d)]
    return np.array(cols).T


def gamma_block_check(r, gamma, alpha, beta, cap=2 ** 20, tol=None):
    """Whether Γ_α^{⊗β}|L_β> equals |L_{αβ}>."""
    from .mpsx_states import generate_state

    tol = nx.resolve_tol(tol)
    names = [str(s) for s in gamma.symbols]
    missing = set(r.alphabet) - set(names)
    if missing:
        raise InvalidInput(f"Γ does not cover symbols {sorted(missing)}")
    d = len(names)
    if d ** (alpha * beta) > cap:
        raise CapExceeded(f"{d}^{alpha * beta} amplitudes exceed cap {cap}", bound=cap)
    m = rls_to_mpsx(r, alphabet=names)
    coarse = generate_state(m, beta, cap)
    fine = generate_state(m, alpha * beta, cap)
    G = gamma_fine_matrix(gamma, alpha)
    t = coarse.reshape((d,) * beta)
    for axis in range(beta):
        t = np.moveaxis(np.tensordot(G, t, axes=([1], [axis])), 0, axis)
    blocked = t.reshape(-1)
    scale = max(float(np.max(np.abs(fine), initial=0)), float(np.max(np.abs(blocked), initial=0)), 1.0)
    return float(np.max(np.abs(blocked - fine), initial=0)) <= 1e3 * tol * scale


def gamma_invariance(r, gamma, lengths=(1, 2, 3), cap=2 ** 20, tol=None):
    """Verdicts of :func:`gamma_block_check` over all (α, β) pairs and their AND."""
    table = {(a, b): gamma_block_check(r, gamma, a, b, cap, tol)
             for a, b in itertools.product(lengths, lengths)}
    return all(table.values()), table
