"""Command line front end: ``mpsx analyze|gcf|compare|rls|stability|ti|state``.

Exit codes: 0 ok, 2 bad input, 3 structure or verdict uncertain, 4 not
stable, 5 not translationally invariant, 6 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import numerics as nx
from .errors import InvalidInput, MpsxError, NotStable, NotTI, Undecided
from .formats import load_gamma, load_mpsx, save_mpsx

EXIT_OK, EXIT_INPUT, EXIT_UNCERTAIN, EXIT_NOT_STABLE, EXIT_NOT_TI, EXIT_CAP = 0, 2, 3, 4, 5, 6


def _pair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _num(z):
    z = complex(z)
    return f"{z.real:.12g}" if z.imag == 0 else f"{z.real:.12g}{z.imag:+.12g}i"


def _word(w, symbols=None):
    syms = [str(s) for s in (symbols or range(max(w, default=0) + 1))]
    parts = [syms[x] for x in w]
    return "".join(parts) if all(len(s) == 1 for s in syms) else " ".join(parts)


def _structure_report(part, basis, gamma):
    sig_f = {}
    for (i, j), labels in basis.sectors().items():
        key = f"{'eps' if i is None else i},{'eps' if j is None else j}"
        sig_f[key] = list(labels)
    k_table = [[int(i), int(j), int(t), _pair(basis.k[i, j, t])]
               for i, j, t in np.argwhere(np.abs(basis.k) > 0)]
    out = {
        "partition": {"b": part.b, "sizes": list(map(int, basis.sizes)),
                      "classes": [None if c is None else int(c) for c in basis.partition.classes],
                      "p": int(part.p), "q": "inf" if part.q is None else int(part.q)},
        "sigma_inf": list(basis.sigma_inf),
        "sigma_f": sig_f,
        "labels": [{"label": t, "name": basis.name(t), "free_pos": list(basis.free_pos[t]),
                    "sector": [basis.r1[t], basis.r2[t]]} for t in basis.labels],
        "k_table": k_table,
    }
    if gamma is not None:
        out["gamma_nonzero"] = [[i, j, k, _pair(w)] for i, j, k, w in gamma.nonzero()]
        out["gamma_associativity_residual"] = gamma.associativity_residual()
    return out


def _stability(m, args, raise_undecided=False):
    from .stability import check_stability

    return check_stability(m.tensor, args.tol, args.seed, args.qmax, args.cap_len,
                           args.cap_phys, raise_undecided=raise_undecided)


def cmd_analyze(args):
    from .block_structure import analyze_blocks
    from .canonical_basis import build_structured_basis, gamma_tensor
    from .matrix_sets import block_physical

    m = load_mpsx(args.input)
    rep = _stability(m, args)
    part, st = analyze_blocks(m.tensor, args.tol, args.seed, args.qmax, args.cap_phys)
    if part.q is not None and part.q > 1:
        st = block_physical(st, part.q, args.cap_phys)
        part, st = analyze_blocks(st, args.tol, args.seed, args.qmax, args.cap_phys)
    basis, _ = build_structured_basis(st, part, "algebra", tol=args.tol, seed=args.seed)
    report = {"command": "analyze", "d": m.d, "D": m.D}
    report.update(_structure_report(part, basis, gamma_tensor(basis, args.tol)))
    report["stability"] = rep.to_dict()
    code = EXIT_UNCERTAIN if rep.verdict == "undecided" else EXIT_OK
    return report, code


def cmd_stability(args):
    m = load_mpsx(args.input)
    rep = _stability(m, args)
    code = {"stable": EXIT_OK, "non-stable": EXIT_NOT_STABLE}.get(rep.verdict, EXIT_UNCERTAIN)
    return {"command": "stability", "d": m.d, "D": m.D, "stability": rep.to_dict()}, code


def cmd_ti(args):
    from .mpsx_states import analyze_ti

    m = load_mpsx(args.input)
    an = analyze_ti(m, args.tol, args.seed, args.qmax, args.cap_phys)
    report = {"command": "ti", "d": m.d, "D": m.D, "blocking": an.blocking,
              "ti": an.ti.to_dict()}
    return report, EXIT_OK if an.ti.is_ti else EXIT_NOT_TI


def cmd_gcf(args):
    from .mpsx_states import assemble_gcf

    m = load_mpsx(args.input)
    res = assemble_gcf(m, args.tol, args.seed, args.verify_n, args.cap_phys, qmax=args.qmax)
    report = {"command": "gcf", "d": m.d, "D": m.D, "blocking": res.blocking}
    report.update(_structure_report(res.basis.partition, res.basis, res.gamma))
    report.update({
        "backbone": res.backbone_text,
        "backbone_symbolic": res.backbone_symbolic,
        "ti": res.ti.to_dict(),
        "L_BI": res.L_BI,
        "stability": res.stability.to_dict(),
        "verify": {str(k): v for k, v in res.verify.items()},
    })
    return report, EXIT_OK


def cmd_compare(args):
    from .equivalence import mpsx_equal, stack_and_relate

    a, b = load_mpsx(args.a), load_mpsx(args.b)
    if a.d != b.d:
        raise InvalidInput(f"physical dimensions differ: {a.d} vs {b.d}")
    equal, word = mpsx_equal(a, b, args.min_length, args.tol)
    report = {"command": "compare", "verdict": "EQUIVALENT" if equal else "DIFFERENT",
              "min_length": args.min_length,
              "witness": None if word is None else _word(word, range(a.d))}
    if equal and args.relation:
        rel = stack_and_relate(a, b, tol=args.tol, seed=args.seed)
        report["relation"] = {"P_B": [[_pair(z) for z in row] for row in rel.P_B],
                              "residuals": rel.residuals}
    return report, EXIT_OK


def _read_expr(expr):
    if os.path.isfile(expr):
        with open(expr, encoding="utf-8") as fh:
            return fh.read().strip()
    return expr


def _params(items):
    out = {}
    for item in items or []:
        name, _, value = item.partition("=")
        if not _:
            raise InvalidInput(f"--param expects name=value, got {item!r}")
        try:
            out[name.strip()] = complex(value.strip().replace("i", "j"))
        except ValueError:
            raise InvalidInput(f"bad parameter value {value!r}") from None
    return out


def _amplitudes(vec, d, N, symbols, tol):
    out = {}
    for idx in np.flatnonzero(np.abs(vec) > tol):
        word = np.unravel_index(int(idx), (d,) * N) if N else ()
        out[_word([int(x) for x in word], symbols)] = _pair(vec[idx])
    return out


def cmd_rls(args):
    from .mpsx_states import generate_state
    from .rls import gamma_block_check, parse_rls, render, rls_to_mpsx

    r = parse_rls(_read_expr(args.expr), _params(args.param))
    report = {"command": "rls", "rls": render(r), "alphabet": list(r.alphabet)}
    if args.to_mpsx:
        m = rls_to_mpsx(r)
        save_mpsx(m, args.to_mpsx)
        report.update({"written": args.to_mpsx, "D": m.D, "d": m.d})
    if args.check_gamma:
        path, alpha, beta = args.check_gamma
        gamma = load_gamma(path)
        ok = gamma_block_check(r, gamma, int(alpha), int(beta), args.cap_state, args.tol)
        report.update({"alpha": int(alpha), "beta": int(beta),
                       "verdict": "INVARIANT" if ok else "NOT INVARIANT"})
    if args.state is not None:
        m = rls_to_mpsx(r)
        vec = generate_state(m, args.state, args.cap_state)
        report.update({"N": args.state,
                       "amplitudes": _amplitudes(vec, m.d, args.state, r.alphabet,
                                                 nx.resolve_tol(args.tol))})
    return report, EXIT_OK


def cmd_state(args):
    from .mpsx_states import generate_state

    m = load_mpsx(args.input)
    vec = generate_state(m, args.n, args.cap_state)
    return {"command": "state", "d": m.d, "D": m.D, "N": args.n,
            "amplitudes": _amplitudes(vec, m.d, args.n, range(m.d),
                                      nx.resolve_tol(args.tol))}, EXIT_OK


def _fmt(value):
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, float) for v in value):
        return _num(complex(*value))
    return json.dumps(value)


def render_text(report):
    """Human-readable form of a report; numbers are those of the JSON form."""
    lines = []
    cmd = report.get("command")
    if cmd == "compare":
        line = report["verdict"]
        if report.get("witness") is not None:
            line += f" (first distinguishing word: {report['witness'] or '<empty>'})"
        lines.append(line)
    if cmd in ("rls", "state") and "amplitudes" in report:
        for word, amp in report["amplitudes"].items():
            lines.append(f"{word} {_num(complex(*amp))}")
    if cmd == "rls" and "verdict" in report:
        lines.append(report["verdict"])
    if "backbone" in report:
        lines.append(f"backbone: {report['backbone']}")
        lines.append(f"backbone (symbolic): {report['backbone_symbolic']}")
    if "stability" in report:
        st = report["stability"]
        lines.append(f"stability: {st['verdict']}")
    for key, value in report.items():
        if key in ("amplitudes",):
            continue
        if isinstance(value, dict):
            for k2, v2 in value.items():
                lines.append(f"  {key}.{k2}: {_fmt(v2)}")
        else:
            lines.append(f"  {key}: {_fmt(value)}")
    return "\n".join(lines)


def _emit(report, as_json):
    if as_json:
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print(render_text(report))


def _from_report(path):
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    try:
        report = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"report is not JSON ({exc})") from None
    if not isinstance(report, dict) or "command" not in report:
        raise InvalidInput("not an mpsx report")
    return report


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="relative tolerance (default 1e-9 or $MPSX_TOL)")
    common.add_argument("--seed", type=int, default=nx.DEFAULT_SEED)
    common.add_argument("--cap-phys", type=int, default=4096)
    common.add_argument("--cap-len", type=int, default=64)
    common.add_argument("--cap-state", type=int, default=2 ** 20)
    common.add_argument("--qmax", type=int, default=720)
    common.add_argument("--json", action="store_true", help="print the JSON report")

    p = argparse.ArgumentParser(prog="mpsx", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="block structure, basis and stability")
    a.add_argument("input", nargs="?")
    a.add_argument("--from-report", metavar="PATH", help="re-emit a saved JSON report ('-' = stdin)")
    for name, helptext in (("stability", "stability verdict only"),
                           ("ti", "translational invariance of the boundary")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("input")
    g = sub.add_parser("gcf", parents=[common], help="generalized canonical form")
    g.add_argument("input")
    g.add_argument("--verify-n", type=int, default=6)
    c = sub.add_parser("compare", parents=[common], help="exact equivalence of two families")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--min-length", type=int, default=2,
                   help="compare the states of all lengths N >= this (default 2)")
    c.add_argument("--relation", action="store_true", help="also print the stacking relation")
    r = sub.add_parser("rls", parents=[common], help="regular-language states")
    r.add_argument("expr", help="expression or file holding one")
    r.add_argument("--param", action="append", metavar="NAME=VALUE")
    r.add_argument("--to-mpsx", metavar="OUT")
    r.add_argument("--check-gamma", nargs=3, metavar=("GAMMA", "ALPHA", "BETA"))
    r.add_argument("--state", type=int, metavar="N")
    st = sub.add_parser("state", parents=[common], help="amplitudes of one system size")
    st.add_argument("input")
    st.add_argument("--n", type=int, required=True)
    return p


COMMANDS = {"analyze": cmd_analyze, "stability": cmd_stability, "ti": cmd_ti, "gcf": cmd_gcf,
            "compare": cmd_compare, "rls": cmd_rls, "state": cmd_state}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze" and args.from_report:
            report, code = _from_report(args.from_report), EXIT_OK
        elif args.command == "analyze" and not args.input:
            raise InvalidInput("analyze needs an input file or --from-report")
        else:
            report, code = COMMANDS[args.command](args)
    except (NotStable, NotTI, Undecided) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except MpsxError as exc:
        detail = getattr(exc, "residuals", None)
        print(f"error: {exc}" + (f" residuals={detail}" if detail else ""), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(report, args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())
