"""
Regular-language states
=======================

Write a family of states as a weighted regular language, build its MPS,
and test whether coarse-graining by a Gamma tensor keeps it in form.
"""

import numpy as np

from mpsx import gamma_block_check, generate_state, parse_rls, render, rls_to_mpsx
from mpsx.canonical_basis import GammaTensor

w = parse_rls("|0* 1 0*>")
print(render(w))
m = rls_to_mpsx(w)
print("D =", m.D, "amplitudes at N=4:", generate_state(m, 4).real.astype(int))

two = parse_rls("S2 |0* f 1* f 0*> (a24*|2 4> + a34*|3 4>)", params={"a24": 1, "a34": 2})
m = rls_to_mpsx(two)
print("six-dimensional bond:", m.D)
print(m.X.real.astype(int))

g01 = GammaTensor.from_json({"symbols": ["0", "1"], "entries": [
    {"out": "0", "in": ["0", "0"]}, {"out": "1", "in": ["0", "1"]},
    {"out": "1", "in": ["1", "0"]}]})
for expr in ["|0* 1 0*>", "|0* 1 0* 1 0*>"]:
    r = parse_rls(expr)
    verdicts = {(a, b): gamma_block_check(r, g01, a, b) for a in (1, 2) for b in (1, 2)}
    print(expr, verdicts)
