"""
Deciding when two MPS-X give the same states
============================================

Equality of two families reduces to equality of weighted automata, which
is decided exactly.  A gauge-conjugated W is recognized as the same; GHZ
differs already on two sites.
"""

from pathlib import Path

import numpy as np

from mpsx import MpsX, mpsx_equal, reduce_pair, stack_and_relate
from mpsx.formats import load_mpsx


def E(i, j, n):
    m = np.zeros((n, n))
    m[i, j] = 1
    return m


here = Path(__file__).parent / "data"
w, gw, ghz = (load_mpsx(here / f) for f in ("w.json", "gauged-w.json", "ghz.json"))
print("W vs gauged W:", mpsx_equal(w, gw))
print("W vs GHZ:     ", mpsx_equal(w, ghz, min_length=2))

# two representations of one family with different physical subspaces
a = MpsX(np.array([np.eye(2), E(0, 1, 2), E(0, 1, 2)]), E(1, 0, 2))
b = MpsX(np.array([np.eye(3), E(0, 1, 3), E(1, 2, 3)]), E(1, 0, 3) + E(2, 1, 3))
_, rb = reduce_pair(a, b)
print("reduced B, letter 1:\n", rb.tensor.mats[1].real)
rel = stack_and_relate(a, b)
print("P_B:\n", np.round(rel.P_B.real, 12) + 0.0)
