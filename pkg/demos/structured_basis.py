"""
Structured basis and Gamma tensor of a non-semisimple algebra
=============================================================

Five generators on a 4-dimensional bond.  The basis has two diagonal
classes and three free blocks; Gamma lists how basis elements multiply.
"""

import numpy as np

from mpsx import MatrixSet, analyze_blocks, build_structured_basis, gamma_tensor


def E(i, j, n=4):
    m = np.zeros((n, n))
    m[i, j] = 1
    return m


gens = [E(0, 0) + E(2, 2) + E(3, 3), E(1, 1), E(0, 1), E(0, 2) + E(2, 3), E(0, 3)]
part, st = analyze_blocks(MatrixSet(np.array(gens)))
basis, _ = build_structured_basis(st, part, "algebra")

print("diagonal classes per block:", part.classes)
for e in basis.labels:
    r = basis.r1[e], basis.r2[e]
    print(basis.name(e), "at", basis.free_pos[e], "sector", tuple(basis.name(k) for k in r))

g = gamma_tensor(basis)
for i, j, k, w in g.nonzero():
    print(f"{basis.name(i)} * {basis.name(j)} -> {basis.name(k)}  ({w.real:g})")
print("associativity residual:", g.associativity_residual())
