"""
The W state as an MPS with boundary
===================================

Two 2x2 matrices and a nilpotent boundary give the W state on every
system size.  We generate amplitudes, check stability and read off the
generalized canonical form.
"""

import numpy as np

from mpsx import MpsX, assemble_gcf, check_stability, generate_state

A = np.array([np.eye(2), [[0, 1], [0, 0]]])
X = np.array([[0, 0], [1, 0]])
w = MpsX(A, X)

for N in range(1, 5):
    psi = generate_state(w, N)
    print(N, [format(i, f"0{N}b") for i in np.flatnonzero(psi)])

rep = check_stability(w.tensor)
print("stable:", rep.stable, "observed length:", rep.L_stab_observed)

g = assemble_gcf(w)
print("backbone:", g.backbone_text)
print("symbolic:", g.backbone_symbolic)
print("block-injective after", g.L_BI, "site(s)")
