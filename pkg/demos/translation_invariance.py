"""
Translation-invariant boundaries
================================

Not every boundary gives a translation-invariant family.  For this
three-site example the top free block is forced to vanish, and the
boundary E20 is rejected outright.
"""

import numpy as np

from mpsx import MatrixSet, MpsX, analyze_ti, generate_state



def E(i, j):
    m = np.zeros((3, 3))
    m[i, j] = 1
    return m


I3 = np.eye(3)
s = MatrixSet(np.array([I3, E(0, 1), E(1, 2), E(0, 2)]))

good = MpsX(s, I3 + E(1, 0))
an = analyze_ti(good)
print("TI:", an.ti.is_ti, "beta:", np.round(an.ti.beta, 12))
print("forced to zero:", [an.basis.name(t) for t in an.ti.forced_zero])

# the simplified boundary generates the same states
simple = MpsX(s, an.basis.gauge_inv @ an.ti.x_tilde @ an.basis.gauge)
print("same states:", all(np.allclose(generate_state(good, N), generate_state(simple, N))
                          for N in range(1, 6)))

bad = analyze_ti(MpsX(s, E(2, 0)))
print("E20 TI:", bad.ti.is_ti, bad.ti.violations)
