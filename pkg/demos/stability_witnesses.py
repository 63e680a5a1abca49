"""
Two ways to fail stability
==========================

A Jordan block never produces the padded identity; an irrational phase
never returns to one.  The report names which of the two happened.
"""

import numpy as np

from mpsx import MatrixSet, check_stability

jordan = MatrixSet(np.array([[[1, 1], [0, 1]]]))
phase = MatrixSet(np.array([np.diag([1, np.exp(1j * np.sqrt(2) * np.pi)])]))
root5 = MatrixSet(np.array([np.diag([1, np.exp(2j * np.pi / 5)])]))

for name, s in [("jordan", jordan), ("irrational", phase), ("fifth root", root5)]:
    rep = check_stability(s)
    kind = rep.witness["kind"] if rep.witness else "-"
    print(f"{name:>10}: {rep.verdict:<10} witness={kind:<16} q={rep.q}")
