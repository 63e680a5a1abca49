import numpy as np
import pytest

from mpsx import MatrixSet, MpsX
from oracles import E


def w_tensor():
    return MatrixSet(np.array([np.eye(2), E(0, 1, 2)]))


def w_state():
    return MpsX(w_tensor(), E(1, 0, 2))


def ghz_state():
    return MpsX(np.array([E(0, 0, 2), E(1, 1, 2)]), np.eye(2))


def jordan_tensor():
    return MatrixSet(np.array([[[1, 1], [0, 1]]]))


def irrational_tensor():
    return MatrixSet(np.array([np.diag([1, np.exp(1j * np.sqrt(2) * np.pi)])]))


def nonsemisimple_generators():
    """Non-semisimple 4x4 algebra with two diagonal classes and three free labels."""
    n = 4
    return [E(0, 0, n) + E(2, 2, n) + E(3, 3, n), E(1, 1, n), E(0, 1, n),
            E(0, 2, n) + E(2, 3, n), E(0, 3, n)]


def forced_zero_generators():
    n = 3
    return [np.eye(n), E(0, 1, n), E(1, 2, n), E(0, 2, n)]


def random_gauge(rng, D):
    while True:
        P = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
        if np.linalg.cond(P) < 50:
            return P


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


TI_POOL = {
    "w": lambda: [np.eye(2), E(0, 1, 2)],
    "ghz": lambda: [E(0, 0, 2), E(1, 1, 2)],
    "nonsemisimple": nonsemisimple_generators,
    "forced_zero": forced_zero_generators,
}


def random_ti_instance(rng, kind):
    """Random boundary inside the space of translation-invariant boundaries.

    The physical leg is mixed by a random invertible matrix and the bond by a
    random gauge, so the pipeline never sees the textbook coordinates.
    """
    from oracles import ti_boundaries

    gens = np.array(TI_POOL[kind](), dtype=complex)
    d, D = gens.shape[0], gens.shape[1]
    mix = random_gauge(rng, d)
    mats = np.einsum("xy,yab->xab", mix, gens)
    space = ti_boundaries(list(mats))
    coeff = rng.normal(size=len(space)) + 1j * rng.normal(size=len(space))
    X = np.einsum("k,kab->ab", coeff, space)
    return MpsX(MatrixSet(mats), X).conjugate(random_gauge(rng, D))


def _annihilator(mats):
    """Matrices Z with Tr[Z] = 0 and Tr[Z w] = 0 for every product w."""
    from oracles import brute_algebra

    D = mats[0].shape[0]
    alg = brute_algebra(list(mats)).reshape(-1, D, D)
    rows = np.array([m.T.reshape(-1) for m in list(alg) + [np.eye(D)]])
    _, s, vh = np.linalg.svd(rows)
    r = int(np.sum(s > 1e-9 * s[0]))
    return vh[r:].reshape(-1, D, D)


def random_pair(rng, kind):
    """Two MPS-X with D <= 2 and d = 2, equal or not depending on ``kind``.

    With D <= 2 on both sides the difference automaton has at most eight
    states, so agreement up to seven sites already implies equality.
    """
    D = int(rng.integers(1, 3))

    def rand_c(*shape):
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    if kind == "gauge":
        a = MpsX(rand_c(2, D, D), rand_c(D, D))
        return a, a.conjugate(random_gauge(rng, D))
    if kind == "annihilator":
        mats = np.array([np.eye(2), E(0, 1, 2)]) if rng.random() < 0.5 else \
            np.array([E(0, 0, 2), E(1, 1, 2)])
        mats = np.einsum("xy,yab->xab", random_gauge(rng, 2), mats)
        Z = _annihilator(mats)
        X = rand_c(2, 2)
        shift = np.einsum("k,kab->ab", rand_c(len(Z)), Z) if len(Z) else 0
        a = MpsX(mats, X)
        return a, MpsX(mats, X + shift).conjugate(random_gauge(rng, 2))
    if kind == "perturbed":
        a = MpsX(rand_c(2, D, D), rand_c(D, D))
        return a, MpsX(a.tensor, a.X + 1e-3 * rand_c(D, D))
    if kind == "sparse":
        def sparse():
            mats = rng.integers(-1, 2, size=(2, D, D)) * (rng.random((2, D, D)) < 0.5)
            return MpsX(mats.astype(float), rng.integers(-1, 2, size=(D, D)).astype(float))
        return sparse(), sparse()
    return MpsX(rand_c(2, D, D), rand_c(D, D)), \
        MpsX(rand_c(2, 2, 2), rand_c(2, 2))


PAIR_KINDS = ("gauge", "annihilator", "perturbed", "sparse", "random")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
