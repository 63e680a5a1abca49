import numpy as np
from hypothesis import given, settings, strategies as st

from mpsx import MatrixSet
from mpsx.block_structure import (analyze_blocks, block_period, detect_period,
                                  equivalent_blocks, triangularize)
from mpsx.matrix_sets import unital_algebra

from conftest import nonsemisimple_generators, irrational_tensor, random_gauge, w_tensor
from oracles import E


def _lower_block_residual(part, st_):
    o = part.offsets
    worst = 0.0
    for j in range(part.b):
        worst = max(worst, float(np.max(np.abs(st_.mats[:, o[j + 1]:, o[j]:o[j + 1]]), initial=0)))
    return worst


def test_w_tensor_is_already_triangular():
    part, st_ = triangularize(w_tensor())
    assert part.sizes == (1, 1)
    assert _lower_block_residual(part, st_) == 0


def test_gauge_conjugated_w_recovers_two_equal_blocks(rng):
    s = w_tensor().conjugate(random_gauge(rng, 2))
    part, st_ = analyze_blocks(s)
    assert part.sizes == (1, 1)
    assert part.classes == (0, 0)
    assert np.allclose(part.block(st_.mats, 0, 0), part.block(st_.mats, 1, 1))
    # the gauge really maps the input onto the reported set
    assert np.allclose(np.einsum("ij,ajk,kl->ail", part.gauge, s.mats, part.gauge_inv), st_.mats)


def test_generic_set_is_irreducible(rng):
    s = MatrixSet(rng.normal(size=(2, 2, 2)))
    part, _ = triangularize(s)
    assert part.sizes == (2,)


def test_periods():
    anti = MatrixSet(np.array([E(0, 1, 2), E(1, 0, 2)]))
    assert block_period(anti.mats) == 2
    cyc = [E(0, 1, 3), E(1, 2, 3), E(2, 0, 3)]
    mats = np.zeros((3, 4, 4), dtype=complex)
    for x in range(3):
        mats[x, 0, 0] = 1
        mats[x, 1:, 1:] = cyc[x]
    s = MatrixSet(mats)
    part, st_ = triangularize(s)
    p, periods = detect_period(st_, part)
    assert p == 3 and sorted(periods) == [1, 3]


def test_period_is_removed_by_blocking():
    anti = MatrixSet(np.array([E(0, 1, 2), E(1, 0, 2)]))
    part, st_ = analyze_blocks(anti)
    assert part.p == 2
    assert st_.d == 4
    assert all(c is not None for c in part.classes)


def test_w_classes():
    part, st_ = analyze_blocks(w_tensor())
    assert part.classes == (0, 0)
    assert np.allclose(part.mu, [1, 1])
    assert part.q == 1


def test_irrational_phase_gives_infinite_q():
    part, _ = analyze_blocks(irrational_tensor())
    assert part.q is None
    assert abs(abs(part.witness_mu) - 1) < 1e-9
    assert abs(part.witness_mu - np.exp(-1j * np.sqrt(2) * np.pi)) < 1e-9 or \
        abs(part.witness_mu - np.exp(1j * np.sqrt(2) * np.pi)) < 1e-9


def test_nonsemisimple_example_has_two_classes():
    part, _ = analyze_blocks(MatrixSet(np.array(nonsemisimple_generators())))
    assert part.sizes == (1, 1, 1, 1)
    labels = [c for c in part.classes if c is not None]
    assert sorted(labels.count(c) for c in set(labels)) == [1, 3]


def test_rational_root_of_unity_gives_finite_q():
    s = MatrixSet(np.array([np.diag([1, np.exp(2j * np.pi / 5)])]))
    part, _ = analyze_blocks(s)
    assert part.q == 5


def test_equivalent_blocks_recovers_intertwiner(rng):
    b = rng.normal(size=(3, 2, 2)) + 1j * rng.normal(size=(3, 2, 2))
    Z = random_gauge(rng, 2)
    c = 0.5j * np.einsum("ij,ajk,kl->ail", Z, b, np.linalg.inv(Z))
    mu, z = equivalent_blocks(b, c)
    assert abs(mu - 0.5j) < 1e-9
    assert np.allclose(c, mu * np.einsum("ij,ajk,kl->ail", z, b, np.linalg.inv(z)))
    assert equivalent_blocks(b, rng.normal(size=(3, 2, 2))) is None


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 2), min_size=1, max_size=3), st.integers(0, 2 ** 32 - 1))
def test_triangularization_invariants(sizes, seed):
    """Random block upper triangular sets hidden by a random gauge."""
    rng = np.random.default_rng(seed)
    D = sum(sizes)
    d = 3
    mats = np.zeros((d, D, D), dtype=complex)
    o = np.concatenate([[0], np.cumsum(sizes)])
    for i in range(len(sizes)):
        for j in range(i, len(sizes)):
            mats[:, o[i]:o[i + 1], o[j]:o[j + 1]] = rng.normal(size=(d, sizes[i], sizes[j]))
    P = random_gauge(rng, D)
    s = MatrixSet(mats).conjugate(P)
    part, st_ = triangularize(s)
    assert sorted(part.sizes) == sorted(sizes)
    assert _lower_block_residual(part, st_) == 0
    # the zeroed lower part was numerically zero in the gauge
    full = np.einsum("ij,ajk,kl->ail", part.gauge, s.mats, part.gauge_inv)
    assert np.max(np.abs(full - st_.mats)) < 1e-8 * np.max(np.abs(full))
    for j, n in enumerate(part.sizes):
        assert unital_algebra(part.block(st_.mats, j, j)).dim == n * n
    assert np.allclose(part.gauge @ part.gauge_inv, np.eye(D))
