import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mpsx import InconsistentBasis, InvalidMode, MatrixSet
from mpsx.canonical_basis import (GammaTensor, block_injectivity, blocked_upper,
                                  gamma_tensor, isolatability_lengths, matrix_cf,
                                  preceq_positions)

from basis_checks import gamma_oracle, span_residual, structured, table_violations
from conftest import nonsemisimple_generators, random_gauge, w_tensor
from oracles import E


def _printed_names(basis, gamma):
    return {(basis.name(i), basis.name(j), basis.name(k)): w for i, j, k, w in gamma.nonzero()}


def test_preceq_order_walks_diagonals():
    assert preceq_positions(3) == [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)]


def test_two_by_two_jordan_algebra():
    basis, _ = structured(MatrixSet(np.array([np.eye(2), E(0, 1, 2)])))
    assert basis.n_inf == 1 and basis.sigma_f == (1,)
    assert basis.free_pos[1] == (0, 1)
    assert (basis.r1[1], basis.r2[1]) == (0, 0)
    assert basis.k[0, 1, 1] == 1


def test_nonsemisimple_example_structure():
    s = MatrixSet(np.array(nonsemisimple_generators()))
    basis, sst = structured(s)
    assert len(basis.sigma_inf) == 2 and len(basis.sigma_f) == 3
    names = {basis.name(e): (basis.name(basis.r1[e]), basis.name(basis.r2[e]))
             for e in basis.sigma_f}
    assert names == {"{1}": ("{0,1}", "{0,2}"), "{2}": ("{0,1}", "{0,1}"),
                     "{3}": ("{0,1}", "{0,1}")}
    # block (2,2) of the example is the only {0,2} block
    assert basis.partition.classes == (0, 1, 0, 0)
    assert table_violations(basis) == []
    assert span_residual(basis, sst) < 1e-9


def test_algebra_with_eliminable_couplings():
    """Off-diagonal blocks that depend on the diagonal are gauged away."""
    rng = np.random.default_rng(7)
    sizes = (2, 2, 2, 1)
    o = np.concatenate([[0], np.cumsum(sizes)])
    gens = []
    for a, c in itertools.product(range(2), range(2)):
        m = np.zeros((7, 7), dtype=complex)
        for blk in range(3):
            m[o[blk] + a, o[blk] + c] = 1
        gens.append(m)
    gens.append(E(6, 6, 7))
    for a in range(2):
        gens.append(E(a, 6, 7))  # the free C block at (1,4)
    U = np.eye(7, dtype=complex)
    for i, j in [(0, 1), (1, 2), (0, 2), (1, 3)]:
        U[o[i]:o[i + 1], o[j]:o[j + 1]] = rng.normal(size=(sizes[i], sizes[j]))
    s = MatrixSet(np.array(gens)).conjugate(np.linalg.inv(U))
    basis, sst = structured(s)
    assert basis.n_inf == 2
    assert len(basis.sigma_f) == 1
    e = basis.sigma_f[0]
    assert sorted(basis.shape(e)) == [1, 2]
    assert table_violations(basis) == []
    assert span_residual(basis, sst) < 1e-9


def test_span_mode_new_free_block_at_two_sites():
    s = MatrixSet(np.array([np.eye(3) + E(0, 2, 3), E(0, 1, 3) + E(1, 2, 3)]))
    b1, sst = structured(s, "span", 1)
    assert len(b1.labels) == 2
    assert span_residual(b1, sst, 1) < 1e-9
    b2, sst2 = structured(s, "span", 2)
    assert len(b2.labels) == 3
    assert b2.free_pos[2] == (0, 2)
    assert span_residual(b2, sst2, 2) < 1e-9
    b_alg, sst_alg = structured(s)
    lengths = isolatability_lengths(sst_alg, b_alg)
    assert sorted(lengths.values()) == [1, 2]


def test_span_mode_needs_length():
    from mpsx.block_structure import analyze_blocks
    from mpsx.canonical_basis import build_structured_basis

    part, st_ = analyze_blocks(w_tensor())
    with pytest.raises(InvalidMode):
        build_structured_basis(st_, part, "span")
    with pytest.raises(InvalidMode):
        build_structured_basis(st_, part, "magic")


def test_w_gamma_tensor():
    basis, _ = structured(w_tensor())
    g = gamma_tensor(basis)
    got = _printed_names(basis, g)
    assert set(got) == {("{0,1}", "{0,1}", "{0,1}"), ("{0,1}", "{1}", "{1}"),
                        ("{1}", "{0,1}", "{1}")}
    assert all(abs(w - 1) < 1e-12 for w in got.values())
    assert np.allclose(g.fine_state(0, 2).reshape(-1), [1, 0, 0, 0])
    assert np.allclose(g.fine_state(1, 2).reshape(-1), [0, 1, 1, 0])


def test_second_example_gamma_tensor():
    basis, _ = structured(MatrixSet(np.array(nonsemisimple_generators())))
    g = gamma_tensor(basis)
    expected = {("{0,1}", "{0,1}", "{0,1}"), ("{0,2}", "{0,2}", "{0,2}"),
                ("{0,1}", "{1}", "{1}"), ("{1}", "{0,2}", "{1}"),
                ("{0,1}", "{2}", "{2}"), ("{2}", "{0,1}", "{2}"),
                ("{0,1}", "{3}", "{3}"), ("{3}", "{0,1}", "{3}"),
                ("{2}", "{2}", "{3}")}
    got = _printed_names(basis, g)
    assert set(got) == expected
    assert all(abs(w - 1) < 1e-12 for w in got.values())
    assert g.associativity_residual() < 1e-9


def test_gamma_json_round_trip():
    basis, _ = structured(w_tensor())
    g = gamma_tensor(basis)
    back = GammaTensor.from_json(g.to_json())
    assert np.allclose(back.g, g.g)


def test_gamma_needs_algebra_basis():
    basis, _ = structured(w_tensor(), "span", 1)
    with pytest.raises(InvalidMode):
        gamma_tensor(basis)


def test_w_like_matrix_cf(rng):
    Bm = rng.normal(size=(3, 2, 2)) + 1j * rng.normal(size=(3, 2, 2))
    Cm = rng.normal(size=(3, 2, 2)) + 1j * rng.normal(size=(3, 2, 2))
    A = np.zeros((3, 4, 4), dtype=complex)
    A[:, :2, :2] = A[:, 2:, 2:] = Bm
    A[:, :2, 2:] = Cm
    basis, sst = structured(MatrixSet(A))
    assert basis.n_inf == 1 and len(basis.sigma_f) == 1
    cf = matrix_cf(sst, basis)
    assert cf.residual < 1e-9
    for x in range(3):
        assert np.allclose(cf.reconstruct(x), sst.mats[x])
    assert np.allclose(cf.a_low, [[[1, 0], [0, 1]], [[0, 1], [0, 0]]])


def test_matrix_cf_rejects_foreign_tensor():
    basis, sst = structured(w_tensor())
    with pytest.raises(InconsistentBasis):
        matrix_cf(MatrixSet(np.array([E(1, 0, 2)])), basis)


def test_block_injectivity_of_matrix_units():
    """Upper blocks carrying all four 2x2 matrix units are injective at once."""
    A = np.zeros((4, 4, 4), dtype=complex)
    for x, (a, c) in enumerate(itertools.product(range(2), range(2))):
        A[x, a, c] = A[x, 2 + a, 2 + c] = 1
        A[x, a, 2 + c] = x + 1.0
    basis, sst = structured(MatrixSet(A))
    inj = block_injectivity(matrix_cf(sst, basis))
    assert inj.length is not None and inj.length <= 2
    assert inj.delta_residual() < 1e-9


def test_dependent_upper_block_delays_injectivity(rng):
    Bm = rng.normal(size=(2, 2, 2))
    A = np.zeros((2, 4, 4), dtype=complex)
    A[:, :2, :2] = A[:, 2:, 2:] = Bm
    A[:, :2, 2:] = Bm @ rng.normal(size=(2, 2)) + rng.normal(size=(2, 2)) @ Bm
    basis, sst = structured(MatrixSet(A))
    inj = block_injectivity(matrix_cf(sst, basis))
    assert inj.length is None or inj.length > 1
    assert inj.length is None or inj.length <= 16


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_blocked_upper_reconstructs_products(ell):
    s = MatrixSet(np.array(nonsemisimple_generators())).conjugate(
        random_gauge(np.random.default_rng(ell), 4))
    basis, sst = structured(s)
    cf = matrix_cf(sst, basis)
    g = gamma_tensor(basis)
    blocked = blocked_upper(cf, g, ell)
    for n, w in enumerate(itertools.product(range(s.d), repeat=ell)):
        rec = sum(basis.element(e, blocked[n][e]) for e in basis.labels)
        assert np.allclose(rec, sst.word(w), atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_gamma_matches_oracle_and_is_associative(seed):
    rng = np.random.default_rng(seed)
    gens = nonsemisimple_generators()
    mix = rng.normal(size=(5, 5))
    s = MatrixSet(np.einsum("xy,yab->xab", mix, np.array(gens))).conjugate(random_gauge(rng, 4))
    basis, sst = structured(s)
    assert table_violations(basis) == []
    assert span_residual(basis, sst) < 1e-8
    g = gamma_tensor(basis)
    assert np.allclose(g.g, gamma_oracle(basis.a_low()), atol=1e-9)
    assert g.associativity_residual() < 1e-9
