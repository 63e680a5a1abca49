import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mpsx import (CapExceeded, InvalidALow, InvalidInput, RlsSyntaxError, SectorConflict,
                  extract_backbone, generate_state, parse_rls, render, rls_to_mpsx,
                  span_rls_to_mpsx)
from mpsx.canonical_basis import GammaTensor
from mpsx.rls import (SpanRls, SpanTerm, algebraic_bond_bound, gamma_block_check,
                      gamma_invariance, span_bond_bound)

from oracles import E, brute_state, rls_amplitudes, span_amplitudes
from rls_random import random_algebraic, random_span

TWO_SECTOR = "S2 |0* f 1* f 0*> (a24*|2 4> + a34*|3 4>)"


def gamma(symbols, entries):
    return GammaTensor.from_json({"symbols": symbols,
                                  "entries": [{"out": o, "in": list(i)} for o, i in entries]})


G01 = gamma(["0", "1"], [("0", "00"), ("1", "01"), ("1", "10")])
G012 = gamma(["0", "1", "2"], [("0", "00"), ("1", "01"), ("1", "10"),
                               ("2", "11"), ("2", "02"), ("2", "20")])


def test_w_sugar():
    r = parse_rls("|0* 1 0*>")
    assert r.sigma_inf == ("0",)
    assert r.sector == {"1": ("0", "0")}
    assert r.defining == {("0", "0"): {("1",): 1}}
    assert render(r) == "1*S1|0* f 0*>(|1>)"


def test_operator_form_sectors():
    r = parse_rls(TWO_SECTOR)
    assert r.sigma_inf == ("0", "1")
    assert r.sigma_f == {("0", "1"): ("2", "3"), ("1", "0"): ("4",)}
    assert r.free_symbols() == ["a24", "a34"]


def test_printed_sector_mismatch_is_a_conflict():
    # the ket |3 2> would put 2 in sector [1, 0] while it already lives in [0, 1]
    with pytest.raises(SectorConflict):
        parse_rls("S2 |0* f 1* f 0*> (a24*|2 4> + a32*|3 2>)")


def test_letter_in_two_sectors_conflicts():
    with pytest.raises(SectorConflict):
        parse_rls("|0* 2 0* 2 0*> + |1* 2 1*>")
    with pytest.raises(SectorConflict):
        parse_rls("|0* 1 0*> + |1*>")


@pytest.mark.parametrize("text", ["|0* 1 0*", "|0* 1 0*> +", "|0* 0* 1>", "S2|0* f 0*>(|1>)",
                                  "|0* f 0*>", "|0* 1 f 0*>(|2>)", "|0*> junk"])
def test_syntax_errors_carry_position(text):
    with pytest.raises(RlsSyntaxError) as err:
        parse_rls(text)
    assert err.value.position is not None
    assert err.value.exit_code == 2


def test_weights_and_params():
    r = parse_rls("(1+2i)*|0*> + -0.5*|1*> + 2i*S1|0* f 1*>(|2>)")
    assert r.defining[("0",)][()] == 1 + 2j
    assert r.defining[("1",)][()] == -0.5
    assert r.defining[("0", "1")][("2",)] == 2j
    bound = parse_rls(TWO_SECTOR, params={"a24": 2, "a34": 3})
    assert bound.defining[("0", "1", "0")] == {("2", "4"): 2, ("3", "4"): 3}
    with pytest.raises(InvalidInput):
        rls_to_mpsx(parse_rls(TWO_SECTOR))
    with pytest.raises(RlsSyntaxError):
        parse_rls(TWO_SECTOR).bind({"a24": 1})


def test_render_round_trip():
    for text in ["|0* 1 0*>", TWO_SECTOR, "2*|0*> + 3*|1*> + S1|0* f 1*>(|2>)",
                 "(1-2i)*S1|_* f 0*>(|3>)"]:
        r = parse_rls(text)
        again = parse_rls(render(r))
        assert again.defining == r.defining and again.sector == r.sector


def test_two_sector_six_by_six_matrices():
    a24, a34 = 2.5, -1.5
    m = rls_to_mpsx(parse_rls(TWO_SECTOR, params={"a24": a24, "a34": a34}))
    A = np.zeros((5, 6, 6))
    A[0] = np.diag([1, 0, 1, 1, 0, 1])
    A[1] = np.diag([0, 1, 0, 0, 1, 0])
    A[2][0, 1] = 1
    A[3][3, 4] = 1
    A[4][1, 2] = A[4][4, 5] = 1
    X = np.zeros((6, 6))
    X[2, 0], X[5, 3] = a24, a34
    assert np.array_equal(m.tensor.mats, A)
    assert np.array_equal(m.X, X)


def test_w_rls_construction_matches_w_state():
    r = parse_rls("|0* 1 0*>")
    m = rls_to_mpsx(r)
    for N in range(1, 9):
        w = np.zeros(2 ** N)
        w[[2 ** k for k in range(N)]] = 1
        assert np.allclose(generate_state(m, N), w)
        assert np.allclose(rls_amplitudes(r.defining, r.alphabet, N), w)


def test_product_state_rls():
    m = rls_to_mpsx(parse_rls("1*|0*>"))
    assert m.D == 1
    assert np.allclose(generate_state(m, 4), [1])


def test_irrational_span_example():
    phase = np.exp(1j * np.sqrt(2) * np.pi)
    r = SpanRls(("0",), {"1": ("0", "0")},
                (SpanTerm(("0", "0"), ("1",), ((1.0, (1.0, phase)),)),), ("0", "1"))
    m = span_rls_to_mpsx(r)
    assert np.allclose(m.X, [[0, 0], [1, 0]])
    assert np.allclose(m.tensor.mats, [np.diag([1, phase]), [[0, 1], [0, 0]]])
    terms = [(t.O, t.x, t.laws) for t in r.terms]
    for N in range(1, 9):
        assert np.allclose(generate_state(m, N), span_amplitudes(terms, r.alphabet, N))


def test_jordan_span_example():
    r = SpanRls(("0",), {"1": ("0", "0")},
                (SpanTerm(("0", "0", "0"), ("0", "1"), ((1.0, (1, 1, 1)),)),), ("0", "1"))
    m = span_rls_to_mpsx(r)
    assert np.array_equal(m.tensor.mats, [[[1, 1, 0], [0, 1, 0], [0, 0, 1]], E(1, 2, 3)])
    assert np.array_equal(m.X, E(2, 0, 3))
    terms = [(t.O, t.x, t.laws) for t in r.terms]
    for N in range(1, 9):
        ref = brute_state(list(m.tensor.mats), m.X, N)
        assert np.allclose(span_amplitudes(terms, r.alphabet, N), ref)
        assert np.allclose(generate_state(m, N), ref)


def test_span_rejects_bad_laws():
    with pytest.raises(InvalidInput):
        SpanRls(("0",), {}, (SpanTerm(("0",), (), ()),), ("0",))
    with pytest.raises(InvalidInput):
        SpanRls(("0",), {}, (SpanTerm(("0",), (), ((1.0, (1.0, 2.0)),)),), ("0",))
    with pytest.raises(SectorConflict):
        SpanRls(("0", "1"), {"2": ("0", "0")},
                (SpanTerm(("0", "1"), ("2",), ((1.0, (1.0, 1.0)),)),), ("0", "1", "2"))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_algebraic_construction(seed):
    r = random_algebraic(np.random.default_rng(seed))
    m = rls_to_mpsx(r)
    assert m.D <= algebraic_bond_bound(r)
    for N in range(0, 5):
        if N == 0:
            continue
        assert np.allclose(generate_state(m, N), rls_amplitudes(r.defining, r.alphabet, N))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_span_construction(seed):
    r = random_span(np.random.default_rng(seed))
    m = span_rls_to_mpsx(r)
    assert m.D <= span_bond_bound(r)
    terms = [(t.O, t.x, t.laws) for t in r.terms]
    for N in range(1, 5):
        assert np.allclose(generate_state(m, N), span_amplitudes(terms, r.alphabet, N))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_constant_laws_reduce_to_algebraic(seed):
    r = random_algebraic(np.random.default_rng(seed))
    a = rls_to_mpsx(r)
    s = span_rls_to_mpsx(SpanRls.from_algebraic(r))
    for N in range(1, 5):
        assert np.allclose(generate_state(a, N), generate_state(s, N))


def test_gamma_blocking_verdicts():
    w = parse_rls("|0* 1 0*>")
    assert gamma_block_check(w, G01, 2, 3)
    ok, table = gamma_invariance(w, G01)
    assert ok and len(table) == 9
    ok, table = gamma_invariance(parse_rls("|0* 1 0* 1 0*>"), G01)
    assert not ok
    assert [k for k, v in table.items() if v] == [(1, 1), (1, 2), (1, 3)]
    assert gamma_invariance(parse_rls("|0* 1 0* 1 0*> + |0* 2 0*>"), G012)[0]


def test_gamma_check_limits():
    with pytest.raises(CapExceeded):
        gamma_block_check(parse_rls("|0* 1 0*>"), G01, 5, 5)
    with pytest.raises(InvalidInput):
        gamma_block_check(parse_rls("|0* 7 0*>"), G01, 1, 1)


def test_backbone_of_w_like_boundary():
    a_low = np.array([np.eye(2), E(0, 1, 2)])
    r = extract_backbone([[0.5, 0], [2.0, 0]], a_low)
    assert render(r) == "0.5*|0*> + 2*S1|0* f 0*>(|1>)"


def test_backbone_of_diagonal_boundary():
    a_low = np.array([np.diag([1, 0, 0]), np.diag([0, 1, 0]), np.diag([0, 0, 1])])
    r = extract_backbone(np.diag([1.0, 2.0, 3.0]), a_low)
    assert render(r) == "1*|0*> + 2*|1*> + 3*|2*>"


def test_invalid_lower_tensor():
    with pytest.raises(InvalidALow):
        extract_backbone(np.eye(2), np.array([np.eye(2), E(1, 0, 2)]))
    with pytest.raises(InvalidALow):
        extract_backbone(np.eye(2), np.array([2 * np.eye(2), E(0, 1, 2)]))
