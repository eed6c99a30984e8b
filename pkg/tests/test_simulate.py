import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blockid.blocking import derive_params, k_exclusion_table, model_table
from blockid.simulate import (
    FiniteChain, build_stood_up_chain, build_window_chain, detailed_balance_verify, exact_occupation,
    exact_stationary, gillespie, mu_weight, pi_weight, proportional_to, stood_up_boundary_calibration,
)
from blockid.standup import EtaState, window_states

HALF = F(1, 2)
EXCL2 = k_exclusion_table(HALF, 2)


def test_balance_two_exclusion_six_sites():
    res = detailed_balance_verify(EXCL2, 0, window_states(2, -2, 3))
    assert res and res.edges_checked > 1000


def test_balance_asep_random_states():
    r = model_table("asep", HALF)
    rng = random.Random(5)
    sample = [EtaState(2, rng.randint(-5, 2), tuple(rng.randint(0, 2) for _ in range(8))) for _ in range(200)]
    assert detailed_balance_verify(r, 0, sample)
    assert detailed_balance_verify(r, 2, sample)


def test_balance_negative_control():
    bad = EXCL2.scaled("p", 1, 0, 2)
    res = detailed_balance_verify(bad, 0, window_states(2, -2, 2), params=derive_params(EXCL2))
    assert not res
    eta, eta2, fwd, back = res.witness
    assert fwd > 0 and back > 0


@pytest.mark.parametrize("model,k", [("two-exclusion", 2), ("asep", 2), ("three-state", 2), ("k-exclusion", 3)])
def test_boundary_calibration(model, k):
    rep = stood_up_boundary_calibration(model_table(model, HALF, HALF, k), max_weight=6)
    assert rep.ok, rep.failing()
    assert set(rep.cases) >= {"bulk", "y=1"}


def test_calibration_detects_wrong_parameters():
    other = derive_params(model_table("asep", F(1, 3)))
    assert not stood_up_boundary_calibration(model_table("asep", HALF), 4, params=other).ok


def test_single_state_chain():
    assert exact_stationary(FiniteChain(["x"], [])) == [1]


def test_reducible_chain_rejected():
    with pytest.raises(ValueError):
        exact_stationary(FiniteChain(["a", "b"], [(0, 1, F(1))]))


def test_tree_and_elimination_agree():
    for model in ("two-exclusion", "three-state"):
        chain = build_window_chain(model_table(model, HALF), -2, 2, 0)
        assert exact_stationary(chain, "tree") == exact_stationary(chain, "elimination")


def test_elimination_on_irreversible_cycle():
    chain = FiniteChain(["a", "b", "c"], [(0, 1, F(1)), (1, 2, F(2)), (2, 0, F(3))])
    assert exact_stationary(chain) == [F(6, 11), F(3, 11), F(2, 11)]


@pytest.mark.parametrize("model,k", [("two-exclusion", 2), ("asep", 2), ("three-state", 2), ("k-exclusion", 3)])
def test_window_stationary_is_product_measure(model, k):
    r = model_table(model, HALF, HALF, k)
    params = derive_params(r)
    for n in range(-k, k + 1):
        chain = build_window_chain(r, -2, 2, n)
        if len(chain.states) < 2:
            continue
        pi = exact_stationary(chain)
        assert proportional_to(pi, [mu_weight(s, params) for s in chain.states], params.t_squared)


def test_stood_up_stationary_matches_gap_weights():
    for model in ("two-exclusion", "three-state", "asep"):
        r = model_table(model, HALF)
        params = derive_params(r)
        for n in (0, -1):
            up = build_stood_up_chain(r, build_window_chain(r, -2, 3, n))
            pi = exact_stationary(up)
            assert proportional_to(pi, [pi_weight(s, params) for s in up.states], params.t_squared)


def test_proportionality_is_strict():
    params = derive_params(EXCL2)
    chain = build_window_chain(EXCL2, -2, 2, 0)
    pi = exact_stationary(chain)
    weights = [mu_weight(s, params) for s in chain.states]
    pi[0] *= 2
    assert not proportional_to(pi, weights, params.t_squared)


@pytest.fixture(scope="module")
def small_chain():
    chain = build_window_chain(EXCL2, -2, 3, 0)
    return chain, exact_stationary(chain)


def test_gillespie_conserves_n_and_fractions_sum_to_one(small_chain):
    chain, pi = small_chain
    stats = gillespie(chain, chain.states[0], max_jumps=1_000_000, seed=2)
    assert stats.conserved == frozenset({0}) and stats.jumps == 1_000_000
    assert np.allclose(stats.occupation.sum(axis=1), 1)


def test_gillespie_site_one_marginal(small_chain):
    chain, pi = small_chain
    stats = gillespie(chain, chain.states[0], max_jumps=300_000, seed=0, sites=(1, 1))
    exact = np.array(exact_occupation(chain, pi, (1, 1)), dtype=float)
    assert np.all(np.abs(stats.occupation - exact) <= 3 * stats.standard_errors() + 1e-12)


def test_seeds_differ_but_agree(small_chain):
    chain, _ = small_chain
    a = gillespie(chain, chain.states[0], max_jumps=200_000, seed=1)
    b = gillespie(chain, chain.states[0], max_jumps=200_000, seed=4)
    assert a.path_digest != b.path_digest
    se = np.sqrt(a.standard_errors() ** 2 + b.standard_errors() ** 2)
    assert np.all(np.abs(a.occupation - b.occupation) <= 4 * se + 1e-12)


def test_same_seed_reproduces(small_chain):
    chain, _ = small_chain
    a = gillespie(chain, chain.states[0], max_jumps=20_000, seed=9)
    b = gillespie(chain, chain.states[0], max_jumps=20_000, seed=9)
    assert a.path_digest == b.path_digest and np.array_equal(a.occupation, b.occupation)


def test_horizon_mode(small_chain):
    chain, pi = small_chain
    stats = gillespie(chain, chain.states[0], horizon=20_000.0, seed=3)
    assert stats.total_time == pytest.approx(20_000.0)
    assert stats.batch_occupation.shape[0] == 50
    rows = stats.to_rows()
    assert len(rows) == stats.occupation.size
    exact = np.array(exact_occupation(chain, pi, stats.sites), dtype=float)
    assert np.abs(stats.occupation - exact).max() < 0.05


def test_gillespie_needs_a_stopping_rule(small_chain):
    chain, _ = small_chain
    with pytest.raises(ValueError):
        gillespie(chain, chain.states[0])


def generic_member(qt, t, s11, s12, s21, s22):
    """A k = 2 family member built straight from its parameters."""
    from blockid.blocking import BlockingParams, TValue, reconstruct

    p_asym = 1 / (1 + qt)
    f = (TValue(F(0)), TValue(F(1), -1), TValue(F(1), 1))
    # powers of t chosen so every rate comes out rational
    s = {(1, 1): TValue(s11, 1), (1, 2): TValue(s12, 1), (2, 1): TValue(s21, -1), (2, 2): TValue(s22, 1)}
    params = BlockingParams(2, p_asym, 1 - p_asym, qt, t * t, f, s)
    return reconstruct(params), params


positive = st.fractions(min_value=F(1, 9), max_value=9)


@settings(max_examples=15, deadline=None)
@given(st.fractions(min_value=F(1, 9), max_value=F(8, 9)), positive, positive, positive, positive, positive)
def test_calibration_at_random_family_points(qt, t, s11, s12, s21, s22):
    # both sides are polynomial in the parameters, so agreement at random exact points
    # stands in for a formal identity
    rates, params = generic_member(qt, t, s11, s12, s21, s22)
    assert stood_up_boundary_calibration(rates, max_weight=3, params=params).ok
    sample = list(window_states(2, -2, 2))
    assert detailed_balance_verify(rates, 0, sample, params=params)
