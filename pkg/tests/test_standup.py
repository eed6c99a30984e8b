import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from blockid.blocking import RateTable, asep_q1_table, k_exclusion_table, model_table, three_state_table
from blockid.normalizers import iter_omega
from blockid.standup import (
    EtaState, OmegaState, conserved_n, eta_jumps, intertwine_check, lay_down, omega_jumps,
    omega_jumps_from_occupancy, stand_up, window_states,
)

import oracles

HALF = F(1, 2)
EXCL2 = k_exclusion_table(HALF, 2)

# particles: one at -3, two at -2, two at 1, one each at 2 and 3, two at 4 and 5
LINE_ETA = EtaState(2, -3, (1, 2, 0, 0, 2, 1, 1, 2, 2))
GAPS_OMEGA = OmegaState(2, 1, (1, 0, 3, 0, 1, 1))


def test_ground_states_conserved_quantity():
    assert conserved_n(EtaState.ground(2, 0)) == 0
    assert conserved_n(EtaState.ground(2, 1)) == -1
    for k in (2, 3, 4):
        for m in range(k):
            assert conserved_n(EtaState.ground(k, m)) == -m


def test_left_shift_lowers_conserved_quantity_by_k():
    rng = random.Random(3)
    for k in (2, 3):
        for _ in range(50):
            eta = EtaState(k, rng.randint(-4, 2), tuple(rng.randint(0, k) for _ in range(6)))
            assert conserved_n(eta.shifted(-1)) == conserved_n(eta) - k


def test_standing_up_example():
    assert conserved_n(LINE_ETA) == -1
    om = stand_up(LINE_ETA)
    assert om == GAPS_OMEGA
    assert om.prefix(11) == (1, 0, 3, 0, 1, 1, 1, 0, 1, 0, 1)
    assert lay_down(GAPS_OMEGA, -1) == LINE_ETA


def test_ground_states_stand_up_to_alternating_gaps():
    even = stand_up(EtaState.ground(2, 0))
    assert even == OmegaState.ground(2, 0) and even.prefix(6) == (0, 1, 0, 1, 0, 1)
    for shift in range(-3, 4):
        assert stand_up(EtaState.ground(2, 1, shift)) == OmegaState.ground(2, 1)
    assert lay_down(OmegaState.ground(2, 1), -1) == EtaState.ground(2, 1)


def test_even_ground_with_n_two_is_a_shift():
    eta = lay_down(OmegaState.ground(2, 0), 2)
    assert eta == EtaState.ground(2, 0, 1)
    assert conserved_n(eta) == 2 and stand_up(eta) == OmegaState.ground(2, 0)


def test_lay_down_rejects_wrong_class():
    with pytest.raises(ValueError):
        lay_down(OmegaState.ground(2, 0), 1)


def test_round_trip_exhaustive_twelve_sites():
    for eta in window_states(2, -5, 6):
        assert lay_down(stand_up(eta), conserved_n(eta)) == eta


@pytest.mark.parametrize("k,m", [(2, 0), (2, 1), (3, 0), (3, 1), (3, 2)])
def test_stand_up_after_lay_down(k, m):
    for om in iter_omega(k, m, 7):
        for n in (-m, -m + k, -m - 2 * k):
            eta = lay_down(om, n)
            assert conserved_n(eta) == n and stand_up(eta) == om


def test_ground_interface_moves_for_two_exclusion():
    moves = eta_jumps(EtaState.ground(2, 0), EXCL2)
    assert len(moves) == 1
    ev, new = moves[0]
    assert (ev.site, ev.direction, ev.rate) == (0, "left", HALF)
    assert new.window(0, 1) == (1, 1)


@pytest.mark.parametrize("table", [EXCL2, asep_q1_table(HALF), three_state_table(HALF, HALF), k_exclusion_table(HALF, 3)])
def test_move_count_matches_pair_scan(table):
    p = {(y, z): table.p[y][z] for y in range(table.k + 1) for z in range(table.k + 1)}
    l = {(y, z): table.q[y][z] for y in range(table.k + 1) for z in range(table.k + 1)}
    for eta in window_states(table.k, -2, 2):
        values = list(eta.window(-4, 5))
        assert len(eta_jumps(eta, table)) == oracles.scan_moves(values, p, l)
        for ev, _ in eta_jumps(eta, table):
            assert ev.rate > 0


def test_moves_conserve_n():
    for table in (EXCL2, k_exclusion_table(HALF, 3)):
        for eta in window_states(table.k, -2, 2):
            n = conserved_n(eta)
            assert all(conserved_n(e) == n for _, e in eta_jumps(eta, table))


def test_stood_up_right_move_blocked_before_a_zero():
    om = OmegaState(2, 0, (2, 1, 0, 1))  # omega_{-2} = 1, omega_{-3} = 0
    assert not [ev for ev, _ in omega_jumps(om, EXCL2) if ev.site == 2 and ev.direction == "right"]


def test_boundary_rate_with_empty_first_gap():
    r = three_state_table(HALF, HALF)
    om = OmegaState.ground(2, 0)  # omega_{-1} = 0
    out = [ev for ev, _ in omega_jumps(om, r) if ev.direction == "out"]
    assert [ev.rate for ev in out] == [r.q[0][2]]
    assert not [ev for ev, _ in omega_jumps(om, r) if ev.direction == "in"]


def test_three_exclusion_zero_run_blocking():
    r = k_exclusion_table(HALF, 3)
    for om in iter_omega(3, 0, 6):
        assert sorted(omega_jumps(om, r), key=repr) == sorted(omega_jumps_from_occupancy(om, r), key=repr)


@pytest.mark.parametrize("table", [EXCL2, asep_q1_table(HALF), three_state_table(HALF, HALF)])
def test_tabulated_rates_match_occupancy_reading(table):
    for m in (0, 1):
        for om in iter_omega(2, m, 7):
            assert sorted(omega_jumps(om, table), key=repr) == sorted(omega_jumps_from_occupancy(om, table), key=repr)


def test_intertwining_two_exclusion_eight_sites():
    assert all(intertwine_check(eta, EXCL2) for eta in window_states(2, -3, 4))


def test_intertwining_asep_random_states():
    r = asep_q1_table(HALF)
    rng = random.Random(11)
    for _ in range(300):
        eta = EtaState(2, rng.randint(-6, 3), tuple(rng.randint(0, 2) for _ in range(rng.randint(1, 10))))
        assert intertwine_check(eta, r)


def test_corrupted_stood_up_rates_are_caught():
    p = [list(row) for row in EXCL2.p]
    p[1][0] *= 2
    bad = RateTable(2, p, EXCL2.q)
    assert not all(intertwine_check(eta, EXCL2, bad) for eta in window_states(2, -2, 2))


def test_omega_rejects_k_zeros():
    with pytest.raises(ValueError):
        OmegaState(2, 0, (1, 0, 0, 1))
    with pytest.raises(ValueError):
        OmegaState(3, 0, (0, 0, 0))


def test_json_forms():
    assert json.loads(LINE_ETA.to_json())["n"] == -1
    assert json.loads(GAPS_OMEGA.to_json()) == {"k": 2, "m": 1, "values": [1, 0, 3, 0, 1, 1]}


states = st.builds(
    lambda k, lo, vals: EtaState(k, lo, tuple(v % (k + 1) for v in vals)),
    st.integers(2, 4), st.integers(-8, 4), st.lists(st.integers(0, 4), min_size=0, max_size=12),
)


@settings(max_examples=200, deadline=None)
@given(states)
def test_round_trip_and_class_law(eta):
    om = stand_up(eta)
    n = conserved_n(eta)
    assert om.m == (-n) % eta.k
    assert lay_down(om, n) == eta
    run = 0
    for i in range(1, om.depth + eta.k + 1):
        run = run + 1 if om.at(i) == 0 else 0
        assert run < eta.k


@settings(max_examples=100, deadline=None)
@given(states, st.sampled_from(["two-exclusion", "asep", "three-state"]))
def test_intertwining_random(eta, model):
    if eta.k == 2:
        assert intertwine_check(eta, model_table(model, HALF))
    else:
        assert intertwine_check(eta, k_exclusion_table(HALF, eta.k))
