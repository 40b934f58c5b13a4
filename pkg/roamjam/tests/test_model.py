# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""Test the attacker model: states, kernel and rewards."""

# Third party imports
import numpy as np
import pytest

# Local imports
from roamjam.config import DEFAULT_HEX7_WEIGHTS
from roamjam.errors import ParameterError, SurfaceError
from roamjam.model import (ATTACK, BUSY, DETECTED, FORBIDDEN,
                           FORCED_RELOCATION, HOP, SH, ModelParams,
                           State, attack_prob_hop, attack_prob_streak,
                           available_actions, build_mdp, detection_prob,
                           move_hop, move_stay, reward, state_id,
                           state_space, transition_row)
from roamjam.surface import Surface, Zone, build_hex7, line


def hex7():
    """Default flower."""
    return build_hex7(DEFAULT_HEX7_WEIGHTS)


def test_state_count_hex7():
    """7 zones x (1 + 4 + 4 + 1) states."""
    params = ModelParams()
    assert params.hop_states == 4
    assert len(state_space(params, hex7())) == 70


def test_state_count_minimal():
    """One zone with K = 1 and G = 1."""
    params = ModelParams(channels=2, sensed=1, drop_threshold=1)
    assert params.hop_states == 1
    assert len(state_space(params, line([1.0]))) == 4


def test_state_count_two_zones():
    """Two zones with K = 2 and G = 2."""
    params = ModelParams(channels=3, sensed=1, drop_threshold=2)
    assert params.hop_states == 2
    assert len(state_space(params, line([1.0, 1.0]))) == 12


def test_state_codes():
    """Printable ids carry the zone label."""
    state = State(7, HOP, 2)
    assert state.code == 'H2'
    assert state_id(state, hex7()) == 'S7:H2'
    assert State(1, DETECTED, 0).code == 'D'


def test_detection_prob():
    """The first attack is never detected."""
    assert detection_prob(1, 0.3) == 0.0
    assert detection_prob(2, 1.0) == 0.5
    assert detection_prob(11, 1.0) == pytest.approx(10.0 / 11.0)


def test_detection_prob_invalid():
    """Streaks start at 1 and c is positive."""
    with pytest.raises(ParameterError):
        detection_prob(0, 1.0)
    with pytest.raises(ParameterError):
        detection_prob(2, 0.0)


def test_attack_prob_hop():
    """m/M during the sweep, certain in the last hop state."""
    params = ModelParams()
    assert attack_prob_hop(1, params) == pytest.approx(0.2)
    assert attack_prob_hop(4, params) == 1.0
    with pytest.raises(ParameterError):
        attack_prob_hop(5, params)


def test_attack_prob_streak():
    """m/(M - j) after j attacks."""
    params = ModelParams()
    assert attack_prob_streak(4, params) == pytest.approx(1.0 / 3.0)
    assert attack_prob_streak(1, params) == pytest.approx(2.0 / 9.0)


def test_params_reject_large_sweep():
    """m > M - G is rejected."""
    with pytest.raises(ParameterError):
        ModelParams(channels=10, sensed=9, drop_threshold=4)


def test_params_reject_full_sweep():
    """m = M leaves no hop state."""
    with pytest.raises(ParameterError):
        ModelParams(channels=4, sensed=4, drop_threshold=0)


@pytest.mark.parametrize('changes', [
    {'radar_on': 0.0},
    {'radar_off': 1.0},
    {'discount': 1.0},
    {'ids_param': 0.0},
    {'cost_detect': -1.0},
    {'channels': 10.0},
    {'mini_slots': 0},
])
def test_params_invariants(changes):
    """Every field is range checked."""
    with pytest.raises(ParameterError):
        ModelParams(**changes)


def test_params_unknown_field():
    """Unknown keywords are rejected."""
    with pytest.raises(ParameterError):
        ModelParams(colour='red')


def test_params_scaled():
    """Scaling touches rewards and costs only."""
    params = ModelParams()
    scaled = params.scaled(2.0)
    assert scaled.reward_drop == 10.0
    assert scaled.cost_detect == 100.0
    assert scaled.channels == params.channels
    assert scaled.discount == params.discount


def test_busy_prob():
    """rho = alpha/(alpha + beta)."""
    params = ModelParams()
    assert params.busy_prob == pytest.approx(0.1)
    assert params.survive_prob == pytest.approx(0.81)


def test_row_hop_start():
    """H1 under SH splits into miss, attack and busy."""
    row = transition_row(State(7, HOP, 1), SH, ModelParams(), hex7())
    assert row[State(7, HOP, 2)] == pytest.approx(0.72, abs=1e-12)
    assert row[State(7, ATTACK, 1)] == pytest.approx(0.1458, abs=1e-12)
    assert row[State(7, BUSY, 0)] == pytest.approx(0.1342, abs=1e-12)
    assert sum(row.values()) == pytest.approx(1.0, abs=1e-12)


def test_row_last_hop():
    """The victim is certainly found in H_K."""
    row = transition_row(State(7, HOP, 4), SH, ModelParams(), hex7())
    assert set(row) == set([State(7, ATTACK, 1), State(7, BUSY, 0)])
    assert row[State(7, ATTACK, 1)] == pytest.approx(0.729, abs=1e-12)
    assert row[State(7, BUSY, 0)] == pytest.approx(0.271, abs=1e-12)


def test_row_streak_detection():
    """A streak of two faces detection with probability 1/2 at c = 1."""
    params = ModelParams()
    row = transition_row(State(3, ATTACK, 2), SH, params, hex7())
    attack = 0.9 * 0.81 * 2.0 / 8.0
    assert row[State(3, ATTACK, 3)] == pytest.approx(attack / 2)
    assert row[State(3, DETECTED, 0)] == pytest.approx(attack / 2)
    assert row[State(3, HOP, 1)] == pytest.approx(0.9 * (1 - 2.0 / 8.0))


def test_row_drop_restarts_sweep():
    """After a drop the attacker is back to a fresh sweep."""
    params = ModelParams()
    row = transition_row(State(3, ATTACK, 4), SH, params, hex7())
    attack = 0.9 * 0.81 * 0.2
    assert row[State(3, ATTACK, 1)] == pytest.approx(attack * 0.25)
    assert row[State(3, DETECTED, 0)] == pytest.approx(attack * 0.75)
    assert row[State(3, HOP, 1)] == pytest.approx(0.72)


def test_row_moves_land_fresh():
    """MH and MS land in a fresh sweep period at the target."""
    params, surface = ModelParams(), hex7()
    for action in (move_hop(6), move_stay(6)):
        row = transition_row(State(7, ATTACK, 3), action, params, surface)
        assert row[State(6, HOP, 1)] == pytest.approx(0.72)
        assert row[State(6, ATTACK, 1)] == pytest.approx(0.1458)
        assert row[State(6, BUSY, 0)] == pytest.approx(0.1342)


def test_row_relocation_center():
    """Detection at the center relocates to six equiprobable zones."""
    row = transition_row(State(1, DETECTED, 0), FORCED_RELOCATION,
                         ModelParams(), hex7())
    assert sorted(s.location for s in row) == [2, 3, 4, 5, 6, 7]
    for prob in row.values():
        assert prob == pytest.approx(1.0 / 6.0)


def test_row_relocation_single_zone():
    """Without neighbors the attacker restarts in its own zone."""
    row = transition_row(State(0, DETECTED, 0), FORCED_RELOCATION,
                         ModelParams(), line([1.0]))
    assert dict(row) == {State(0, HOP, 1): 1.0}


def test_row_rejects_bad_input():
    """Malformed states and unavailable actions raise."""
    params, surface = ModelParams(), hex7()
    with pytest.raises(ParameterError):
        transition_row(State(7, HOP, 9), SH, params, surface)
    with pytest.raises(ParameterError):
        transition_row(State(7, HOP, 1), move_hop(4), params, surface)
    with pytest.raises(ParameterError):
        transition_row(State(7, DETECTED, 0), SH, params, surface)


def test_actions():
    """SH first, then moves by target, D only relocates."""
    surface = hex7()
    actions = available_actions(State(7, HOP, 1), surface)
    assert [str(a) for a in actions] == ['sh', 'mh->1', 'mh->2', 'mh->6',
                                        'ms->1', 'ms->2', 'ms->6']
    assert available_actions(State(7, DETECTED, 0), surface) == [
        FORCED_RELOCATION]


@pytest.mark.parametrize('M', [6, 10, 20])
@pytest.mark.parametrize('m', [1, 2])
@pytest.mark.parametrize('G', [2, 4])
def test_escape_monotone_in_streak(M, m, G):
    """Longer streaks make the victim harder to lose."""
    params = ModelParams(channels=M, sensed=m, drop_threshold=G)
    surface = line([1.0])
    escapes = [transition_row(State(0, ATTACK, j), SH, params,
                              surface)[State(0, HOP, 1)]
               for j in range(1, G)]
    for earlier, later in zip(escapes, escapes[1:]):
        assert earlier > later


def test_reward_examples():
    """Gains are weighted, costs are not."""
    params = ModelParams()
    surface = line([1.0])
    assert reward(State(0, HOP, 1), SH, State(0, HOP, 2), params,
                  surface) == pytest.approx(-0.1)
    assert reward(State(0, ATTACK, 3), SH, State(0, ATTACK, 4), params,
                  surface) == pytest.approx(5.0 - 0.1)
    assert reward(State(0, ATTACK, 2), SH, State(0, DETECTED, 0), params,
                  surface) == pytest.approx(-50.1)
    assert reward(State(0, HOP, 1), SH, State(0, BUSY, 0), params,
                  surface) == pytest.approx(-0.6)


def test_reward_weighted_gain():
    """An attack in S7 is worth seven times one in S4."""
    params, surface = ModelParams(), hex7()
    assert reward(State(7, HOP, 1), SH, State(7, ATTACK, 1), params,
                  surface) == pytest.approx(7.0 - 0.1)
    assert reward(State(6, HOP, 1), move_stay(7), State(7, ATTACK, 1),
                  params, surface) == pytest.approx(7.0 - 1.0)
    assert reward(State(6, HOP, 1), move_hop(7), State(7, HOP, 1),
                  params, surface) == pytest.approx(-1.1)


def test_reward_single_attack_threshold():
    """With G = 1 only a stay-hop attack pays the drop gain."""
    params = ModelParams(drop_threshold=1)
    surface = line([1.0, 3.0])
    assert reward(State(0, HOP, 1), SH, State(0, ATTACK, 1), params,
                  surface) == pytest.approx(5.0 - 0.1)
    assert reward(State(0, HOP, 1), move_stay(1), State(1, ATTACK, 1),
                  params, surface) == pytest.approx(3.0 - 1.0)
    assert reward(State(0, HOP, 1), move_hop(1), State(1, ATTACK, 1),
                  params, surface) == pytest.approx(3.0 - 1.1)


def test_reward_forbidden_and_impossible():
    """The stay-stay action is penalised, impossible transitions raise."""
    params, surface = ModelParams(), hex7()
    assert reward(State(7, HOP, 1), FORBIDDEN, State(7, HOP, 1), params,
                  surface) == -100.0
    with pytest.raises(ParameterError):
        reward(State(7, HOP, 1), SH, State(7, ATTACK, 2), params, surface)


def test_reward_relocation():
    """Relocation pays the move cost."""
    params, surface = ModelParams(), hex7()
    assert reward(State(1, DETECTED, 0), FORCED_RELOCATION, State(3, HOP, 1),
                  params, surface) == -1.0


def test_build_mdp_rows():
    """Every row of the flower is a distribution."""
    mdp = build_mdp(ModelParams(), hex7())
    assert mdp.n_states == 70
    assert np.all(mdp.P >= 0) and np.all(mdp.P <= 1)
    assert np.max(np.abs(mdp.P.sum(axis=1) - 1.0)) <= 1e-12


def test_build_mdp_single_zone():
    """Without neighbors only SH is offered outside D."""
    mdp = build_mdp(ModelParams(), line([1.0]))
    for state, actions in mdp.actions_per_state.items():
        if state.kind == DETECTED:
            assert actions == [FORCED_RELOCATION]
        else:
            assert actions == [SH]


def test_build_mdp_center_detection():
    """D at the center has six equiprobable successors."""
    mdp = build_mdp(ModelParams(), hex7())
    row = mdp.kernel(State(1, DETECTED, 0), FORCED_RELOCATION)
    assert np.count_nonzero(row) == 6
    assert np.allclose(row[row > 0], 1.0 / 6.0)


def test_build_mdp_rejects_bad_surface():
    """Surfaces with violations cannot be built."""
    surface = Surface([Zone(1, 1.0, 'a'), Zone(2, 1.0, 'b')], [(1, 2)])
    with pytest.raises(SurfaceError):
        build_mdp(ModelParams(), surface)


def test_start_state():
    """The default start is H1 of the lowest id."""
    mdp = build_mdp(ModelParams(), hex7())
    assert mdp.start_state() == State(1, HOP, 1)
    assert mdp.start_state(7) == State(7, HOP, 1)
    with pytest.raises(SurfaceError):
        mdp.start_state(9)
