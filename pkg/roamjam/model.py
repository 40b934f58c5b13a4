# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""Attacker MDP: states, actions, rewards and the transition kernel.

Each zone of the surface contributes the states

    P       channel occupied by the primary (radar) user
    H1..HK  i consecutive slots without finding the victim channel
    A1..AG  j consecutive successful attacks
    D       detected by the intrusion detection system

and every non-D state offers stay+hop (``sh``), move+hop (``mh``) and
move+stay (``ms``) towards each neighboring zone. A detected attacker is
relocated to a uniformly chosen neighbor.
"""

# Standard library imports
from collections import OrderedDict, namedtuple
import logging
import math
import numbers

# Third party imports
import numpy as np

# Local imports
from roamjam.config import DEFAULT_CONFIG
from roamjam.errors import ParameterError, SurfaceError

logger = logging.getLogger(__name__)

# State kinds, in canonical per-zone order
BUSY = 'P'
HOP = 'H'
ATTACK = 'A'
DETECTED = 'D'
KIND_ORDER = (BUSY, HOP, ATTACK, DETECTED)

# Action kinds, in tie-break order
STAY_HOP = 'sh'
MOVE_HOP = 'mh'
MOVE_STAY = 'ms'
RELOCATE = 'relocate'
STAY_STAY = 'ss'  # forbidden, never offered
ACTION_ORDER = (STAY_HOP, MOVE_HOP, MOVE_STAY, RELOCATE)

ROW_TOLERANCE = 1e-12

INTEGER_FIELDS = ('channels', 'sensed', 'mini_slots', 'drop_threshold')
REWARD_FIELDS = ('reward_attack', 'reward_drop', 'cost_busy', 'cost_move',
                 'cost_hop', 'cost_detect', 'penalty_forbidden')
COST_FIELDS = ('cost_busy', 'cost_move', 'cost_hop', 'cost_detect',
               'penalty_forbidden')
MODEL_FIELDS = INTEGER_FIELDS + ('radar_on', 'radar_off', 'discount',
                                 'ids_param') + REWARD_FIELDS


class State(namedtuple('State', ['location', 'kind', 'index'])):
    """Attacker state at a zone; `index` is 0 for P and D."""

    __slots__ = ()

    @property
    def code(self):
        """Return the short code, e.g. 'P', 'H2', 'A1' or 'D'."""
        if self.kind in (HOP, ATTACK):
            return '{0}{1}'.format(self.kind, self.index)
        return self.kind


class Action(namedtuple('Action', ['kind', 'target'])):
    """Attacker action; `target` is the destination zone of a move."""

    __slots__ = ()

    def __str__(self):
        """Return 'sh', 'relocate' or '<kind>-><target>'."""
        if self.target is None:
            return self.kind
        return '{0}->{1}'.format(self.kind, self.target)

    @property
    def sort_key(self):
        """Return the tie-break key: sh < mh(lowest id) < ms(lowest id)."""
        target = -1 if self.target is None else self.target
        return (ACTION_ORDER.index(self.kind), target)


SH = Action(STAY_HOP, None)
FORCED_RELOCATION = Action(RELOCATE, None)
FORBIDDEN = Action(STAY_STAY, None)


def move_hop(target):
    """Return the move+hop action towards `target`."""
    return Action(MOVE_HOP, target)


def move_stay(target):
    """Return the move+stay action towards `target`."""
    return Action(MOVE_STAY, target)


class ModelParams(object):
    """Scalar parameters of the attacker model.

    Parameters
    ----------
    channels : int
        Channels available per zone (M).
    sensed : int
        Channels the attacker senses per slot (m).
    mini_slots : int
        Mini-slots per victim transmission (q).
    drop_threshold : int
        Consecutive failures after which the victim drops its packet (G).
    radar_on, radar_off : float
        Primary-user OFF->ON and ON->OFF probabilities (alpha, beta).
    discount : float
        Discount factor of the attacker objective (delta).
    ids_param : float
        Intrusion detection performance parameter (c); lower is better.
    reward_attack, reward_drop : float
        Gains of a single attack and of a packet drop (L, Q).
    cost_busy, cost_move, cost_hop, cost_detect, penalty_forbidden : float
        Costs B, V, C, E and penalty F, all nonnegative.
    """

    def __init__(self, **kwargs):
        """Scalar parameters of the attacker model."""
        unknown = set(kwargs) - set(MODEL_FIELDS)
        if unknown:
            raise ParameterError('Unknown model parameters: {0}'.format(
                ', '.join(sorted(unknown))))
        defaults = DEFAULT_CONFIG['model']
        for name in MODEL_FIELDS:
            setattr(self, name, kwargs.get(name, defaults[name]))
        self.validate()

    def __repr__(self):
        """Return a readable representation."""
        body = ', '.join('{0}={1!r}'.format(n, getattr(self, n))
                         for n in MODEL_FIELDS)
        return 'ModelParams({0})'.format(body)

    def __eq__(self, other):
        """Compare field by field."""
        if not isinstance(other, ModelParams):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __ne__(self, other):
        """Compare field by field."""
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    @property
    def hop_states(self):
        """Return K, the number of hopping states per zone."""
        return int(math.ceil(float(self.channels) / self.sensed)) - 1

    @property
    def busy_prob(self):
        """Return rho, the stationary busy probability of the radar."""
        return self.radar_on / (self.radar_on + self.radar_off)

    @property
    def survive_prob(self):
        """Return (1 - alpha)^q, the radar-free transmission probability."""
        return (1.0 - self.radar_on) ** self.mini_slots

    @property
    def fresh_attack_prob(self):
        """Return m/M, the attack probability in a fresh sweep slot."""
        return float(self.sensed) / self.channels

    @property
    def states_per_zone(self):
        """Return 1 + K + G + 1."""
        return 2 + self.hop_states + self.drop_threshold

    def validate(self):
        """Raise `ParameterError` if any invariant is violated."""
        for name in INTEGER_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value,
                                                         numbers.Integral):
                raise ParameterError('{0} must be an integer, got {1!r}'
                                     .format(name, value))
        for name in MODEL_FIELDS[len(INTEGER_FIELDS):]:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, numbers.Real):
                raise ParameterError('{0} must be a real, got {1!r}'.format(
                    name, value))
            if not math.isfinite(value):
                raise ParameterError('{0} must be finite'.format(name))

        M, m, G = self.channels, self.sensed, self.drop_threshold
        if not 1 <= m <= M:
            raise ParameterError('Need 1 <= m <= M (m={0}, M={1})'.format(
                m, M))
        if not 1 <= G < M:
            raise ParameterError('Need 1 <= G < M (G={0}, M={1})'.format(
                G, M))
        if m > M - G:
            raise ParameterError(
                'Need m <= M - G so that m/(M - j) <= 1 '
                '(m={0}, M={1}, G={2})'.format(m, M, G))
        if self.mini_slots < 1:
            raise ParameterError('Need q >= 1 (q={0})'.format(
                self.mini_slots))
        if self.hop_states < 1:
            raise ParameterError('Need K = ceil(M/m) - 1 >= 1')
        for name in ('radar_on', 'radar_off'):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ParameterError('{0} must lie in (0, 1)'.format(name))
        if not 0.0 <= self.discount < 1.0:
            raise ParameterError('discount must lie in [0, 1), got {0!r}'
                                 .format(self.discount))
        if not self.ids_param > 0:
            raise ParameterError('ids_param (c) must be positive')
        for name in COST_FIELDS:
            if getattr(self, name) < 0:
                raise ParameterError('{0} must be nonnegative'.format(name))
        return self

    def to_dict(self):
        """Return the parameters as an ordered dictionary."""
        return OrderedDict((n, getattr(self, n)) for n in MODEL_FIELDS)

    @classmethod
    def from_dict(cls, document):
        """Build parameters from a configuration-document section."""
        return cls(**dict(document))

    def replace(self, **changes):
        """Return a copy with some fields changed."""
        values = self.to_dict()
        values.update(changes)
        return ModelParams(**values)

    def scaled(self, factor):
        """Return a copy with every reward and cost multiplied by `factor`."""
        if not factor > 0:
            raise ParameterError('Scale factor must be positive')
        return self.replace(**dict((n, getattr(self, n) * factor)
                                   for n in REWARD_FIELDS))


# --- Probabilities
# -----------------------------------------------------------------------------
def detection_prob(j, c):
    """Return the IDS detection probability (j - 1)/(j - 1 + c)."""
    if j < 1:
        raise ParameterError('Attack streak must be >= 1, got {0}'.format(j))
    if not c > 0:
        raise ParameterError('IDS parameter must be positive, got {0}'
                             .format(c))
    return (j - 1.0) / (j - 1.0 + c)


def attack_prob_hop(i, params):
    """Return the attack probability after i unsuccessful sweep slots."""
    K = params.hop_states
    if not 1 <= i <= K:
        raise ParameterError('Hop streak must lie in [1, {0}], got {1}'
                             .format(K, i))
    if i < K:
        return params.fresh_attack_prob
    return 1.0


def attack_prob_streak(j, params):
    """Return m/(M - j), the attack probability after j attacks."""
    G = params.drop_threshold
    if not 1 <= j <= G:
        raise ParameterError('Attack streak must lie in [1, {0}], got {1}'
                             .format(G, j))
    return float(params.sensed) / (params.channels - j)


# --- States and actions
# -----------------------------------------------------------------------------
def state_space(params, surface):
    """Return every state in canonical order.

    Zones in surface order; within a zone P, H1..HK, A1..AG, D.
    """
    states = []
    for zone_id in surface.ids:
        states.append(State(zone_id, BUSY, 0))
        states += [State(zone_id, HOP, i)
                   for i in range(1, params.hop_states + 1)]
        states += [State(zone_id, ATTACK, j)
                   for j in range(1, params.drop_threshold + 1)]
        states.append(State(zone_id, DETECTED, 0))
    return states


def check_state(state, params, surface):
    """Raise `ParameterError` for a malformed state."""
    try:
        surface.zone(state.location)
    except SurfaceError as err:
        raise ParameterError('Malformed state {0!r}: {1}'.format(state, err))
    bounds = {
        BUSY: (0, 0),
        DETECTED: (0, 0),
        HOP: (1, params.hop_states),
        ATTACK: (1, params.drop_threshold),
    }
    if state.kind not in bounds:
        raise ParameterError('Malformed state kind {0!r}'.format(state.kind))
    low, high = bounds[state.kind]
    if not low <= state.index <= high:
        raise ParameterError('Malformed state index {0!r}'.format(state))


def available_actions(state, surface):
    """Return the actions offered at `state`, in tie-break order."""
    if state.kind == DETECTED:
        return [FORCED_RELOCATION]
    targets = surface.neighbors(state.location)
    return ([SH] + [move_hop(t) for t in targets] +
            [move_stay(t) for t in targets])


def state_id(state, surface):
    """Return a stable printable id such as 'S7:H2'."""
    return '{0}:{1}'.format(surface.zone(state.location).label, state.code)


# --- Kernel
# -----------------------------------------------------------------------------
def _outcome_split(p, params):
    """Split a slot with attack probability `p` into miss, attack, busy."""
    rho = params.busy_prob
    survive = params.survive_prob
    miss = (1.0 - rho) * (1.0 - p)
    attack = (1.0 - rho) * survive * p
    busy = rho + (1.0 - rho) * (1.0 - survive) * p
    return miss, attack, busy


def _add(row, state, prob):
    if prob > 0:
        row[state] = row.get(state, 0.0) + prob


def transition_row(state, action, params, surface):
    """Return the next-state distribution as an ordered {State: prob}.

    Zero-probability successors are omitted.
    """
    check_state(state, params, surface)
    if action not in available_actions(state, surface):
        raise ParameterError('Action {0} is not available at {1!r}'.format(
            action, state))

    row = OrderedDict()
    here = state.location
    if action.kind == RELOCATE:
        targets = surface.neighbors(here) or [here]
        for target in targets:
            _add(row, State(target, HOP, 1), 1.0 / len(targets))
        return row

    if action.kind in (MOVE_HOP, MOVE_STAY):
        # Channel assignments are independent across zones, so both moves
        # land in a fresh sweep period at the target.
        miss, attack, busy = _outcome_split(params.fresh_attack_prob, params)
        _add(row, State(action.target, HOP, 1), miss)
        _add(row, State(action.target, ATTACK, 1), attack)
        _add(row, State(action.target, BUSY, 0), busy)
        return row

    K, G = params.hop_states, params.drop_threshold
    detect = 0.0
    if state.kind == BUSY:
        p = params.fresh_attack_prob
        on_miss = State(here, HOP, 1)
        on_attack = State(here, ATTACK, 1)
    elif state.kind == HOP:
        p = attack_prob_hop(state.index, params)
        on_miss = None
        if state.index < K:
            on_miss = State(here, HOP, state.index + 1)
        on_attack = State(here, ATTACK, 1)
    elif state.index < G:
        p = attack_prob_streak(state.index, params)
        on_miss = State(here, HOP, 1)
        on_attack = State(here, ATTACK, state.index + 1)
        detect = detection_prob(state.index, params.ids_param)
    else:
        # Packet dropped: the sweep restarts over all channels
        p = params.fresh_attack_prob
        on_miss = State(here, HOP, 1)
        on_attack = State(here, ATTACK, 1)
        detect = detection_prob(G, params.ids_param)

    miss, attack, busy = _outcome_split(p, params)
    if on_miss is not None:
        _add(row, on_miss, miss)
    _add(row, on_attack, attack * (1.0 - detect))
    _add(row, State(here, DETECTED, 0), attack * detect)
    _add(row, State(here, BUSY, 0), busy)
    return row


def _reward_value(action, next_state, params, surface):
    """Return U(S, a, S') for a transition known to be possible."""
    if action.kind == RELOCATE:
        return -params.cost_move

    base = {
        STAY_HOP: params.cost_hop,
        MOVE_HOP: params.cost_hop + params.cost_move,
        MOVE_STAY: params.cost_move,
    }[action.kind]

    if next_state.kind == HOP:
        return -base
    if next_state.kind == BUSY:
        return -params.cost_busy - base
    if next_state.kind == DETECTED:
        return -params.cost_detect - base

    # Zone importance scales the gains only; a move always pays the
    # single-attack gain, even when G = 1 makes A_1 the drop state
    weight = surface.weight(next_state.location)
    if action.kind == STAY_HOP and \
            next_state.index == params.drop_threshold:
        gain = params.reward_drop
    else:
        gain = params.reward_attack
    return weight * gain - base


def reward(state, action, next_state, params, surface):
    """Return the reward of the transition (state, action, next_state)."""
    if action == FORBIDDEN:
        return -params.penalty_forbidden
    prob = transition_row(state, action, params, surface).get(next_state, 0.0)
    if not prob > 0:
        raise ParameterError('Zero-probability transition {0!r} -{1}-> {2!r}'
                             .format(state, action, next_state))
    return _reward_value(action, next_state, params, surface)


# --- Assembled model
# -----------------------------------------------------------------------------
class Mdp(object):
    """Finite discounted MDP stored as dense per-state action blocks.

    Parameters
    ----------
    states : list
        Hashable states in canonical order.
    actions : list of list
        Available actions per state, in tie-break order.
    transitions : list of numpy.ndarray
        One (n_actions, n_states) row-stochastic block per state.
    rewards : list of numpy.ndarray
        Rewards U(s, a, s') with the same shapes as `transitions`.
    discount : float
        Discount factor, 0 <= discount < 1.
    """

    def __init__(self, states, actions, transitions, rewards, discount,
                 params=None, surface=None):
        """Finite discounted MDP stored as dense per-state action blocks."""
        self.states = list(states)
        self.actions = [list(a) for a in actions]
        self.discount = float(discount)
        self.params = params
        self.surface = surface
        self.index = dict((s, i) for i, s in enumerate(self.states))

        n = len(self.states)
        blocks = [np.asarray(t, dtype=float).reshape(-1, n)
                  for t in transitions]
        reward_blocks = [np.asarray(r, dtype=float).reshape(-1, n)
                         for r in rewards]
        if len(blocks) != n or len(self.actions) != n:
            raise ParameterError('Need one action block per state')
        for acts, block, rblock in zip(self.actions, blocks, reward_blocks):
            if not acts or block.shape[0] != len(acts) or \
                    rblock.shape != block.shape:
                raise ParameterError('Action block shapes do not match')

        self.P = np.vstack(blocks)
        self.R = np.where(self.P > 0, np.vstack(reward_blocks), 0.0)
        self.expected_reward = (self.P * self.R).sum(axis=1)
        counts = [len(acts) for acts in self.actions]
        self.pair_state = np.repeat(np.arange(n), counts)
        self.offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
        self.pair_actions = [a for acts in self.actions for a in acts]

    def __repr__(self):
        """Return a short description."""
        return 'Mdp({0} states, {1} state-action pairs)'.format(
            self.n_states, self.P.shape[0])

    @property
    def n_states(self):
        """Return the number of states."""
        return len(self.states)

    @property
    def actions_per_state(self):
        """Return {state: [actions]}."""
        return OrderedDict(zip(self.states, self.actions))

    def pair(self, state, action):
        """Return the flat row index of (state, action)."""
        s = self.index[state]
        try:
            a = self.actions[s].index(action)
        except ValueError:
            raise ParameterError('Action {0} is not available at {1!r}'
                                 .format(action, state))
        return self.offsets[s] + a

    def kernel(self, state, action):
        """Return the transition row of (state, action) as a dense vector."""
        return self.P[self.pair(state, action)]

    def check(self, tolerance=ROW_TOLERANCE):
        """Raise `ParameterError` unless every row is a distribution."""
        if not 0.0 <= self.discount < 1.0:
            raise ParameterError('discount must lie in [0, 1)')
        if np.any(self.P < 0) or np.any(self.P > 1):
            raise ParameterError('Transition entries outside [0, 1]')
        sums = self.P.sum(axis=1)
        worst = float(np.max(np.abs(sums - 1.0)))
        if worst > tolerance:
            raise ParameterError('Row sums deviate from 1 by {0:.3e}'.format(
                worst))
        return self

    def start_state(self, zone_id=None):
        """Return H1 of `zone_id`, or of the lowest-id zone."""
        if self.surface is None:
            return self.states[0]
        if zone_id is None:
            zone_id = min(self.surface.ids)
        state = State(zone_id, HOP, 1)
        if state not in self.index:
            raise SurfaceError('Unknown start zone {0!r}'.format(zone_id))
        return state


def build_mdp(params, surface):
    """Assemble and validate the full attacker MDP."""
    params.validate()
    surface.check()
    states = state_space(params, surface)
    index = dict((s, i) for i, s in enumerate(states))
    n = len(states)

    actions, transitions, rewards = [], [], []
    for state in states:
        acts = available_actions(state, surface)
        block = np.zeros((len(acts), n))
        rblock = np.zeros((len(acts), n))
        for a, action in enumerate(acts):
            for next_state, prob in transition_row(state, action, params,
                                                   surface).items():
                column = index[next_state]
                block[a, column] = prob
                rblock[a, column] = _reward_value(action, next_state, params,
                                                  surface)
        actions.append(acts)
        transitions.append(block)
        rewards.append(rblock)

    mdp = Mdp(states, actions, transitions, rewards, params.discount,
              params=params, surface=surface)
    mdp.check()
    logger.info('Built MDP with %d states over %d zones (%d pairs)',
                n, len(surface), mdp.P.shape[0])
    return mdp
