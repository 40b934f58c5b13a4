# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""
Monte-Carlo oracles for the hop model.

Two independent checks of the analytic kernel: a generative simulation of
the slot process (radar, channel found, transmission survives, IDS
detection) and a simulation of the physical sweep over channels.
"""

# Standard library imports
from collections import OrderedDict, namedtuple
import logging
import math

# Third party imports
from scipy.stats import norm
import numpy as np
import pandas as pd

# Local imports
from roamjam.errors import ParameterError
from roamjam.model import (ATTACK, BUSY, DETECTED, HOP, MOVE_HOP,
                           MOVE_STAY, RELOCATE, State,
                           attack_prob_hop, attack_prob_streak,
                           check_state, detection_prob)
from roamjam.utils import derive_seed, run_batches

logger = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 100000

# Slot outcomes of the generative simulation
MISS, FOUND, CAUGHT, INTERRUPTED = 0, 1, 2, 3
N_OUTCOMES = 4

# Binomial deviation allowed per kernel entry, in standard errors
KERNEL_SIGMAS = 4.0

SlotLaw = namedtuple('SlotLaw', ['attack_prob', 'detect_prob', 'successors',
                                 'targets'])

SlotLaws = namedtuple('SlotLaws', ['slots', 'analytic', 'physical',
                                   'analytic_hazard', 'physical_hazard'])

DropEstimate = namedtuple('DropEstimate', ['probability', 'drops', 'n_trials',
                                           'std_error', 'ci_low', 'ci_high',
                                           'closed_form'])


class TrialConfig(object):
    """Settings of a trajectory simulation."""

    def __init__(self, n_trials, horizon, seed, params, start):
        """Settings of a trajectory simulation."""
        self.n_trials = int(n_trials)
        self.horizon = int(horizon)
        self.seed = int(seed)
        self.params = params
        self.start = start
        if self.n_trials < 1:
            raise ParameterError('n_trials must be >= 1')
        if self.horizon < 1:
            raise ParameterError('horizon must be >= 1')


class EmpiricalKernel(object):
    """Observed transition counts per (state, action)."""

    def __init__(self):
        """Observed transition counts per (state, action)."""
        self.counts = OrderedDict()
        self.totals = OrderedDict()

    def add(self, state, action, next_state, count=1):
        """Record `count` observations of state -action-> next_state."""
        if count <= 0:
            return
        key = (state, action, next_state)
        self.counts[key] = self.counts.get(key, 0) + int(count)
        self.totals[(state, action)] = (self.totals.get((state, action), 0) +
                                        int(count))

    def frequencies(self, state, action):
        """Return {next state: relative frequency} for (state, action)."""
        total = self.totals.get((state, action), 0)
        result = OrderedDict()
        if not total:
            return result
        for (s, a, following), count in self.counts.items():
            if s == state and a == action:
                result[following] = float(count) / total
        return result

    def pairs(self):
        """Return the observed (state, action) pairs."""
        return list(self.totals)


# --- Generative slot model
# -----------------------------------------------------------------------------
def slot_law(state, action, params, surface):
    """Return the Bernoulli description of one slot from (state, action).

    `successors` maps each outcome (MISS, FOUND, CAUGHT, INTERRUPTED) to
    the next state; MISS maps to None when the victim is certainly found.
    `targets` is non-empty only for the forced relocation.
    """
    check_state(state, params, surface)
    here = state.location
    if state.kind == DETECTED or action.kind == RELOCATE:
        targets = surface.neighbors(here) or [here]
        return SlotLaw(0.0, 0.0, (), tuple(State(t, HOP, 1) for t in targets))

    K, G = params.hop_states, params.drop_threshold
    fresh = params.fresh_attack_prob
    if action.kind in (MOVE_HOP, MOVE_STAY):
        there = action.target
        return SlotLaw(fresh, 0.0, (State(there, HOP, 1),
                                    State(there, ATTACK, 1),
                                    None,
                                    State(there, BUSY, 0)), ())

    busy = State(here, BUSY, 0)
    caught = State(here, DETECTED, 0)
    if state.kind == BUSY:
        return SlotLaw(fresh, 0.0, (State(here, HOP, 1),
                                    State(here, ATTACK, 1), None, busy), ())
    if state.kind == HOP:
        miss = State(here, HOP, state.index + 1) if state.index < K else None
        return SlotLaw(attack_prob_hop(state.index, params), 0.0,
                       (miss, State(here, ATTACK, 1), None, busy), ())
    if state.index < G:
        return SlotLaw(attack_prob_streak(state.index, params),
                       detection_prob(state.index, params.ids_param),
                       (State(here, HOP, 1),
                        State(here, ATTACK, state.index + 1), caught, busy),
                       ())
    return SlotLaw(fresh, detection_prob(G, params.ids_param),
                   (State(here, HOP, 1), State(here, ATTACK, 1), caught,
                    busy), ())


def _draw_outcomes(rng, size, attack_prob, detect_prob, params):
    """Draw slot outcomes; probabilities may be scalars or per-trial arrays."""
    radar = rng.random(size) < params.busy_prob
    found = rng.random(size) < attack_prob
    survives = rng.random(size) < params.survive_prob
    caught = rng.random(size) < detect_prob
    return np.select([radar, ~found, ~survives, caught],
                     [INTERRUPTED, MISS, INTERRUPTED, CAUGHT], FOUND)


def _sample_pair(mdp, state, action, n_trials, seed, batch_size, n_jobs,
                 kernel):
    """Simulate `n_trials` slots of (state, action) into `kernel`."""
    params, surface = mdp.params, mdp.surface
    if action not in mdp.actions[mdp.index[state]]:
        raise ParameterError('Action {0} is not available at {1!r}'.format(
            action, state))
    law = slot_law(state, action, params, surface)

    def run_batch(rng, size):
        if law.targets:
            return np.bincount(rng.integers(len(law.targets), size=size),
                               minlength=len(law.targets))
        outcomes = _draw_outcomes(rng, size, law.attack_prob,
                                  law.detect_prob, params)
        return np.bincount(outcomes, minlength=N_OUTCOMES)

    counts = sum(run_batches(run_batch, n_trials, batch_size, seed, n_jobs))
    successors = law.targets or law.successors
    for following, count in zip(successors, counts):
        if following is not None:
            kernel.add(state, action, following, count)
    return kernel


def empirical_transition_frequencies(mdp, state, action, n_trials, seed,
                                     batch_size=DEFAULT_BATCH_SIZE,
                                     n_jobs=1):
    """Return {next state: frequency} from `n_trials` simulated slots."""
    kernel = _sample_pair(mdp, state, action, n_trials, seed, batch_size,
                          n_jobs, EmpiricalKernel())
    return kernel.frequencies(state, action)


def sample_kernel(mdp, pairs, n_trials, seed, batch_size=DEFAULT_BATCH_SIZE,
                  n_jobs=1):
    """Simulate every (state, action) in `pairs`, each from its own seed."""
    kernel = EmpiricalKernel()
    for position, (state, action) in enumerate(pairs):
        _sample_pair(mdp, state, action, n_trials,
                     derive_seed(seed, 'pair-{0}'.format(position)),
                     batch_size, n_jobs, kernel)
    return kernel


def _policy_laws(mdp, policy):
    """Tabulate the slot laws of every state under `policy` as arrays."""
    n = mdp.n_states
    attack = np.zeros(n)
    detect = np.zeros(n)
    successors = np.full((n, N_OUTCOMES), -1, dtype=int)
    laws = [slot_law(s, policy[s], mdp.params, mdp.surface)
            for s in mdp.states]
    width = max([len(law.targets) for law in laws] + [1])
    targets = np.zeros((n, width), dtype=int)
    n_targets = np.zeros(n, dtype=int)
    for i, law in enumerate(laws):
        attack[i], detect[i] = law.attack_prob, law.detect_prob
        for outcome, following in enumerate(law.successors):
            if following is not None:
                successors[i, outcome] = mdp.index[following]
        n_targets[i] = len(law.targets)
        for k, following in enumerate(law.targets):
            targets[i, k] = mdp.index[following]
    return attack, detect, successors, targets, n_targets


def simulate_policy(mdp, policy, config, batch_size=DEFAULT_BATCH_SIZE,
                    n_jobs=1):
    """Run trajectories of `policy` and count every transition taken."""
    attack, detect, successors, targets, n_targets = _policy_laws(mdp,
                                                                  policy)
    origin = mdp.index[config.start]
    params = config.params

    def run_batch(rng, size):
        counts = np.zeros((mdp.n_states, mdp.n_states), dtype=np.int64)
        state = np.full(size, origin)
        for _ in range(config.horizon):
            outcomes = _draw_outcomes(rng, size, attack[state],
                                      detect[state], params)
            following = successors[state, outcomes]
            picks = (rng.random(size) * n_targets[state]).astype(int)
            relocating = n_targets[state] > 0
            following[relocating] = targets[state[relocating],
                                            picks[relocating]]
            np.add.at(counts, (state, following), 1)
            state = following
        return counts

    counts = sum(run_batches(run_batch, config.n_trials, batch_size,
                             config.seed, n_jobs))
    kernel = EmpiricalKernel()
    for i, j in zip(*np.nonzero(counts)):
        state = mdp.states[i]
        kernel.add(state, policy[state], mdp.states[j], counts[i, j])
    logger.info('Simulated %d trajectories of %d slots, %d state-action '
                'pairs visited', config.n_trials, config.horizon,
                len(kernel.totals))
    return kernel


def kernel_deviation(mdp, kernel, sigmas=KERNEL_SIGMAS):
    """Compare empirical rows against the analytic kernel.

    Returns a DataFrame with one row per (state, action, next state) and
    a `within` flag for |empirical - p| <= sigmas * sqrt(p (1 - p) / n).
    """
    records = []
    for state, action in kernel.pairs():
        total = kernel.totals[(state, action)]
        observed = kernel.frequencies(state, action)
        row = mdp.kernel(state, action)
        support = set(observed) | set(
            mdp.states[j] for j in np.flatnonzero(row))
        for following in sorted(support, key=mdp.index.get):
            p = float(row[mdp.index[following]])
            empirical = observed.get(following, 0.0)
            bound = sigmas * math.sqrt(p * (1.0 - p) / total)
            records.append({
                'state': state.code,
                'location': state.location,
                'action': str(action),
                'next_state': following.code,
                'next_location': following.location,
                'n': total,
                'analytic': p,
                'empirical': empirical,
                'bound': bound,
                'within': abs(empirical - p) <= bound + 1e-12,
            })
    columns = ['state', 'location', 'action', 'next_state', 'next_location',
               'n', 'analytic', 'empirical', 'bound', 'within']
    return pd.DataFrame.from_records(records, columns=columns)


# --- Physical sweep
# -----------------------------------------------------------------------------
def _check_sweep(M, m):
    if not (isinstance(M, (int, np.integer)) and
            isinstance(m, (int, np.integer))):
        raise ParameterError('M and m must be integers')
    if not 1 <= m <= M:
        raise ParameterError('Need 1 <= m <= M, got M={0}, m={1}'.format(M, m))


def period_slots(M, m):
    """Return ceil(M/m), the slots one full sweep takes."""
    _check_sweep(M, m)
    return -(-M // m)


def _victim_positions(rng, size, n_channels):
    """Return the victim's position in a random ordering of the channels."""
    order = rng.permuted(np.tile(np.arange(n_channels), (size, 1)), axis=1)
    victim = rng.integers(n_channels, size=size)
    return np.argmax(order == victim[:, None], axis=1)


def simulate_physical_sweep(M, m, n_trials, seed,
                            batch_size=DEFAULT_BATCH_SIZE, n_jobs=1):
    """Return the detection-slot histogram of a random channel sweep.

    The attacker orders the M channels uniformly at random and senses m per
    slot (the last slot may hold fewer). The victim sits on a uniform
    channel. Index k of the result counts detections in slot k + 1.
    """
    n_slots = period_slots(M, m)

    def run_batch(rng, size):
        slots = _victim_positions(rng, size, M) // m
        return np.bincount(slots, minlength=n_slots)

    histogram = sum(run_batches(run_batch, n_trials, batch_size, seed,
                                n_jobs))
    logger.debug('Sweep histogram M=%d m=%d: %s', M, m, histogram.tolist())
    return histogram


def drop_probability(M, m, G):
    """Return prod_{j=1}^{G-1} m/(M - j), the drop chance after one hit."""
    _check_drop(M, m, G)
    result = 1.0
    for j in range(1, G):
        result *= float(m) / (M - j)
    return result


def _check_drop(M, m, G):
    _check_sweep(M, m)
    if not isinstance(G, (int, np.integer)) or G < 1:
        raise ParameterError('G must be a positive integer')
    if m > M - G:
        raise ParameterError('Need m <= M - G, got M={0}, m={1}, G={2}'
                             .format(M, m, G))


def simulate_drop_chain(M, m, G, n_trials, seed, confidence=0.9973,
                        batch_size=DEFAULT_BATCH_SIZE, n_jobs=1):
    """Estimate the packet-drop probability given a first successful attack.

    After attack j the victim hops uniformly among the M - j channels not
    yet attacked in this transmission attempt; the attacker orders those
    same channels at random and must find the victim in the very next
    slot. Radar is frozen, so the closed form is exact.
    """
    _check_drop(M, m, G)

    def run_batch(rng, size):
        alive = np.ones(size, dtype=bool)
        for j in range(1, G):
            found = _victim_positions(rng, size, M - j) < m
            alive &= found
        return int(alive.sum())

    drops = sum(run_batches(run_batch, n_trials, batch_size, seed, n_jobs))
    probability = float(drops) / n_trials
    std_error = math.sqrt(probability * (1.0 - probability) / n_trials)
    z = norm.ppf(0.5 + confidence / 2.0)
    return DropEstimate(probability, drops, n_trials, std_error,
                        max(0.0, probability - z * std_error),
                        min(1.0, probability + z * std_error),
                        drop_probability(M, m, G))


def expected_detection_slots(M, m):
    """Return the per-slot detection laws of the hop model and the sweep.

    `analytic` finds the victim with probability m/M in each of the K
    slots and with certainty in slot K + 1. `physical` is the unconditional
    detection probability of a random sweep, min(m, M - (k-1) m)/M.
    """
    n_slots = period_slots(M, m)
    K = n_slots - 1
    fresh = float(m) / M
    slots = np.arange(1, n_slots + 1)
    analytic_hazard = np.where(slots <= K, fresh, 1.0)
    remaining = M - (slots - 1) * m
    physical_hazard = np.minimum(m, remaining) / remaining.astype(float)
    analytic = np.where(slots <= K, (1.0 - fresh) ** (slots - 1) * fresh,
                        (1.0 - fresh) ** K)
    physical = np.minimum(m, remaining) / float(M)
    return SlotLaws(slots, analytic, physical, analytic_hazard,
                    physical_hazard)


def kernel_gap_report(params, n_trials, seed, batch_size=DEFAULT_BATCH_SIZE,
                      n_jobs=1):
    """Tabulate analytic, physical and simulated per-slot detection laws."""
    params.validate()
    M, m = params.channels, params.sensed
    laws = expected_detection_slots(M, m)
    histogram = simulate_physical_sweep(M, m, n_trials, seed, batch_size,
                                        n_jobs)
    report = pd.DataFrame({
        'slot': laws.slots,
        'analytic': laws.analytic,
        'physical': laws.physical,
        'empirical': histogram / float(n_trials),
        'count': histogram,
        'analytic_hazard': laws.analytic_hazard,
        'physical_hazard': laws.physical_hazard,
    }, columns=['slot', 'analytic', 'physical', 'empirical', 'count',
                'analytic_hazard', 'physical_hazard'])
    report['gap'] = report['analytic'] - report['physical']
    return report
