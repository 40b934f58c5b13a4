# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""Optimal attacker policy, stationary analysis and rollout cross-checks."""

# Standard library imports
from collections import OrderedDict, namedtuple
import logging
import math

# Third party imports
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components
from scipy.stats import norm
import numpy as np

# Local imports
from roamjam.errors import ConvergenceError, ParameterError
from roamjam.model import Action
from roamjam.utils import run_batches

logger = logging.getLogger(__name__)

# Contraction slack allowed per value-iteration step
CONTRACTION_SLACK = 1e-9

# Relative tolerance under which two action values count as tied
TIE_TOLERANCE = 1e-10

UNVISITED = Action('unvisited', None)

ZoneSummary = namedtuple(
    'ZoneSummary',
    ['dominant', 'dominant_mass', 'secondary', 'secondary_mass'])

RolloutCheck = namedtuple(
    'RolloutCheck',
    ['mean', 'std_error', 'ci_low', 'ci_high', 'n_trials', 'horizon'])


class ValueFunction(object):
    """State values with the convergence history that produced them."""

    def __init__(self, states, values, iterations=0, residuals=()):
        """State values with the convergence history that produced them."""
        self.states = list(states)
        self.values = np.asarray(values, dtype=float)
        self.iterations = iterations
        self.residuals = list(residuals)
        self._index = dict((s, i) for i, s in enumerate(self.states))

    def __getitem__(self, state):
        """Return V(state)."""
        return float(self.values[self._index[state]])

    def as_dict(self):
        """Return {state: value} in state order."""
        return OrderedDict(zip(self.states, self.values.tolist()))


class Policy(object):
    """Deterministic stationary policy: one action per state."""

    def __init__(self, states, choice):
        """Deterministic stationary policy: one action per state."""
        self.states = list(states)
        self.choice = list(choice)
        self._index = dict((s, i) for i, s in enumerate(self.states))

    def __getitem__(self, state):
        """Return the action chosen at `state`."""
        return self.choice[self._index[state]]

    def __eq__(self, other):
        """Compare state lists and choices."""
        if not isinstance(other, Policy):
            return NotImplemented
        return self.states == other.states and self.choice == other.choice

    def __ne__(self, other):
        """Compare state lists and choices."""
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def as_dict(self):
        """Return {state: action} in state order."""
        return OrderedDict(zip(self.states, self.choice))


class StationaryDistribution(object):
    """Stationary probabilities supported on the recurrent class."""

    def __init__(self, states, pi, recurrent_class, iterations=0,
                 residual=0.0):
        """Stationary probabilities supported on the recurrent class."""
        self.states = list(states)
        self.pi = np.asarray(pi, dtype=float)
        self.recurrent_class = frozenset(recurrent_class)
        self.iterations = iterations
        self.residual = residual
        self._index = dict((s, i) for i, s in enumerate(self.states))

    def __getitem__(self, state):
        """Return pi(state)."""
        return float(self.pi[self._index[state]])

    def as_dict(self):
        """Return {state: probability} in state order."""
        return OrderedDict(zip(self.states, self.pi.tolist()))


# --- Bellman machinery
# -----------------------------------------------------------------------------
def q_values(mdp, values):
    """Return the one-step backup r(s, a) + delta E[V(s')] per pair."""
    return mdp.expected_reward + mdp.discount * mdp.P.dot(values)


def _greedy(mdp, q, current=None):
    """Return per-state indices of the best action.

    Values within TIE_TOLERANCE of the maximum count as ties; ties go to
    the incumbent `current` choice if given, otherwise to the first action
    in tie-break order.
    """
    chosen = []
    for s in range(mdp.n_states):
        start = mdp.offsets[s]
        block = q[start:start + len(mdp.actions[s])]
        best = block.max()
        slack = TIE_TOLERANCE * max(1.0, abs(best))
        candidates = np.flatnonzero(block >= best - slack)
        if current is not None and current[s] in candidates:
            chosen.append(int(current[s]))
        else:
            chosen.append(int(candidates[0]))
    return chosen


def value_iteration(mdp, tol=1e-9, max_iter=10000):
    """Solve the Bellman optimality equation by value iteration.

    Returns a `ValueFunction` whose residual history `residuals[k]` is
    the sup-norm change of iteration k+1; the returned values satisfy
    ||T V - V|| <= tol.
    """
    if not tol > 0:
        raise ParameterError('tol must be positive')
    if not 0.0 <= mdp.discount < 1.0:
        raise ParameterError('value iteration needs 0 <= discount < 1')

    values = np.zeros(mdp.n_states)
    residuals = []
    for iteration in range(1, int(max_iter) + 1):
        updated = np.maximum.reduceat(q_values(mdp, values), mdp.offsets)
        residual = float(np.max(np.abs(updated - values)))
        residuals.append(residual)
        values = updated
        if residual <= tol:
            logger.info('Value iteration converged in %d iterations '
                        '(residual %.3e)', iteration, residual)
            return ValueFunction(mdp.states, values, iteration, residuals)

    raise ConvergenceError(
        'Value iteration did not converge in {0} iterations '
        '(residual {1:.3e})'.format(max_iter, residuals[-1]),
        iterations=max_iter, residual=residuals[-1])


def contraction_holds(residuals, discount, slack=CONTRACTION_SLACK):
    """Return True if res[k+1] <= discount * res[k] + slack for every k."""
    return all(later <= discount * earlier + slack
               for earlier, later in zip(residuals, residuals[1:]))


def extract_policy(mdp, value_function):
    """Return the greedy policy with respect to `value_function`."""
    values = getattr(value_function, 'values', value_function)
    if not np.all(np.isfinite(values)):
        raise ParameterError('Value function must be finite')
    chosen = _greedy(mdp, q_values(mdp, values))
    return Policy(mdp.states,
                  [mdp.actions[s][a] for s, a in enumerate(chosen)])


def _policy_pairs(mdp, policy):
    return np.array([mdp.pair(state, policy[state]) for state in mdp.states])


def induced_chain(mdp, policy):
    """Return the row-stochastic matrix of the chain run by `policy`."""
    return mdp.P[_policy_pairs(mdp, policy)]


def policy_evaluation(mdp, policy):
    """Return the exact discounted value of a fixed policy."""
    pairs = _policy_pairs(mdp, policy)
    system = np.eye(mdp.n_states) - mdp.discount * mdp.P[pairs]
    values = np.linalg.solve(system, mdp.expected_reward[pairs])
    return ValueFunction(mdp.states, values)


def policy_iteration(mdp, max_iter=1000):
    """Howard policy iteration; returns (Policy, ValueFunction)."""
    current = [0] * mdp.n_states
    for iteration in range(1, int(max_iter) + 1):
        policy = Policy(mdp.states,
                        [mdp.actions[s][a] for s, a in enumerate(current)])
        value_function = policy_evaluation(mdp, policy)
        improved = _greedy(mdp, q_values(mdp, value_function.values),
                           current=current)
        if improved == current:
            value_function.iterations = iteration
            logger.info('Policy iteration stable after %d iterations',
                        iteration)
            return policy, value_function
        current = improved
    raise ConvergenceError(
        'Policy iteration did not stabilise in {0} iterations'.format(
            max_iter), iterations=max_iter)


# --- Stationary analysis
# -----------------------------------------------------------------------------
def recurrent_states(chain, start):
    """Return the indices of closed classes reachable from `start`."""
    graph = csr_matrix(np.asarray(chain) > 0)
    _, labels = connected_components(graph, directed=True,
                                     connection='strong')
    reachable = breadth_first_order(graph, start, directed=True,
                                    return_predecessors=False)
    rows, cols = graph.nonzero()
    leaking = set(labels[rows[labels[rows] != labels[cols]]].tolist())
    return sorted(int(i) for i in reachable if labels[i] not in leaking)


def stationary_distribution(chain, start=0, states=None, tol=1e-10,
                            max_iter=1000000):
    """Return the stationary distribution reached from `start`.

    Power iteration on the averaged kernel (I + P)/2, which has the same
    fixed points as P but no periodicity. Powers are taken by repeated
    squaring, so `max_iter` bounds the number of one-step updates, and
    convergence is judged by ||x P - x||_1 <= tol. Mass is restricted to
    the closed classes reachable from `start`.
    """
    chain = np.asarray(chain, dtype=float)
    n = chain.shape[0]
    if chain.shape != (n, n) or np.any(chain < 0) or \
            np.max(np.abs(chain.sum(axis=1) - 1.0)) > 1e-9:
        raise ParameterError('Chain must be a square row-stochastic matrix')
    if states is None:
        states = list(range(n))
    if not isinstance(start, (int, np.integer)):
        start = list(states).index(start)

    recurrent = recurrent_states(chain, start)
    mask = np.zeros(n, dtype=bool)
    mask[recurrent] = True

    power = 0.5 * (np.eye(n) + chain)
    x = np.zeros(n)
    x[start] = 1.0
    steps, residual = 0, float('inf')
    while True:
        candidate = x.dot(power)
        candidate /= candidate.sum()
        residual = float(np.abs(candidate.dot(chain) - candidate).sum())
        steps = 2 * steps + 1
        x = candidate
        if residual <= tol:
            break
        if steps >= max_iter:
            raise ConvergenceError(
                'Stationary iteration did not converge after {0} steps '
                '(residual {1:.3e})'.format(steps, residual),
                iterations=steps, residual=residual)
        power = power.dot(power)

    # Transient states keep only a decayed remainder here
    x[~mask] = 0.0
    x /= x.sum()

    logger.info('Stationary distribution after %d averaged steps '
                '(residual %.3e, %d recurrent states)', steps, residual,
                len(recurrent))
    return StationaryDistribution(states, x, [states[i] for i in recurrent],
                                  steps, residual)


def sojourn_by_location(dist, states=None):
    """Return {zone id: share of stationary mass}, summing to 1."""
    states = dist.states if states is None else states
    shares = OrderedDict()
    for state, mass in zip(states, dist.pi):
        shares[state.location] = shares.get(state.location, 0.0) + mass
    total = sum(shares.values())
    for location in shares:
        shares[location] /= total
    return shares


def policy_summary(policy, dist, states=None):
    """Return {zone id: ZoneSummary} ranking actions by stationary mass."""
    states = dist.states if states is None else states
    masses = OrderedDict()
    for state, mass in zip(states, dist.pi):
        zone = masses.setdefault(state.location, OrderedDict())
        action = policy[state]
        zone[action] = zone.get(action, 0.0) + mass

    summary = OrderedDict()
    for location, zone in masses.items():
        ranked = sorted(zone.items(), key=lambda item: (-item[1],
                                                        item[0].sort_key))
        ranked = [(action, mass) for action, mass in ranked if mass > 0]
        if not ranked:
            summary[location] = ZoneSummary(UNVISITED, 0.0, UNVISITED, 0.0)
        elif len(ranked) == 1:
            summary[location] = ZoneSummary(ranked[0][0], ranked[0][1],
                                            None, 0.0)
        else:
            summary[location] = ZoneSummary(ranked[0][0], ranked[0][1],
                                            ranked[1][0], ranked[1][1])
    return summary


# --- Monte-Carlo cross-check
# -----------------------------------------------------------------------------
def rollout_horizon(mdp, tolerance=1e-6):
    """Return the horizon after which the discounted tail is < tolerance."""
    r_max = float(np.max(np.abs(mdp.R))) if mdp.R.size else 0.0
    if mdp.discount == 0.0 or r_max == 0.0:
        return 1
    bound = tolerance * (1.0 - mdp.discount) / r_max
    return max(1, int(math.ceil(math.log(bound) / math.log(mdp.discount))))


def rollout_value_check(mdp, policy, start, horizon=None, n_trials=100000,
                        seed=0, confidence=0.9973, batch_size=10000,
                        n_jobs=1):
    """Estimate the discounted return of `policy` from `start`.

    Trials run in batches; batch b uses the b-th child of
    SeedSequence(seed), and batch sums are reduced in batch order, so the
    estimate does not depend on `n_jobs`.
    """
    if horizon is None:
        horizon = rollout_horizon(mdp)
    if n_trials < 1 or horizon < 1:
        raise ParameterError('Need n_trials >= 1 and horizon >= 1')
    if not 0 < confidence < 1:
        raise ParameterError('confidence must lie in (0, 1)')

    pairs = _policy_pairs(mdp, policy)
    cdf = np.cumsum(mdp.P[pairs], axis=1)
    cdf[:, -1] = 1.0
    rewards = mdp.R[pairs]
    origin = mdp.index[start]
    last = mdp.n_states - 1

    def run_batch(rng, size):
        state = np.full(size, origin)
        total = np.zeros(size)
        weight = 1.0
        for _ in range(horizon):
            draws = rng.random(size)
            following = (draws[:, None] >= cdf[state]).sum(axis=1)
            following = np.minimum(following, last)
            total += weight * rewards[state, following]
            weight *= mdp.discount
            state = following
        return total.sum(), np.square(total).sum()

    sums = run_batches(run_batch, n_trials, batch_size, seed, n_jobs)

    first = sum(s[0] for s in sums)
    second = sum(s[1] for s in sums)
    mean = first / n_trials
    variance = max(second / n_trials - mean * mean, 0.0)
    std_error = math.sqrt(variance / n_trials)
    logger.info('Rollout mean %.6f +/- %.6f over %d trials (horizon %d)',
                mean, std_error, n_trials, horizon)
    z = norm.ppf(0.5 + confidence / 2.0)
    return RolloutCheck(mean, std_error, mean - z * std_error,
                        mean + z * std_error, n_trials, horizon)
