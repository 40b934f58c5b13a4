# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""Sub-commands: solve, hopsim, macsim and sweep."""

# Standard library imports
from collections import OrderedDict, namedtuple
from copy import deepcopy
import logging

# Third party imports
import numpy as np
import pandas as pd

# Local imports
from roamjam.config import AXIS_ALIASES, validate_config
from roamjam.errors import ConfigError, ParameterError
from roamjam.macsim import (benign_vs_attack_timeline,
                            scenario_from_config, zonal_vs_global)
from roamjam.model import (ATTACK, BUSY, DETECTED, FORCED_RELOCATION,
                           HOP, INTEGER_FIELDS, SH, ModelParams, State,
                           build_mdp, state_id)
from roamjam.oracle import (drop_probability, kernel_deviation,
                            kernel_gap_report, sample_kernel,
                            simulate_drop_chain,
                            simulate_physical_sweep)
from roamjam.outputs import OutputManager
from roamjam.solver import (contraction_holds, extract_policy,
                            induced_chain, policy_summary,
                            rollout_value_check, sojourn_by_location,
                            stationary_distribution, value_iteration)
from roamjam.surface import from_document
from roamjam.utils import derive_seed

logger = logging.getLogger(__name__)

RESOLVED_CONFIG = 'config.json'
WEIGHT_AXIS = 'weight.'
MAC_AXES = ('mac.malicious_cw', )

SolveResult = namedtuple('SolveResult', ['mdp', 'values', 'policy', 'start',
                                         'stationary', 'sojourn', 'summary'])

SWEEP_COLUMNS = ['axis', 'value', 'v_start', 'top_zone', 'top_share',
                 'drop_probability', 'zonal_drop', 'global_drop',
                 'zonal_delay_rise', 'global_delay_rise']


def build_surface(config):
    """Return the validated surface of a configuration."""
    return from_document(config['surface'])


def build_params(config):
    """Return the validated model parameters of a configuration."""
    return ModelParams.from_dict(config['model'])


def _state_columns(states, surface):
    return OrderedDict([
        ('state_id', [state_id(s, surface) for s in states]),
        ('location', [s.location for s in states]),
        ('kind', [s.kind for s in states]),
        ('index', [s.index for s in states]),
    ])


def solve_scenario(config):
    """Build, solve and analyse the attacker MDP of a configuration."""
    solver = config['solver']
    surface = build_surface(config)
    mdp = build_mdp(build_params(config), surface)
    values = value_iteration(mdp, tol=solver['tol'],
                             max_iter=solver['max_iter'])
    if not contraction_holds(values.residuals, mdp.discount):
        logger.warning('Value-iteration residuals did not contract at rate '
                       '%.3g', mdp.discount)
    policy = extract_policy(mdp, values)
    start = mdp.start_state(solver['start_zone'])
    stationary = stationary_distribution(
        induced_chain(mdp, policy), start=mdp.index[start],
        states=mdp.states, tol=solver['stationary_tol'],
        max_iter=solver['stationary_max_iter'])
    return SolveResult(mdp, values, policy, start, stationary,
                       sojourn_by_location(stationary),
                       policy_summary(policy, stationary))


class Command(object):
    """Generic sub-command."""

    name = None
    outputs = ()

    def __init__(self, config, folder=None):
        """Generic sub-command."""
        self.config = config
        self.folder = folder or config['output_dir']
        self.output = OutputManager(self.folder, self.name, config)

    def seed(self, component):
        """Return the sub-seed of a named component of this command."""
        return derive_seed(self.config['seed'],
                           '{0}.{1}'.format(self.name, component))

    def run(self):
        """Run the command, write its outputs and return the manifest."""
        self.output.write_document(RESOLVED_CONFIG, self.config)
        self.execute()
        self.output.finalize()
        return self.output.manifest

    def execute(self):
        """Compute and write the outputs."""
        raise NotImplementedError


class SolveCommand(Command):
    """Optimal policy, stationary sojourn and policy summary."""

    name = 'solve'
    outputs = ('values.csv', 'policy.csv', 'stationary.csv', 'sojourn.csv',
               'policy_summary.csv', 'convergence.csv')

    def execute(self):
        """Compute and write the outputs."""
        result = solve_scenario(self.config)
        mdp, surface = result.mdp, result.mdp.surface
        states = mdp.states

        table = _state_columns(states, surface)
        table['value'] = result.values.values
        self.output.write_table('values.csv', pd.DataFrame(table))

        table = _state_columns(states, surface)
        table['action'] = [str(result.policy[s]) for s in states]
        self.output.write_table('policy.csv', pd.DataFrame(table))

        table = _state_columns(states, surface)
        table['pi'] = result.stationary.pi
        table['recurrent'] = [s in result.stationary.recurrent_class
                              for s in states]
        self.output.write_table('stationary.csv', pd.DataFrame(table))

        zones = [surface.zone(z) for z in result.sojourn]
        self.output.write_table('sojourn.csv', pd.DataFrame(OrderedDict([
            ('zone', [z.id for z in zones]),
            ('label', [z.label for z in zones]),
            ('weight', [z.weight for z in zones]),
            ('share', list(result.sojourn.values())),
        ])))

        rows = []
        for zone_id, entry in result.summary.items():
            rows.append((zone_id, surface.zone(zone_id).label,
                         str(entry.dominant), entry.dominant_mass,
                         '' if entry.secondary is None
                         else str(entry.secondary), entry.secondary_mass))
        self.output.write_table('policy_summary.csv', pd.DataFrame(
            rows, columns=['zone', 'label', 'dominant', 'dominant_mass',
                           'secondary', 'secondary_mass']))

        residuals = result.values.residuals
        self.output.write_table('convergence.csv', pd.DataFrame(OrderedDict([
            ('iteration', np.arange(1, len(residuals) + 1)),
            ('residual', residuals),
        ])))

        trials = self.config['solver']['rollout_trials']
        if trials:
            check = rollout_value_check(mdp, result.policy, result.start,
                                        n_trials=trials,
                                        seed=self.seed('rollout'))
            self.output.write_table('rollout.csv', pd.DataFrame([OrderedDict([
                ('start', state_id(result.start, surface)),
                ('value', result.values[result.start]),
                ('mean', check.mean),
                ('std_error', check.std_error),
                ('ci_low', check.ci_low),
                ('ci_high', check.ci_high),
                ('n_trials', check.n_trials),
                ('horizon', check.horizon),
            ])]))
        return result


class HopsimCommand(Command):
    """Monte-Carlo oracles of the hop model."""

    name = 'hopsim'
    outputs = ('sweep_hist.csv', 'drop_prob.csv', 'kernel_gap.csv',
               'empirical_kernel.csv')

    def execute(self):
        """Compute and write the outputs."""
        oracle = self.config['oracle']
        n_trials, batch_size = oracle['n_trials'], oracle['batch_size']
        params = build_params(self.config)
        M, m, G = params.channels, params.sensed, params.drop_threshold

        histogram = simulate_physical_sweep(M, m, n_trials,
                                            self.seed('sweep'), batch_size)
        self.output.write_table('sweep_hist.csv', pd.DataFrame(OrderedDict([
            ('slot', np.arange(1, len(histogram) + 1)),
            ('count', histogram),
            ('probability', histogram / float(n_trials)),
        ])))

        drop = simulate_drop_chain(M, m, G, n_trials, self.seed('drop'),
                                   batch_size=batch_size)
        self.output.write_table('drop_prob.csv', pd.DataFrame([OrderedDict([
            ('M', M), ('m', m), ('G', G), ('n_trials', drop.n_trials),
            ('drops', drop.drops), ('probability', drop.probability),
            ('std_error', drop.std_error), ('ci_low', drop.ci_low),
            ('ci_high', drop.ci_high),
            ('closed_form', drop_probability(M, m, G)),
        ])]))

        self.output.write_table('kernel_gap.csv', kernel_gap_report(
            params, n_trials, self.seed('gap'), batch_size))

        mdp = build_mdp(params, build_surface(self.config))
        kernel = sample_kernel(mdp, self.oracle_pairs(mdp), n_trials,
                               self.seed('kernel'), batch_size)
        self.output.write_table('empirical_kernel.csv',
                                kernel_deviation(mdp, kernel))
        return kernel

    @staticmethod
    def oracle_pairs(mdp):
        """Return the (state, action) pairs checked against the kernel."""
        params = mdp.params
        zone = mdp.surface.ids[0]
        K, G = params.hop_states, params.drop_threshold
        states = [State(zone, HOP, 1), State(zone, HOP, K),
                  State(zone, BUSY, 0), State(zone, ATTACK, 1)]
        if G > 1:
            states.append(State(zone, ATTACK, G - 1))
        states.append(State(zone, ATTACK, G))
        pairs = []
        for state in states:
            if (state, SH) not in pairs:
                pairs.append((state, SH))
        pairs.append((State(zone, DETECTED, 0), FORCED_RELOCATION))
        return pairs


class MacsimCommand(Command):
    """Benign/attack timeline of the coexistence simulator."""

    name = 'macsim'
    outputs = ('timeseries.csv', 'summary.csv', 'stations.csv',
               'airtime.csv', 'impact.csv')

    def execute(self):
        """Compute and write the outputs."""
        scenario = scenario_from_config(self.config, seed=self.seed('run'))
        metrics = benign_vs_attack_timeline(scenario)
        self.output.write_table('timeseries.csv', metrics.series)
        self.output.write_table('summary.csv', metrics.summary)
        self.output.write_table('stations.csv', metrics.stations)
        self.output.write_table('airtime.csv', metrics.airtime)
        impact = zonal_vs_global(metrics)
        self.output.write_table('impact.csv', pd.DataFrame([impact]))
        return metrics


def resolve_axis(axis):
    """Return (section, key) for a sweep axis name or alias."""
    if axis is None:
        raise ConfigError('A sweep needs an axis')
    if axis in AXIS_ALIASES:
        return 'model', AXIS_ALIASES[axis]
    if axis in AXIS_ALIASES.values():
        return 'model', axis
    if axis.startswith(WEIGHT_AXIS) and len(axis) > len(WEIGHT_AXIS):
        return 'weight', axis[len(WEIGHT_AXIS):]
    if axis in MAC_AXES:
        return 'mac', axis.split('.', 1)[1]
    raise ConfigError('Unknown sweep axis {0!r}'.format(axis))


def _integral(value, axis):
    if float(value) != int(value):
        raise ConfigError('Axis {0} takes integers, got {1!r}'.format(
            axis, value))
    return int(value)


def apply_axis(config, axis, value):
    """Return a copy of `config` with the swept parameter set to `value`."""
    section, key = resolve_axis(axis)
    config = deepcopy(config)
    if section == 'model':
        if key in INTEGER_FIELDS:
            value = _integral(value, axis)
        config['model'][key] = value
    elif section == 'mac':
        config['mac'][key] = _integral(value, axis)
    else:
        surface = build_surface(config)
        zone = surface.by_label(key)
        document = surface.relabel([
            value if z.id == zone.id else z.weight
            for z in surface.zones]).to_document()
        config['surface'] = document
    return validate_config(config)


class SweepCommand(Command):
    """Headline outputs along one parameter axis."""

    name = 'sweep'
    outputs = ('sweep.csv', )

    def execute(self):
        """Compute and write the outputs."""
        sweep = self.config['sweep']
        axis, values = sweep['axis'], sweep['values']
        section, _ = resolve_axis(axis)
        if not values:
            raise ConfigError('A sweep needs at least one value')

        rows = []
        for value in values:
            logger.info('Sweep point %s = %r', axis, value)
            point = apply_axis(self.config, axis, value)
            row = OrderedDict((column, np.nan) for column in SWEEP_COLUMNS)
            row['axis'] = axis
            row['value'] = value
            if section == 'mac':
                scenario = scenario_from_config(point,
                                                seed=self.seed('macsim'))
                row.update(zonal_vs_global(
                    benign_vs_attack_timeline(scenario)))
            else:
                result = solve_scenario(point)
                top = max(result.sojourn, key=result.sojourn.get)
                params = result.mdp.params
                row['v_start'] = result.values[result.start]
                row['top_zone'] = result.mdp.surface.zone(top).label
                row['top_share'] = result.sojourn[top]
                row['drop_probability'] = drop_probability(
                    params.channels, params.sensed, params.drop_threshold)
            rows.append(row)
        frame = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
        self.output.write_table('sweep.csv', frame)
        return frame


COMMANDS = [
    SolveCommand,
    HopsimCommand,
    MacsimCommand,
    SweepCommand,
]


def get_command(name):
    """Return the command class registered under `name`."""
    for command in COMMANDS:
        if command.name == name:
            return command
    raise ParameterError('Unknown command {0!r}'.format(name))
