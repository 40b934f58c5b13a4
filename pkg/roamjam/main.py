# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""CLI Parser for `roamjam`."""

from __future__ import print_function

# Standard library imports
import argparse
import logging
import sys

# Local imports
from roamjam import __version__
from roamjam.commands import COMMANDS, get_command
from roamjam.config import load_config
from roamjam.errors import (ConfigError, ConvergenceError,
                            ParameterError, SurfaceError)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class Runner(object):
    """Main command runner."""

    def __init__(self, cli_args):
        """Main command runner."""
        self.cli_args = cli_args
        self.command_name = cli_args.command
        self.quiet = cli_args.quiet
        self.config = None
        self.manifest = None

    def banner(self, msg):
        """Print a framed heading unless running quietly."""
        if self.quiet:
            return
        print('')
        print('=' * len(msg))
        print(msg)
        print('=' * len(msg))
        print('')

    def load(self):
        """Load the configuration and apply sweep overrides."""
        config = load_config(self.cli_args.config_file, self.cli_args)
        axis = getattr(self.cli_args, 'axis', None)
        values = getattr(self.cli_args, 'values', None)
        if axis is not None:
            config['sweep']['axis'] = axis
        if values is not None:
            config['sweep']['values'] = values
        self.config = config
        return config

    def run(self):
        """Run the selected command and return the exit code."""
        self.banner('Running roamjam {0}'.format(self.command_name))
        try:
            self.load()
            command = get_command(self.command_name)(self.config)
            if not self.quiet:
                print('Running "{0}" ...'.format(command.name))
            self.manifest = command.run()
        except (ConfigError, ParameterError, SurfaceError) as err:
            self.banner('roamjam failure: invalid configuration')
            print('Error: {0}'.format(err), file=sys.stderr)
            return EXIT_CONFIG
        except ConvergenceError as err:
            self.banner('roamjam failure: numerical convergence')
            print('Error: {0}'.format(err), file=sys.stderr)
            return EXIT_NUMERIC

        if not self.quiet:
            for name in self.manifest.files:
                print('    {0}'.format(command.output.path(name)))
        self.banner('roamjam successful run')
        return EXIT_OK


def build_parser():
    """Return the argument parser with one sub-parser per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--config',
        '-cf',
        dest='config_file',
        default=None,
        help=('Select a scenario config file to use. Default is none, '
              'built-in defaults are used.'))
    common.add_argument(
        '--out',
        '-o',
        dest='out',
        default=None,
        help='Output directory. Overrides "output_dir" of the config.')
    common.add_argument(
        '--seed',
        '-s',
        dest='seed',
        type=int,
        default=None,
        help='Root seed. Overrides "seed" of the config.')
    common.add_argument(
        '--quiet',
        '-q',
        action='store_true',
        default=False,
        help='Only print warnings and errors.')

    description = ('Mobility-powered MAC attack toolkit: attacker MDP, '
                   'hop oracles and coexistence MAC simulation.')
    parser = argparse.ArgumentParser(prog='roamjam',
                                     description=description)
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    helps = {
        'solve': 'Solve the attacker MDP and analyse the optimal policy.',
        'hopsim': 'Run the Monte-Carlo hop and sweep oracles.',
        'macsim': 'Run the benign/attack coexistence MAC timeline.',
        'sweep': 'Evaluate headline outputs along one parameter axis.',
    }
    for command in COMMANDS:
        sub = subparsers.add_parser(command.name, parents=[common],
                                    help=helps[command.name])
        if command.name == 'sweep':
            sub.add_argument(
                '--axis',
                '-a',
                dest='axis',
                default=None,
                help=('Parameter to sweep: a model symbol (M, m, q, G, '
                      'alpha, beta, delta, c, L, Q, B, V, C, E, F), '
                      '"weight.<label>" or "mac.malicious_cw".'))
            sub.add_argument(
                '--values',
                '-v',
                dest='values',
                type=float,
                nargs='+',
                default=None,
                help='Values taken by the axis.')
    return parser


def main(argv=None):
    """CLI `Parser for roamjam`."""
    cli_args = build_parser().parse_args(argv)
    level = logging.WARNING if cli_args.quiet else logging.INFO
    logging.basicConfig(level=level,
                        format='%(levelname)s %(name)s: %(message)s')
    return Runner(cli_args).run()


if __name__ == '__main__':
    sys.exit(main())
