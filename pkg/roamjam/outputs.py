# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""Output manager: deterministic CSV tables and the run manifest."""

# Standard library imports
from collections import OrderedDict
import io
import json
import logging
import os

# Local imports
from roamjam import __version__
from roamjam.config import MANIFEST_FILE
from roamjam.utils import (atomic_replace, canonical_json,
                           digest_document, sha256_file)

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.12g'

# Chart fed by each table
PLOT_HINTS = {
    'values.csv': 'bar chart of V per state, grouped by zone',
    'policy.csv': 'policy arrows per state on the zone map',
    'stationary.csv': 'stationary probability per state',
    'sojourn.csv': 'zone map shaded by stationary sojourn share',
    'policy_summary.csv': 'zone map with dominant (solid) and secondary '
                          '(dashed) action arrows',
    'convergence.csv': 'value-iteration residual per iteration, log scale',
    'rollout.csv': 'rollout estimate with confidence band against V(start)',
    'sweep_hist.csv': 'bar chart of detection slot frequencies',
    'drop_prob.csv': 'simulated drop probability against the closed form',
    'kernel_gap.csv': 'per-slot detection law, hop model against sweep',
    'empirical_kernel.csv': 'empirical against analytic transition rows',
    'timeseries.csv': 'running-average throughput and delay over time, '
                      'per zone and global, attack start marked',
    'summary.csv': 'grouped bars of per-phase throughput and delay',
    'stations.csv': 'per-station success, collision and drop counts',
    'airtime.csv': 'stacked idle, success and collision airtime per zone',
    'impact.csv': 'zonal against global throughput drop and delay rise',
    'sweep.csv': 'headline outputs against the swept parameter',
    'config.json': 'resolved scenario, not plotted',
}


class RunManifest(object):
    """Digest of a run: configuration, seed, version and file checksums."""

    def __init__(self, command, config_digest, seed, version=__version__):
        """Digest of a run: configuration, seed, version and file checksums."""
        self.command = command
        self.config_digest = config_digest
        self.seed = seed
        self.version = version
        self.files = OrderedDict()

    def add(self, name, checksum, rows=None):
        """Record an output file."""
        self.files[name] = OrderedDict([
            ('sha256', checksum),
            ('rows', rows),
            ('plot', PLOT_HINTS.get(name)),
        ])

    def to_dict(self):
        """Return the manifest document."""
        return OrderedDict([
            ('tool', 'roamjam'),
            ('version', self.version),
            ('command', self.command),
            ('config_digest', self.config_digest),
            ('seed', self.seed),
            ('files', self.files),
        ])

    @classmethod
    def load(cls, path):
        """Read a manifest written by `OutputManager.finalize`."""
        with io.open(path, 'r', encoding='utf-8') as file_obj:
            data = json.load(file_obj, object_pairs_hook=OrderedDict)
        manifest = cls(data['command'], data['config_digest'], data['seed'],
                       data['version'])
        manifest.files = data['files']
        return manifest

    def verify(self, folder):
        """Return the names of files whose checksum no longer matches."""
        mismatched = []
        for name, entry in self.files.items():
            path = os.path.join(folder, name)
            if not os.path.isfile(path) or \
                    sha256_file(path) != entry['sha256']:
                mismatched.append(name)
        return mismatched


class OutputManager(object):
    """Write the outputs of one command into a folder, then its manifest."""

    def __init__(self, folder, command, config):
        """Write the outputs of one command, then its manifest."""
        self.folder = folder
        self.config = config
        self.manifest = RunManifest(command, digest_document(config),
                                    config.get('seed'))
        if not os.path.isdir(folder):
            os.makedirs(folder)

    def path(self, name):
        """Return the full path of an output file."""
        return os.path.join(self.folder, name)

    def _record(self, name, rows=None):
        path = self.path(name)
        self.manifest.add(name, sha256_file(path), rows)
        logger.info('Wrote %s', path)
        return path

    def write_table(self, name, frame):
        """Write a DataFrame as CSV with a fixed float format."""
        contents = frame.to_csv(index=False, float_format=FLOAT_FORMAT,
                                lineterminator='\n')
        atomic_replace(self.path(name), contents)
        return self._record(name, len(frame))

    def write_document(self, name, data):
        """Write a JSON document with sorted keys."""
        atomic_replace(self.path(name), canonical_json(data) + '\n')
        return self._record(name)

    def finalize(self):
        """Write the manifest after every output is in place."""
        path = self.path(MANIFEST_FILE)
        atomic_replace(path, json.dumps(self.manifest.to_dict(), indent=2) +
                       '\n')
        logger.info('Wrote manifest %s (%d files)', path,
                    len(self.manifest.files))
        return path
