# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""Configuration module and parameters."""

# Standard library imports
from copy import deepcopy
import io
import json
import logging
import numbers
import os

# Third party imports
import six

# Local imports
from roamjam.errors import ConfigError

logger = logging.getLogger(__name__)

# Configuration constants
INHERIT_KEY = 'inherit_config'
DEFAULT_SEED = 20240101
DEFAULT_OUTPUT_DIR = 'results'
MANIFEST_FILE = 'manifest.json'

# Relative importance per sector, S1 (center) .. S7; S7 is 7 times S4
DEFAULT_HEX7_WEIGHTS = [2.0, 1.5, 1.5, 1.0, 2.0, 4.0, 7.0]

# Station roles of the MAC simulator
VICTIM_BS = 'victim-BS'
VICTIM_UE = 'victim-UE'
BENIGN_AP = 'benign-AP'
MALICIOUS_AP = 'malicious-AP'
STATION_ROLES = (VICTIM_BS, VICTIM_UE, BENIGN_AP, MALICIOUS_AP)

# Wi-Fi access point modes in the attacked zone
WIFI_OFF = 'off'
WIFI_BENIGN = 'benign'
WIFI_MALICIOUS = 'malicious'
WIFI_MODES = (WIFI_OFF, WIFI_BENIGN, WIFI_MALICIOUS)

DEFAULT_CONFIG = {
    'seed': DEFAULT_SEED,
    'output_dir': DEFAULT_OUTPUT_DIR,
    'surface': {
        'layout': 'hex7',
        'weights': DEFAULT_HEX7_WEIGHTS,
        'zones': [],
        'edges': [],
    },
    'model': {
        'channels': 10,
        'sensed': 2,
        'mini_slots': 2,
        'drop_threshold': 4,
        'radar_on': 0.1,
        'radar_off': 0.9,
        'discount': 0.9,
        'ids_param': 1.0,
        'reward_attack': 1.0,
        'reward_drop': 5.0,
        'cost_busy': 0.5,
        'cost_move': 1.0,
        'cost_hop': 0.1,
        'cost_detect': 50.0,
        'penalty_forbidden': 100.0,
    },
    'solver': {
        'tol': 1e-9,
        'max_iter': 10000,
        'start_zone': None,
        'stationary_tol': 1e-10,
        'stationary_max_iter': 1000000,
        'rollout_trials': 0,
    },
    'oracle': {
        'n_trials': 1000000,
        'batch_size': 100000,
    },
    'mac': {
        'zones': 3,
        'victim_ues': 4,
        'cw_min': 16,
        'cw_max': 1024,
        'retry_limit': 4,
        'wifi_mode': WIFI_MALICIOUS,
        'malicious_cw': 2,
        'benign_cw_min': 16,
        'slot_time_us': 9,
        'overhead_us': 94,
        'payload_bytes': 1000,
        'phy_rate': 155e6,
        'sim_duration': 40.0,
        'attack_start': 20.0,
        'attack_zone': 1,
        'sample_interval': 0.5,
        'rosters': [],
    },
    'sweep': {
        'axis': None,
        'values': [],
    },
}

# Keys whose default is None, with the types they accept
NULLABLE_TYPES = {
    ('solver', 'start_zone'): six.integer_types,
    ('sweep', 'axis'): six.string_types,
}

SURFACE_ZONE_KEYS = ('id', 'label', 'weight')
ROSTER_KEYS = ('zone', 'stations')
STATION_KEYS = ('role', 'cw_min', 'cw_max', 'retry_limit')

# Short symbols accepted as sweep axes
AXIS_ALIASES = {
    'M': 'channels',
    'm': 'sensed',
    'q': 'mini_slots',
    'G': 'drop_threshold',
    'alpha': 'radar_on',
    'beta': 'radar_off',
    'delta': 'discount',
    'c': 'ids_param',
    'L': 'reward_attack',
    'Q': 'reward_drop',
    'B': 'cost_busy',
    'V': 'cost_move',
    'C': 'cost_hop',
    'E': 'cost_detect',
    'F': 'penalty_forbidden',
}


def _path(keys):
    return '.'.join(str(k) for k in keys) or '<root>'


def _is_int(value):
    return isinstance(value, six.integer_types) and not isinstance(value,
                                                                   bool)


def _is_real(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _check_value(value, default, keys):
    """Check `value` against the type of `default` and return it."""
    where = _path(keys)
    if default is None:
        accepted = NULLABLE_TYPES.get(tuple(keys))
        if value is None:
            return value
        if accepted is None or isinstance(value, bool) or \
                not isinstance(value, accepted):
            raise ConfigError('Invalid value for {0}: {1!r}'.format(
                where, value))
        return value
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError('{0} must be true or false'.format(where))
    elif _is_int(default):
        if not _is_int(value):
            raise ConfigError('{0} must be an integer, got {1!r}'.format(
                where, value))
    elif _is_real(default):
        if not _is_real(value):
            raise ConfigError('{0} must be a number, got {1!r}'.format(
                where, value))
        value = float(value)
    elif isinstance(default, six.string_types):
        if not isinstance(value, six.string_types):
            raise ConfigError('{0} must be a string, got {1!r}'.format(
                where, value))
    elif isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError('{0} must be a list'.format(where))
    return value


def _check_keys(document, allowed, keys):
    if not isinstance(document, dict):
        raise ConfigError('{0} must be an object'.format(_path(keys)))
    unknown = sorted(set(document) - set(allowed))
    if unknown:
        raise ConfigError('Unknown key(s) in {0}: {1}'.format(
            _path(keys), ', '.join(unknown)))


def _check_items(section, keys):
    """Check list-valued entries whose items have a fixed shape."""
    name = keys[-1]
    if name == 'surface':
        for weight in section['weights']:
            if not _is_real(weight):
                raise ConfigError('surface.weights must be numbers')
        for zone in section['zones']:
            _check_keys(zone, SURFACE_ZONE_KEYS, keys + ['zones'])
            if 'id' not in zone or 'weight' not in zone:
                raise ConfigError('surface.zones items need id and weight')
        for edge in section['edges']:
            if not isinstance(edge, list) or len(edge) != 2 or \
                    not all(_is_int(e) for e in edge):
                raise ConfigError('surface.edges items must be [id, id]')
    elif name == 'mac':
        for roster in section['rosters']:
            _check_keys(roster, ROSTER_KEYS, keys + ['rosters'])
            if not _is_int(roster.get('zone')):
                raise ConfigError('mac.rosters items need an integer zone')
            for station in roster.get('stations', []):
                _check_keys(station, STATION_KEYS,
                            keys + ['rosters', 'stations'])
                if station.get('role') not in STATION_ROLES:
                    raise ConfigError('Unknown station role {0!r}'.format(
                        station.get('role')))
        if section['wifi_mode'] not in WIFI_MODES:
            raise ConfigError('mac.wifi_mode must be one of {0}'.format(
                ', '.join(WIFI_MODES)))
    elif name == 'sweep':
        for value in section['values']:
            if not _is_real(value):
                raise ConfigError('sweep.values must be numbers')


def validate_config(document, defaults=DEFAULT_CONFIG):
    """Merge `document` over `defaults`, rejecting unknown keys and types."""
    _check_keys(document, list(defaults) + [INHERIT_KEY], [])
    merged = deepcopy(defaults)
    for key, value in document.items():
        if key == INHERIT_KEY:
            continue
        default = defaults[key]
        if isinstance(default, dict):
            _check_keys(value, default, [key])
            section = merged[key]
            for option, option_value in value.items():
                section[option] = _check_value(option_value, default[option],
                                               [key, option])
            _check_items(section, [key])
        else:
            merged[key] = _check_value(value, default, [key])
    return merged


def load_file_config(path):
    """
    Load the JSON document at `path`, resolving `inherit_config`.

    The inherited path is relative to the including file. Keys of the
    including file override the inherited ones section by section.
    """
    try:
        with io.open(path, 'r', encoding='utf-8') as file_obj:
            document = json.load(file_obj)
    except (IOError, OSError) as err:
        raise ConfigError('Cannot read config {0}: {1}'.format(path, err))
    except ValueError as err:
        raise ConfigError('Invalid JSON in {0}: {1}'.format(path, err))
    if not isinstance(document, dict):
        raise ConfigError('Config {0} must hold a JSON object'.format(path))

    base_name = document.get(INHERIT_KEY)
    if base_name:
        folder = os.path.dirname(os.path.abspath(path))
        base_path = os.path.join(folder, base_name)

        # If a config file refers to itself, avoid entering and endless
        # recursion
        if os.path.abspath(base_path) != os.path.abspath(path):
            base = load_file_config(base_path)
            for key, value in document.items():
                if isinstance(value, dict) and isinstance(base.get(key), dict):
                    base[key].update(value)
                else:
                    base[key] = value
            document = base
    document.pop(INHERIT_KEY, None)
    return document


def load_config(path, cli_args=None):
    """Load the configuration, load defaults and apply CLI overrides."""
    document = load_file_config(path) if path else {}
    config = validate_config(document)

    if cli_args is not None:
        seed = getattr(cli_args, 'seed', None)
        if seed is not None:
            config['seed'] = _check_value(seed, DEFAULT_SEED, ['seed'])
        out = getattr(cli_args, 'out', None)
        if out:
            config['output_dir'] = out
    logger.debug('Loaded configuration from %s', path or '<defaults>')
    return config
