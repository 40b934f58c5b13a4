# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""Attack surface: a graph of hexagonal zones with importance weights."""

# Standard library imports
from collections import deque, namedtuple
import logging
import math

# Local imports
from roamjam.errors import SurfaceError

logger = logging.getLogger(__name__)

HEX7_SIZE = 7

Zone = namedtuple('Zone', ['id', 'weight', 'label'])


class Surface(object):
    """Ordered zones plus a symmetric adjacency relation over their ids.

    The constructor stores what it is given so that `validate` can report
    on malformed input; `check` raises instead.
    """

    def __init__(self, zones, edges=()):
        """Ordered zones plus a symmetric adjacency relation over their ids."""
        self.zones = tuple(zones)
        self.edges = tuple((int(a), int(b)) for a, b in edges)
        adjacency = {}
        for zone in self.zones:
            adjacency.setdefault(zone.id, set())
        for a, b in self.edges:
            adjacency.setdefault(a, set()).add(b)
        self._adjacency = dict(
            (key, frozenset(value)) for key, value in adjacency.items())
        self._by_id = dict((zone.id, zone) for zone in self.zones)

    def __len__(self):
        """Return the number of zones."""
        return len(self.zones)

    def __repr__(self):
        """Return a short description."""
        return 'Surface({0} zones, {1} edges)'.format(
            len(self.zones), len(self.edges))

    @property
    def ids(self):
        """Return zone ids in surface order."""
        return [zone.id for zone in self.zones]

    def zone(self, zone_id):
        """Return the zone with `zone_id`."""
        try:
            return self._by_id[zone_id]
        except KeyError:
            raise SurfaceError('Unknown zone id: {0!r}'.format(zone_id))

    def by_label(self, label):
        """Return the zone labelled `label`."""
        for zone in self.zones:
            if zone.label == label:
                return zone
        raise SurfaceError('Unknown zone label: {0!r}'.format(label))

    def weight(self, zone_id):
        """Return the importance weight of a zone."""
        return self.zone(zone_id).weight

    def neighbors(self, zone_id):
        """Return the sorted ids adjacent to `zone_id`."""
        self.zone(zone_id)
        return sorted(n for n in self._adjacency.get(zone_id, ())
                      if n != zone_id)

    def adjacent(self, a, b):
        """Return True if the directed pair (a, b) is in the relation."""
        return b in self._adjacency.get(a, ())

    def relabel(self, weights):
        """Return a copy with new weights, in zone order."""
        if len(weights) != len(self.zones):
            raise SurfaceError('Expected {0} weights, got {1}'.format(
                len(self.zones), len(weights)))
        zones = [zone._replace(weight=float(w))
                 for zone, w in zip(self.zones, weights)]
        return Surface(zones, self.edges)

    def check(self):
        """Raise `SurfaceError` listing every violation, if any."""
        violations = validate(self)
        if violations:
            raise SurfaceError('Invalid surface: ' + '; '.join(violations))
        return self

    def to_document(self):
        """Return the configuration-document form of the surface."""
        edges = sorted(set(tuple(sorted(e)) for e in self.edges))
        return {
            'layout': 'custom',
            'zones': [{'id': z.id, 'label': z.label, 'weight': z.weight}
                      for z in self.zones],
            'edges': [list(e) for e in edges],
        }


def _check_weights(weights):
    for index, weight in enumerate(weights):
        weight = float(weight)
        if not math.isfinite(weight) or weight <= 0:
            raise SurfaceError(
                'Zone weight #{0} must be positive, got {1!r}'.format(
                    index + 1, weight))


def build_hex7(weights):
    """Build the 7-zone hex flower.

    Zone 1 (label S1) is the center, adjacent to every ring zone. Ring zones
    2..7 are laid out cyclically, each adjacent to the center and to its two
    ring neighbors. Weights are assigned in S1..S7 order.
    """
    weights = list(weights)
    if len(weights) != HEX7_SIZE:
        raise SurfaceError('hex7 needs exactly {0} weights, got {1}'.format(
            HEX7_SIZE, len(weights)))
    _check_weights(weights)

    zones = [Zone(i + 1, float(w), 'S{0}'.format(i + 1))
             for i, w in enumerate(weights)]
    ring = list(range(2, HEX7_SIZE + 1))
    edges = []
    for index, zone_id in enumerate(ring):
        following = ring[(index + 1) % len(ring)]
        edges += [(1, zone_id), (zone_id, 1),
                  (zone_id, following), (following, zone_id)]
    return Surface(zones, edges)


def line(weights):
    """Build a path graph with ids 0..n-1 and labels S1..Sn."""
    weights = list(weights)
    if not weights:
        raise SurfaceError('A surface needs at least one zone')
    _check_weights(weights)
    zones = [Zone(i, float(w), 'S{0}'.format(i + 1))
             for i, w in enumerate(weights)]
    edges = []
    for i in range(len(zones) - 1):
        edges += [(i, i + 1), (i + 1, i)]
    return Surface(zones, edges)


def neighbors(surface, zone_id):
    """Return the sorted list of zone ids adjacent to `zone_id`."""
    return surface.neighbors(zone_id)


def validate(surface):
    """Return a list of violations; an empty list means the surface is ok."""
    violations = []
    seen = set()
    for zone in surface.zones:
        if zone.id in seen:
            violations.append('duplicate id {0}'.format(zone.id))
        seen.add(zone.id)
        if not zone.weight > 0:
            violations.append('nonpositive weight at id {0}'.format(zone.id))

    for a, b in sorted(set(surface.edges)):
        if a not in seen or b not in seen:
            violations.append('edge ({0}, {1}) references unknown id'.format(
                a, b))
        if a == b:
            violations.append('self-loop at id {0}'.format(a))
        elif not surface.adjacent(b, a):
            violations.append('asymmetric edge ({0}, {1})'.format(a, b))

    if surface.zones:
        start = surface.zones[0].id
        reached = set([start])
        queue = deque([start])
        while queue:
            current = queue.popleft()
            for other in surface._adjacency.get(current, ()):
                # Connectivity is judged on the undirected closure
                if other not in reached:
                    reached.add(other)
                    queue.append(other)
            for a, b in surface.edges:
                if b == current and a not in reached:
                    reached.add(a)
                    queue.append(a)
        missing = sorted(seen - reached)
        if missing:
            violations.append('disconnected: ids {0} unreachable from {1}'
                              .format(missing, start))
    else:
        violations.append('empty surface')

    if violations:
        logger.debug('Surface violations: %s', violations)
    return violations


def from_document(document):
    """Build a surface from its configuration-document form."""
    layout = document.get('layout', 'hex7')
    if layout == 'hex7':
        surface = build_hex7(document['weights'])
    elif layout == 'line':
        surface = line(document['weights'])
    elif layout == 'custom':
        zones = []
        for item in document.get('zones', []):
            zones.append(Zone(int(item['id']), float(item['weight']),
                              str(item.get('label', item['id']))))
        edges = []
        for a, b in document.get('edges', []):
            # Edge lists in documents are undirected
            edges += [(int(a), int(b)), (int(b), int(a))]
        surface = Surface(zones, edges)
    else:
        raise SurfaceError('Unknown surface layout: {0!r}'.format(layout))
    return surface.check()
