# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""
Slotted CSMA/CA simulator of cellular/Wi-Fi coexistence.

Every zone is a single shared channel, isolated from the other zones. All
stations are saturated. A contention round lasts the smallest backoff
counter (in idle slots) plus one transmission; two or more stations whose
counters expire together collide. Time is kept in integer microseconds.
"""

# Standard library imports
from collections import OrderedDict
import logging
import math

# Third party imports
import numpy as np
import pandas as pd

# Local imports
from roamjam.config import (BENIGN_AP, DEFAULT_CONFIG, MALICIOUS_AP,
                            STATION_ROLES, VICTIM_BS, VICTIM_UE,
                            WIFI_BENIGN, WIFI_MALICIOUS, WIFI_MODES)
from roamjam.errors import ParameterError
from roamjam.utils import derive_seed

logger = logging.getLogger(__name__)

MICROSECONDS = 1000000
UNIFORM_BUFFER = 4096

BENIGN_PHASE = 'benign'
ATTACK_PHASE = 'attack'
OVERALL = 'overall'
GLOBAL_ZONE = 'global'

VICTIM_ROLES = (VICTIM_BS, VICTIM_UE)


class StationConfig(object):
    """Contention parameters of one station."""

    def __init__(self, role, cw_min, cw_max, retry_limit, zone):
        """Contention parameters of one station."""
        self.role = role
        self.cw_min = int(cw_min)
        self.cw_max = int(cw_max)
        self.retry_limit = int(retry_limit)
        self.zone = zone

    def __repr__(self):
        """Return a short description."""
        return 'StationConfig({0}, cw={1}..{2}, zone={3})'.format(
            self.role, self.cw_min, self.cw_max, self.zone)

    def __eq__(self, other):
        """Compare every field."""
        if not isinstance(other, StationConfig):
            return NotImplemented
        return vars(self) == vars(other)

    def __ne__(self, other):
        """Compare every field."""
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    @property
    def is_victim(self):
        """Return True for the cellular stations whose traffic is measured."""
        return self.role in VICTIM_ROLES

    def validate(self):
        """Raise `ParameterError` for an inconsistent station."""
        if self.role not in STATION_ROLES:
            raise ParameterError('Unknown station role {0!r}'.format(
                self.role))
        if self.cw_min < 1 or self.cw_min > self.cw_max:
            raise ParameterError('Need 1 <= cw_min <= cw_max, got {0}..{1}'
                                 .format(self.cw_min, self.cw_max))
        if self.retry_limit < 1:
            raise ParameterError('retry_limit must be >= 1')
        return self


class MacScenario(object):
    """A set of isolated zones with their station rosters and timings."""

    def __init__(self, zones, slot_time_us=9, overhead_us=94,
                 payload_bytes=1000, phy_rate=155e6, sim_duration=40.0,
                 attack_start=20.0, attack_zone=1, sample_interval=0.5,
                 seed=0):
        """A set of isolated zones with their station rosters and timings."""
        self.zones = OrderedDict((zone_id, list(stations))
                                 for zone_id, stations in zones.items())
        self.slot_time_us = int(slot_time_us)
        self.overhead_us = int(overhead_us)
        self.payload_bytes = int(payload_bytes)
        self.phy_rate = float(phy_rate)
        self.sim_duration = float(sim_duration)
        self.attack_start = float(attack_start)
        self.attack_zone = attack_zone
        self.sample_interval = float(sample_interval)
        self.seed = int(seed)

    @property
    def payload_us(self):
        """Return the airtime of one payload, rounded up to a microsecond."""
        return int(math.ceil(8.0 * self.payload_bytes * MICROSECONDS /
                             self.phy_rate - 1e-9))

    @property
    def transmission_us(self):
        """Return the airtime of one transmission, payload plus overhead."""
        return self.payload_us + self.overhead_us

    @property
    def duration_us(self):
        """Return the simulated time in microseconds."""
        return int(round(self.sim_duration * MICROSECONDS))

    @property
    def attack_start_us(self):
        """Return the attack start in microseconds."""
        return int(round(self.attack_start * MICROSECONDS))

    @property
    def has_attacker(self):
        """Return True if the attacked zone holds a malicious AP."""
        return any(s.role == MALICIOUS_AP
                   for s in self.zones.get(self.attack_zone, []))

    def replace(self, **changes):
        """Return a copy with some fields replaced."""
        fields = dict(
            zones=self.zones, slot_time_us=self.slot_time_us,
            overhead_us=self.overhead_us, payload_bytes=self.payload_bytes,
            phy_rate=self.phy_rate, sim_duration=self.sim_duration,
            attack_start=self.attack_start, attack_zone=self.attack_zone,
            sample_interval=self.sample_interval, seed=self.seed)
        unknown = set(changes) - set(fields)
        if unknown:
            raise ParameterError('Unknown scenario field(s): {0}'.format(
                ', '.join(sorted(unknown))))
        fields.update(changes)
        return MacScenario(**fields)

    def with_malicious_cw(self, cw):
        """Return a copy whose malicious APs use the fixed window `cw`."""
        zones = OrderedDict()
        for zone_id, stations in self.zones.items():
            zones[zone_id] = [
                StationConfig(s.role, cw, cw, s.retry_limit, s.zone)
                if s.role == MALICIOUS_AP else s for s in stations]
        return self.replace(zones=zones)

    def validate(self):
        """Raise `ParameterError` for a malformed scenario."""
        if not self.zones:
            raise ParameterError('A scenario needs at least one zone')
        for zone_id, stations in self.zones.items():
            for station in stations:
                station.validate()
                if station.zone != zone_id:
                    raise ParameterError('Station {0!r} listed under zone {1}'
                                         .format(station, zone_id))
                if station.role == MALICIOUS_AP and \
                        station.cw_min != station.cw_max:
                    raise ParameterError('A malicious AP uses a fixed window')
        if self.attack_zone not in self.zones:
            raise ParameterError('Unknown attack zone {0!r}'.format(
                self.attack_zone))
        if self.payload_bytes <= 0 or self.phy_rate <= 0:
            raise ParameterError('payload_bytes and phy_rate must be positive')
        if self.slot_time_us < 1 or self.overhead_us < 0:
            raise ParameterError('Need slot_time_us >= 1, overhead_us >= 0')
        if not 0 < self.sim_duration:
            raise ParameterError('sim_duration must be positive')
        if not 0 <= self.attack_start <= self.sim_duration:
            raise ParameterError('Need 0 <= attack_start <= sim_duration')
        if not 0 < self.sample_interval <= self.sim_duration:
            raise ParameterError('Need 0 < sample_interval <= sim_duration')
        return self


class Metrics(object):
    """Time series, per-phase summaries and counters of one MAC run.

    Attributes
    ----------
    series : pandas.DataFrame
        Running averages from t = 0 per zone and for 'global', columns
        time_s, zone, normalized_throughput, mean_delay_s, phase.
        A victim packet's access delay ends when it is delivered or
        dropped.
    summary : pandas.DataFrame
        Per zone and 'global', per phase ('benign', 'attack') and 'overall':
        normalized_throughput and mean_delay_s.
    stations : pandas.DataFrame
        Successes, collisions, drops and normalized throughput per station.
    airtime : pandas.DataFrame
        Idle, success and collision microseconds per zone.
    """

    def __init__(self, scenario, series, summary, stations, airtime):
        """Time series, per-phase summaries and counters of one MAC run."""
        self.scenario = scenario
        self.series = series
        self.summary = summary
        self.stations = stations
        self.airtime = airtime

    def zone_series(self, zone):
        """Return the time series rows of one zone (or 'global')."""
        return self.series[self.series['zone'] == zone].reset_index(
            drop=True)

    def value(self, zone, phase, column='normalized_throughput'):
        """Return one summary value, or None if the phase never occurred."""
        rows = self.summary[(self.summary['zone'] == zone) &
                            (self.summary['phase'] == phase)]
        if rows.empty:
            return None
        return float(rows[column].iloc[0])

    def throughput(self, zone, phase=OVERALL):
        """Return a summary normalized throughput."""
        return self.value(zone, phase, 'normalized_throughput')

    def delay(self, zone, phase=OVERALL):
        """Return a summary mean access delay in seconds."""
        return self.value(zone, phase, 'mean_delay_s')


class UniformStream(object):
    """Uniform draws served from a buffered numpy Generator."""

    def __init__(self, rng, size=UNIFORM_BUFFER):
        """Uniform draws served from a buffered numpy Generator."""
        self._rng = rng
        self._size = size
        self._buffer = []
        self._position = 0

    def next(self):
        """Return the next uniform on [0, 1)."""
        if self._position >= len(self._buffer):
            self._buffer = self._rng.random(self._size).tolist()
            self._position = 0
        value = self._buffer[self._position]
        self._position += 1
        return value


class _Contender(object):
    """Mutable contention state of one station."""

    __slots__ = ('config', 'cw', 'failures', 'counter', 'active',
                 'head_since', 'successes', 'collisions', 'drops')

    def __init__(self, config, active):
        self.config = config
        self.cw = config.cw_min
        self.failures = 0
        self.counter = 0
        self.active = active
        self.head_since = 0
        self.successes = 0
        self.collisions = 0
        self.drops = 0

    def draw(self, stream):
        self.counter = int(stream.next() * self.cw)

    def succeed(self, now):
        self.successes += 1
        self.cw = self.config.cw_min
        self.failures = 0
        self.head_since = now

    def collide(self, now):
        """Back off after a collision; return True if the packet is dropped."""
        self.collisions += 1
        if self.config.role == MALICIOUS_AP:
            return False
        self.failures += 1
        if self.failures < self.config.retry_limit:
            self.cw = min(2 * self.cw, self.config.cw_max)
            return False
        self.drops += 1
        self.failures = 0
        self.cw = self.config.cw_min
        self.head_since = now
        return True


class _ZoneTrace(object):
    """Per-round records of one zone, kept as flat lists."""

    def __init__(self):
        self.round_start = []
        self.round_length = []
        self.success_start = []
        self.success_end = []
        # Head-of-line packets leave the queue by success or by a drop
        self.completion_end = []
        self.completion_delay = []
        self.idle_us = 0
        self.success_us = 0
        self.collision_us = 0
        self.end_us = 0


def _simulate_zone(zone_id, stations, scenario, rng):
    """Run the contention rounds of one zone until the end of the run."""
    stream = UniformStream(rng)
    slot = scenario.slot_time_us
    airtime = scenario.transmission_us
    end = scenario.duration_us
    attack_at = scenario.attack_start_us

    contenders = []
    dormant = []
    for config in stations:
        waits = config.role == MALICIOUS_AP and attack_at > 0
        contender = _Contender(config, active=not waits)
        contenders.append(contender)
        if waits:
            dormant.append(contender)
    for contender in contenders:
        if contender.active:
            contender.draw(stream)

    trace = _ZoneTrace()
    now = 0
    while now < end:
        if dormant and now >= attack_at:
            for contender in dormant:
                contender.active = True
                contender.head_since = now
                contender.draw(stream)
            dormant = []
        live = [c for c in contenders if c.active]
        if not live:
            trace.idle_us += end - now
            now = end
            break

        wait = min(c.counter for c in live)
        senders = [c for c in live if c.counter == wait]
        start = now
        now += wait * slot + airtime
        trace.idle_us += wait * slot
        trace.round_start.append(start)
        trace.round_length.append(now - start)
        for contender in live:
            contender.counter -= wait

        if len(senders) == 1:
            sender = senders[0]
            trace.success_us += airtime
            if sender.config.is_victim:
                trace.success_start.append(start)
                trace.success_end.append(now)
                trace.completion_end.append(now)
                trace.completion_delay.append(now - sender.head_since)
            sender.succeed(now)
        else:
            trace.collision_us += airtime
            for sender in senders:
                waited = now - sender.head_since
                if sender.collide(now) and sender.config.is_victim:
                    trace.completion_end.append(now)
                    trace.completion_delay.append(waited)
        for sender in senders:
            sender.draw(stream)

    trace.end_us = now
    logger.debug('Zone %s: %d rounds, %d victim successes', zone_id,
                 len(trace.round_start), len(trace.success_end))
    return trace, contenders


def _running_averages(trace, sample_us, payload_us):
    """Return throughput and delay running averages at `sample_us`."""
    ends = np.asarray(trace.success_end, dtype=np.int64)
    sent = np.searchsorted(ends, sample_us, side='right')
    throughput = sent * payload_us / sample_us.astype(float)
    ends = np.asarray(trace.completion_end, dtype=np.int64)
    delays = np.concatenate([[0], np.cumsum(trace.completion_delay)])
    done = np.searchsorted(ends, sample_us, side='right')
    delay = np.where(done > 0, delays[done] / np.maximum(done, 1), 0.0)
    return throughput, delay / MICROSECONDS


def _phase_summary(trace, payload_us, lower, upper):
    """Return (throughput, delay) of rounds starting in [lower, upper)."""
    starts = np.asarray(trace.round_start, dtype=np.int64)
    lengths = np.asarray(trace.round_length, dtype=np.int64)
    in_phase = (starts >= lower) & (starts < upper)
    span = int(lengths[in_phase].sum())
    if span == 0:
        return None
    success_start = np.asarray(trace.success_start, dtype=np.int64)
    completion_end = np.asarray(trace.completion_end, dtype=np.int64)
    delays = np.asarray(trace.completion_delay, dtype=np.int64)
    sent = ((success_start >= lower) & (success_start < upper)).sum()
    completed = (completion_end >= lower) & (completion_end < upper)
    delay = delays[completed].mean() / MICROSECONDS if completed.any() \
        else 0.0
    return float(sent * payload_us) / span, float(delay)


def _sample_times(scenario):
    count = int(math.floor(scenario.sim_duration / scenario.sample_interval +
                           1e-9))
    return np.array([int(round(k * scenario.sample_interval * MICROSECONDS))
                     for k in range(1, count + 1)], dtype=np.int64)


def run_mac_sim(scenario):
    """Simulate every zone of `scenario` and collect its metrics."""
    scenario.validate()
    payload = scenario.payload_us
    samples = _sample_times(scenario)
    attack_at = scenario.attack_start_us
    attacked = scenario.has_attacker and attack_at < scenario.duration_us
    phases = [(BENIGN_PHASE, 0, attack_at)]
    if attacked:
        phases.append((ATTACK_PHASE, attack_at, np.iinfo(np.int64).max))
    else:
        phases = [(BENIGN_PHASE, 0, np.iinfo(np.int64).max)]

    seeds = np.random.SeedSequence(scenario.seed).spawn(len(scenario.zones))
    series, summary, stations, airtime = [], [], [], []
    zone_throughput, zone_delay = [], []
    for (zone_id, roster), seed in zip(scenario.zones.items(), seeds):
        trace, contenders = _simulate_zone(zone_id, roster, scenario,
                                           np.random.default_rng(seed))
        throughput, delay = _running_averages(trace, samples, payload)
        zone_throughput.append(throughput)
        zone_delay.append(delay)
        series.append(pd.DataFrame({
            'time_s': samples / float(MICROSECONDS),
            'zone': zone_id,
            'normalized_throughput': throughput,
            'mean_delay_s': delay,
        }))

        for name, lower, upper in phases:
            values = _phase_summary(trace, payload, lower, upper)
            if values is not None:
                summary.append((zone_id, name) + values)
        overall = _phase_summary(trace, payload, 0, np.iinfo(np.int64).max)
        summary.append((zone_id, OVERALL) + (overall or (0.0, 0.0)))

        total = trace.end_us
        for index, contender in enumerate(contenders):
            stations.append({
                'zone': zone_id,
                'station': index,
                'role': contender.config.role,
                'successes': contender.successes,
                'collisions': contender.collisions,
                'drops': contender.drops,
                'normalized_throughput':
                    contender.successes * payload / float(total),
            })
        airtime.append({
            'zone': zone_id,
            'idle_us': trace.idle_us,
            'success_us': trace.success_us,
            'collision_us': trace.collision_us,
            'total_us': total,
        })

    series.append(pd.DataFrame({
        'time_s': samples / float(MICROSECONDS),
        'zone': GLOBAL_ZONE,
        'normalized_throughput': np.mean(zone_throughput, axis=0),
        'mean_delay_s': np.mean(zone_delay, axis=0),
    }))
    sample_phase = np.where(samples >= attack_at, ATTACK_PHASE, BENIGN_PHASE) \
        if attacked else np.full(len(samples), BENIGN_PHASE)
    for frame in series:
        frame['phase'] = sample_phase
    series = pd.concat(series, ignore_index=True)

    for phase in (BENIGN_PHASE, ATTACK_PHASE, OVERALL):
        rows = [row for row in summary if row[1] == phase]
        if len(rows) == len(scenario.zones):
            summary.append((GLOBAL_ZONE, phase,
                            np.mean([row[2] for row in rows]),
                            np.mean([row[3] for row in rows])))
    summary = pd.DataFrame(summary, columns=['zone', 'phase',
                                             'normalized_throughput',
                                             'mean_delay_s'])

    logger.info('MAC run over %d zone(s), %.1f s simulated',
                len(scenario.zones), scenario.sim_duration)
    return Metrics(scenario, series, summary,
                   pd.DataFrame(stations, columns=[
                       'zone', 'station', 'role', 'successes', 'collisions',
                       'drops', 'normalized_throughput']),
                   pd.DataFrame(airtime, columns=[
                       'zone', 'idle_us', 'success_us', 'collision_us',
                       'total_us']))


def benign_vs_attack_timeline(scenario):
    """Run `scenario` with the attacker waking at `attack_start`.

    The returned series and summaries carry a 'benign'/'attack' phase.
    """
    if not scenario.has_attacker:
        logger.warning('Zone %s has no malicious AP, the timeline is benign',
                       scenario.attack_zone)
    return run_mac_sim(scenario)


def _change(before, after):
    if before is None or after is None or before == 0:
        return 0.0
    return 100.0 * (after - before) / before


def zonal_vs_global(metrics):
    """Return percentage impact of the attack on the zone and overall.

    Drops are (benign - attack)/benign and delay rises are
    (attack - benign)/benign, in percent. A run without an attack phase
    yields zeros.
    """
    zone = metrics.scenario.attack_zone
    report = OrderedDict([('zonal_drop', 0.0), ('global_drop', 0.0),
                          ('zonal_delay_rise', 0.0),
                          ('global_delay_rise', 0.0)])
    if not metrics.scenario.has_attacker or \
            metrics.throughput(zone, ATTACK_PHASE) is None:
        return report
    for key, where in (('zonal', zone), ('global', GLOBAL_ZONE)):
        report[key + '_drop'] = -_change(
            metrics.throughput(where, BENIGN_PHASE),
            metrics.throughput(where, ATTACK_PHASE))
        report[key + '_delay_rise'] = _change(
            metrics.delay(where, BENIGN_PHASE),
            metrics.delay(where, ATTACK_PHASE))
    return report


def single_station_throughput(scenario, cw):
    """Return T_p/(T_p + T_o + slot (cw - 1)/2), one saturated station."""
    if cw < 1:
        raise ParameterError('cw must be >= 1')
    payload = float(scenario.payload_us)
    return payload / (payload + scenario.overhead_us +
                      scenario.slot_time_us * (cw - 1) / 2.0)


def throughput_bound(scenario):
    """Return T_p/(T_p + T_o), the share of airtime a payload can take."""
    return single_station_throughput(scenario, 1)


def scenario_from_config(config, seed=None):
    """Build a `MacScenario` from the 'mac' section of a configuration."""
    mac = dict(DEFAULT_CONFIG['mac'])
    mac.update(config.get('mac', {}))
    if mac['wifi_mode'] not in WIFI_MODES:
        raise ParameterError('Unknown wifi_mode {0!r}'.format(
            mac['wifi_mode']))
    if seed is None:
        seed = derive_seed(config.get('seed', 0), 'macsim')

    zones = OrderedDict()
    for zone_id in range(1, int(mac['zones']) + 1):
        roster = [StationConfig(VICTIM_BS, mac['cw_min'], mac['cw_max'],
                                mac['retry_limit'], zone_id)]
        roster += [StationConfig(VICTIM_UE, mac['cw_min'], mac['cw_max'],
                                 mac['retry_limit'], zone_id)
                   for _ in range(int(mac['victim_ues']))]
        if zone_id == mac['attack_zone']:
            if mac['wifi_mode'] == WIFI_BENIGN:
                roster.append(StationConfig(BENIGN_AP, mac['benign_cw_min'],
                                            mac['cw_max'], mac['retry_limit'],
                                            zone_id))
            elif mac['wifi_mode'] == WIFI_MALICIOUS:
                roster.append(StationConfig(MALICIOUS_AP, mac['malicious_cw'],
                                            mac['malicious_cw'],
                                            mac['retry_limit'], zone_id))
        zones[zone_id] = roster

    # Explicit rosters replace the generated station list of their zone
    for item in mac['rosters']:
        zone_id = item['zone']
        roster = []
        for station in item.get('stations', []):
            role = station['role']
            if role == MALICIOUS_AP:
                cw_min = station.get('cw_min', mac['malicious_cw'])
                cw_max = station.get('cw_max', cw_min)
            else:
                cw_min = station.get('cw_min', mac['benign_cw_min']
                                     if role == BENIGN_AP else mac['cw_min'])
                cw_max = station.get('cw_max', mac['cw_max'])
            roster.append(StationConfig(
                role, cw_min, cw_max,
                station.get('retry_limit', mac['retry_limit']), zone_id))
        zones[zone_id] = roster

    scenario = MacScenario(
        zones, slot_time_us=mac['slot_time_us'],
        overhead_us=mac['overhead_us'], payload_bytes=mac['payload_bytes'],
        phy_rate=mac['phy_rate'], sim_duration=mac['sim_duration'],
        attack_start=mac['attack_start'], attack_zone=mac['attack_zone'],
        sample_interval=mac['sample_interval'], seed=seed)
    return scenario.validate()
