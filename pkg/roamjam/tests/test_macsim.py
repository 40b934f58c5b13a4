# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Copyright (c) 2026 The roamjam developers.
#
# Licensed under the terms of the MIT License
# (see LICENSE.txt for details)
# -----------------------------------------------------------------------------
"""Test the coexistence MAC simulator."""

# Standard library imports
from collections import OrderedDict
import copy

# Third party imports
import numpy as np
import pandas.testing as pdt
import pytest

# Local imports
from roamjam.config import (BENIGN_AP, DEFAULT_CONFIG, MALICIOUS_AP,
                            VICTIM_BS, VICTIM_UE, WIFI_BENIGN, WIFI_OFF)
from roamjam.errors import ParameterError
from roamjam.macsim import (ATTACK_PHASE, BENIGN_PHASE, GLOBAL_ZONE,
                            OVERALL, MacScenario, StationConfig,
                            UniformStream, benign_vs_attack_timeline,
                            run_mac_sim, scenario_from_config,
                            single_station_throughput, throughput_bound,
                            zonal_vs_global)


def _scenario(roster, **kwargs):
    """Return a one-zone scenario holding `roster` as (role, cw) pairs."""
    stations = [StationConfig(role, cw, cw if role == MALICIOUS_AP else 1024,
                              4, 1)
                for role, cw in roster]
    defaults = dict(sim_duration=10.0, attack_start=0.0, seed=3)
    defaults.update(kwargs)
    return MacScenario(OrderedDict([(1, stations)]), **defaults)


def _config(**mac):
    config = copy.deepcopy(DEFAULT_CONFIG)
    config['mac'].update(mac)
    return config


@pytest.fixture(scope='module')
def default_run():
    """The default three-zone attack timeline."""
    return benign_vs_attack_timeline(scenario_from_config(_config()))


def test_transmission_constants():
    """1000 bytes at 155 Mbps take 52 us, 146 us with overhead."""
    scenario = _scenario([(VICTIM_BS, 16)])
    assert scenario.payload_us == 52
    assert scenario.transmission_us == 146
    assert throughput_bound(scenario) == pytest.approx(52.0 / 146.0)


def test_single_station_throughput():
    """A lone station never collides and matches the closed form."""
    scenario = MacScenario(OrderedDict([(1, [
        StationConfig(VICTIM_BS, 16, 16, 4, 1)])]), sim_duration=10.0,
        attack_start=0.0, seed=1)
    metrics = run_mac_sim(scenario)
    expected = single_station_throughput(scenario, 16)
    assert expected == pytest.approx(52.0 / 213.5)
    assert metrics.throughput(1) == pytest.approx(expected, rel=0.02)
    assert metrics.stations['collisions'].sum() == 0
    assert metrics.airtime['collision_us'].sum() == 0


def test_two_stations_share_fairly():
    """Two identical stations get the same throughput."""
    scenario = _scenario([(VICTIM_BS, 16), (VICTIM_UE, 16)],
                         sim_duration=20.0)
    stations = run_mac_sim(scenario).stations
    first, second = stations['normalized_throughput']
    assert first == pytest.approx(second, rel=0.05)


def test_malicious_window_starves_victim():
    """A fixed window of 2 leaves the victim under a quarter of its share."""
    baseline = run_mac_sim(_scenario([(VICTIM_BS, 16)])).throughput(1)
    attacked = run_mac_sim(_scenario([(VICTIM_BS, 16),
                                      (MALICIOUS_AP, 2)])).throughput(1)
    assert attacked < 0.25 * baseline


def test_smaller_window_hurts_more():
    """Victim throughput grows with the attacker's window."""
    scenario = _scenario([(VICTIM_BS, 16), (VICTIM_UE, 16),
                          (MALICIOUS_AP, 2)])
    values = [run_mac_sim(scenario.with_malicious_cw(cw)).throughput(1)
              for cw in (1, 2, 4, 8)]
    assert values[0] <= values[1] < values[2] < values[3]


def test_airtime_conservation():
    """Idle, success and collision time add up to the simulated time."""
    scenario = _scenario([(VICTIM_BS, 16), (VICTIM_UE, 16),
                          (MALICIOUS_AP, 4)])
    airtime = run_mac_sim(scenario).airtime
    total = airtime['idle_us'] + airtime['success_us'] + \
        airtime['collision_us']
    assert (total == airtime['total_us']).all()
    assert (airtime['total_us'] >= scenario.duration_us).all()


def test_series_shape(default_run):
    """Every zone and the global average are sampled on the same grid."""
    series = default_run.series
    assert set(series['zone']) == set([1, 2, 3, GLOBAL_ZONE])
    for zone in (1, 2, 3, GLOBAL_ZONE):
        rows = default_run.zone_series(zone)
        assert len(rows) == 80
        assert np.all(np.diff(rows['time_s']) > 0)
        assert rows['time_s'].iloc[-1] == pytest.approx(40.0)
    bound = throughput_bound(default_run.scenario)
    assert series['normalized_throughput'].between(0, bound).all()
    assert (series['mean_delay_s'] >= 0).all()


def test_series_phases(default_run):
    """Samples at or after the attack start carry the attack phase."""
    series = default_run.zone_series(1)
    assert (series[series['time_s'] < 20.0]['phase'] == BENIGN_PHASE).all()
    assert (series[series['time_s'] >= 20.0]['phase'] == ATTACK_PHASE).all()


def test_global_is_zone_mean(default_run):
    """Global rows are the mean of the zone rows."""
    for phase in (BENIGN_PHASE, ATTACK_PHASE, OVERALL):
        zones = [default_run.throughput(z, phase) for z in (1, 2, 3)]
        assert default_run.throughput(GLOBAL_ZONE, phase) == \
            pytest.approx(np.mean(zones))


def test_attack_is_zonal(default_run):
    """The attacked zone suffers much more than the network average."""
    impact = zonal_vs_global(default_run)
    assert impact['zonal_drop'] > impact['global_drop'] > 0
    assert impact['zonal_drop'] >= 2 * impact['global_drop']
    assert impact['zonal_drop'] >= 15.0
    assert impact['zonal_delay_rise'] >= 50.0
    assert impact['zonal_delay_rise'] > impact['global_delay_rise']


def test_running_delay_climbs_after_attack(default_run):
    """The attacked zone's running delay keeps climbing once attacked."""
    series = default_run.zone_series(1)
    first = int(np.argmax(series['time_s'].values >= 20.0))
    delay = series['mean_delay_s'].values[first - 1:]
    assert np.mean(np.diff(delay) >= 0) >= 0.8
    assert delay[-1] > delay[0]


def test_dropped_packets_count_as_delay():
    """A victim packet dropped after its retries still reports its wait."""
    scenario = _scenario([(VICTIM_BS, 16), (MALICIOUS_AP, 2)],
                         sim_duration=2.0)
    metrics = run_mac_sim(scenario)
    victim = metrics.stations[metrics.stations['role'] == VICTIM_BS]
    assert int(victim['drops'].iloc[0]) > 0
    assert metrics.delay(1, ATTACK_PHASE) > 0
    assert (metrics.zone_series(1)['mean_delay_s'].iloc[1:] > 0).all()


def test_untouched_zones_keep_throughput(default_run):
    """Zones without an attacker see no phase change beyond noise."""
    for zone in (2, 3):
        benign = default_run.throughput(zone, BENIGN_PHASE)
        attack = default_run.throughput(zone, ATTACK_PHASE)
        assert attack == pytest.approx(benign, rel=0.05)


def test_runs_are_reproducible():
    """Same seed, same frames."""
    scenario = _scenario([(VICTIM_BS, 16), (MALICIOUS_AP, 2)],
                         sim_duration=2.0, sample_interval=0.25)
    first, second = run_mac_sim(scenario), run_mac_sim(scenario)
    pdt.assert_frame_equal(first.series, second.series)
    pdt.assert_frame_equal(first.summary, second.summary)
    pdt.assert_frame_equal(first.stations, second.stations)


def test_attack_at_end_matches_wifi_off():
    """An attacker that never wakes leaves the timeline untouched."""
    config = _config(sim_duration=5.0, attack_start=5.0)
    dormant = run_mac_sim(scenario_from_config(config))
    config['mac']['wifi_mode'] = WIFI_OFF
    quiet = run_mac_sim(scenario_from_config(config))
    pdt.assert_frame_equal(dormant.series, quiet.series)
    pdt.assert_frame_equal(dormant.summary, quiet.summary)
    assert list(zonal_vs_global(dormant).values()) == [0.0] * 4


def test_wifi_off_has_no_impact():
    """Without Wi-Fi there is no attack phase and no impact."""
    metrics = benign_vs_attack_timeline(
        scenario_from_config(_config(wifi_mode=WIFI_OFF, sim_duration=4.0,
                                     attack_start=2.0)))
    assert metrics.throughput(1, ATTACK_PHASE) is None
    assert set(metrics.series['phase']) == set([BENIGN_PHASE])
    assert list(zonal_vs_global(metrics).values()) == [0.0] * 4


def test_attack_from_start_is_always_attacking():
    """attack_start = 0 gives one attack phase over the whole run."""
    victims = [(VICTIM_BS, 16), (VICTIM_UE, 16)]
    attacked = benign_vs_attack_timeline(
        _scenario(victims + [(MALICIOUS_AP, 2)], sim_duration=4.0))
    summary = attacked.summary
    assert BENIGN_PHASE not in set(summary['phase'])
    assert set(attacked.series['phase']) == set([ATTACK_PHASE])

    # An AP pinned to the same window contends identically from t = 0
    pinned = _scenario(victims, sim_duration=4.0)
    pinned.zones[1].append(StationConfig(BENIGN_AP, 2, 2, 4, 1))
    pinned = run_mac_sim(pinned)
    assert attacked.throughput(1, ATTACK_PHASE) == pytest.approx(
        pinned.throughput(1, BENIGN_PHASE))
    columns = ['time_s', 'normalized_throughput', 'mean_delay_s']
    pdt.assert_frame_equal(attacked.series[columns],
                           pinned.series[columns])


def test_scenario_from_config_rosters():
    """Rosters replace the generated stations of their zone."""
    config = _config(wifi_mode=WIFI_BENIGN, rosters=[
        {'zone': 2, 'stations': [{'role': VICTIM_BS},
                                 {'role': MALICIOUS_AP, 'cw_min': 4}]}])
    scenario = scenario_from_config(config, seed=9)
    assert scenario.seed == 9
    assert len(scenario.zones[1]) == 6
    assert [s.role for s in scenario.zones[2]] == [VICTIM_BS, MALICIOUS_AP]
    malicious = scenario.zones[2][1]
    assert (malicious.cw_min, malicious.cw_max) == (4, 4)
    assert len(scenario.zones[3]) == 5
    assert not scenario.has_attacker


def test_scenario_validation():
    """Malformed scenarios and stations are rejected."""
    with pytest.raises(ParameterError):
        _scenario([(VICTIM_BS, 16)], attack_start=11.0).validate()
    with pytest.raises(ParameterError):
        _scenario([(VICTIM_BS, 16)], attack_zone=4).validate()
    with pytest.raises(ParameterError):
        MacScenario(OrderedDict()).validate()
    with pytest.raises(ParameterError):
        StationConfig(VICTIM_BS, 32, 16, 4, 1).validate()
    with pytest.raises(ParameterError):
        StationConfig('jammer', 1, 1, 4, 1).validate()
    with pytest.raises(ParameterError):
        MacScenario(OrderedDict([(1, [
            StationConfig(MALICIOUS_AP, 2, 8, 4, 1)])])).validate()
    with pytest.raises(ParameterError):
        _scenario([(VICTIM_BS, 16)]).replace(channels=3)
    with pytest.raises(ParameterError):
        single_station_throughput(_scenario([(VICTIM_BS, 16)]), 0)


def test_uniform_stream_refills():
    """The buffer refills transparently and stays in [0, 1)."""
    stream = UniformStream(np.random.default_rng(0), size=3)
    draws = [stream.next() for _ in range(10)]
    assert all(0.0 <= d < 1.0 for d in draws)
    assert len(set(draws)) == 10
