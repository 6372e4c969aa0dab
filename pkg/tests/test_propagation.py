"""Path-loss curves, LOS probabilities, antenna pattern, composite gains."""

import math

import numpy as np
import pytest

from relaysim.propagation import (LinkGainTable, PropagationModel,
                                  antenna_gain_dbi, dl_noise_dbm, link_gain,
                                  los_probability, path_loss_db,
                                  realize_link_gains, ul_noise_per_prb_dbm)
from relaysim.scenario import (MACRO, RELAY, NetworkLayout, Node,
                               ScenarioConfig, UserTerminal, build_layout,
                               drop_rng_streams)

URBAN = PropagationModel.for_scenario("urban")
SUBURBAN = PropagationModel.for_scenario("suburban")


# ---------------------------------------------------------------- path loss

def test_macro_nlos_at_half_km():
    expected = 131.1 + 42.8 * math.log10(0.5)
    got = path_loss_db(URBAN, MACRO, 500.0, is_los=False)
    assert got == pytest.approx(expected, abs=1e-12)
    assert round(got, 2) == 118.22


def test_relay_nlos_at_100m():
    assert path_loss_db(URBAN, RELAY, 100.0, is_los=False) == pytest.approx(107.9)


def test_intercepts_at_one_km():
    assert path_loss_db(URBAN, MACRO, 1000.0, False) == pytest.approx(131.1)
    assert path_loss_db(URBAN, MACRO, 1000.0, True) == pytest.approx(103.4)
    assert path_loss_db(URBAN, RELAY, 1000.0, False) == pytest.approx(145.4)
    assert path_loss_db(URBAN, RELAY, 1000.0, True) == pytest.approx(103.8)


def test_distance_floor_clamps_not_rejects():
    assert path_loss_db(URBAN, MACRO, 3.0, True) == path_loss_db(URBAN, MACRO, 10.0, True)


def test_nlos_never_below_los():
    d = np.linspace(10.0, 5000.0, 4000)
    for model in (URBAN, SUBURBAN):
        for kind in (MACRO, RELAY):
            los = path_loss_db(model, kind, d, np.zeros_like(d, dtype=bool) | True)
            nlos = path_loss_db(model, kind, d, np.zeros_like(d, dtype=bool))
            assert np.all(nlos >= los)


def test_macro_nlos_clamp_active_at_short_range():
    # raw macro curves cross near 33 m; below that NLOS rides the LOS curve
    assert path_loss_db(URBAN, MACRO, 15.0, False) == path_loss_db(URBAN, MACRO, 15.0, True)
    assert path_loss_db(URBAN, MACRO, 100.0, False) > path_loss_db(URBAN, MACRO, 100.0, True)


def test_path_loss_monotone_in_distance():
    d = np.linspace(10.0, 5000.0, 2000)
    for model in (URBAN, SUBURBAN):
        for kind in (MACRO, RELAY):
            for los in (True, False):
                pl = path_loss_db(model, kind, d, np.full(d.shape, los))
                assert np.all(np.diff(pl) >= 0)


def test_relay_loss_exceeds_macro_loss_beyond_20m():
    d = np.linspace(20.0, 5000.0, 2000)
    nlos = np.zeros(d.shape, dtype=bool)
    assert np.all(path_loss_db(URBAN, RELAY, d, nlos)
                  > path_loss_db(URBAN, MACRO, d, nlos))


# ------------------------------------------------------------ LOS probability

def test_macro_urban_los_probability_value():
    r = 0.063
    expected = (min(0.018 / r, 1.0) * (1.0 - math.exp(-1.0)) + math.exp(-1.0))
    got = los_probability(URBAN, MACRO, 63.0)
    assert got == pytest.approx(expected, abs=1e-12)
    assert got == pytest.approx(0.55, abs=0.01)


def test_los_probability_limits_to_one_at_zero_distance():
    for model in (URBAN, SUBURBAN):
        for kind in (MACRO, RELAY):
            assert los_probability(model, kind, 1e-6) == pytest.approx(1.0, abs=1e-3)


def test_los_probability_non_increasing():
    d = np.linspace(10.0, 5000.0, 5000)
    for model in (URBAN, SUBURBAN):
        for kind in (MACRO, RELAY):
            p = los_probability(model, kind, d)
            assert np.all(p >= 0.0) and np.all(p <= 1.0)
            assert np.all(np.diff(p) <= 1e-12)


# ----------------------------------------------------------------- antennas

def test_macro_pattern_values():
    node = Node(0, MACRO, (0.0, 0.0), 0.0, 46.0, 14.0, 5.0)
    assert antenna_gain_dbi(node, 0.0) == pytest.approx(14.0)
    assert antenna_gain_dbi(node, 65.0) == pytest.approx(2.0)
    assert antenna_gain_dbi(node, -65.0) == pytest.approx(2.0)
    assert antenna_gain_dbi(node, 180.0) == pytest.approx(-6.0)


def test_relay_is_omnidirectional():
    rn = Node(1, RELAY, (0.0, 0.0), 0.0, 30.0, 5.0, 5.0)
    for az in (-180.0, -90.0, 0.0, 45.0, 180.0):
        assert antenna_gain_dbi(rn, az) == 5.0


# ------------------------------------------------------------ composite gain

def _single_macro_layout():
    nodes = [Node(0, MACRO, (0.0, 0.0), 0.0, 46.0, 14.0, 5.0)]
    return NetworkLayout(nodes, [(0.0, 0.0)], [(0.0, 0.0)], 500.0)


def test_link_gain_composite_terms():
    layout = _single_macro_layout()
    ue = UserTerminal(0, (1000.0, 0.0), 0, penetration_loss_db=20.0)
    lg = link_gain(layout.nodes[0], ue, layout, URBAN, is_los=False,
                   shadow_db=0.0)
    assert lg.gain_db == pytest.approx(-131.1 + 14.0 - 20.0, abs=1e-12)


def test_link_gain_los_ignores_shadow_draw():
    layout = _single_macro_layout()
    ue = UserTerminal(0, (1000.0, 0.0), 0)
    a = link_gain(layout.nodes[0], ue, layout, URBAN, True, 0.0)
    b = link_gain(layout.nodes[0], ue, layout, URBAN, True, 12.5)
    assert a.gain_db == b.gain_db


def test_realized_table_matches_componentwise_recomputation():
    cfg = ScenarioConfig.for_scenario("urban", rns_per_sector=4, n_drops=1,
                                      rng_seed=21)
    layout = build_layout(cfg)
    rng = np.random.default_rng(2)
    pts = rng.uniform(-400, 400, size=(40, 2))
    streams = drop_rng_streams(cfg.rng_seed, 0)[1:5]
    table = realize_link_gains(layout, pts, URBAN, streams)
    dist, az = layout.nearest_image_geometry(pts)
    for n in (0, 5, 60, 200):
        node = layout.nodes[n]
        kind = RELAY if node.is_relay else MACRO
        for t in (0, 7, 39):
            pl = path_loss_db(URBAN, kind, dist[n, t], table.is_los[n, t])
            ant = antenna_gain_dbi(node, az[n, t], URBAN)
            expect = -pl + ant - 20.0 - table.shadow_db[n, t]
            assert table.gain_db[n, t] == pytest.approx(expect, abs=1e-12)


def test_shadowing_zero_on_los_links():
    cfg = ScenarioConfig.for_scenario("urban", rns_per_sector=4, rng_seed=3)
    layout = build_layout(cfg)
    pts = np.random.default_rng(0).uniform(-600, 600, size=(100, 2))
    table = realize_link_gains(layout, pts, URBAN,
                               drop_rng_streams(cfg.rng_seed, 0)[1:5])
    assert np.all(table.shadow_db[table.is_los] == 0.0)
    assert np.any(table.shadow_db[~table.is_los] != 0.0)


def test_shadowing_sample_std_matches_model():
    """Monte Carlo moment check on the NLOS macro shadowing draws."""
    cfg = ScenarioConfig.for_scenario("urban", rng_seed=17)
    layout = build_layout(cfg)
    rng = np.random.default_rng(1)
    pts = rng.uniform(-1000, 1000, size=(3000, 2))
    table = realize_link_gains(layout, pts, URBAN,
                               drop_rng_streams(cfg.rng_seed, 0)[1:5])
    nlos_draws = table.shadow_db[~table.is_los]
    assert nlos_draws.size > 100_000
    assert np.std(nlos_draws) == pytest.approx(8.0, abs=0.1)


def test_realization_replay_is_deterministic():
    cfg = ScenarioConfig.for_scenario("suburban", rns_per_sector=4, rng_seed=8)
    layout = build_layout(cfg)
    pts = np.random.default_rng(5).uniform(-900, 900, size=(64, 2))
    t1 = realize_link_gains(layout, pts, SUBURBAN,
                            drop_rng_streams(cfg.rng_seed, 2)[1:5])
    t2 = realize_link_gains(layout, pts, SUBURBAN,
                            drop_rng_streams(cfg.rng_seed, 2)[1:5])
    assert np.array_equal(t1.gain_db, t2.gain_db)
    assert np.array_equal(t1.is_los, t2.is_los)


def test_macro_draws_independent_of_relay_count():
    """Common random numbers across deployments: macro-link channel draws do
    not change when relays are added."""
    pts = np.random.default_rng(6).uniform(-700, 700, size=(30, 2))
    tables = {}
    for rns in (0, 4, 10):
        cfg = ScenarioConfig.for_scenario("urban", rns_per_sector=rns,
                                          rng_seed=42)
        layout = build_layout(cfg)
        tables[rns] = realize_link_gains(layout, pts, URBAN,
                                         drop_rng_streams(42, 0)[1:5])
    for rns in (4, 10):
        assert np.array_equal(tables[rns].gain_db[:57], tables[0].gain_db[:57])
        assert np.array_equal(tables[rns].is_los[:57], tables[0].is_los[:57])


# -------------------------------------------------------------------- noise

def test_noise_floors():
    assert dl_noise_dbm(URBAN) == pytest.approx(-174 + 70 + 9)
    # per-PRB uplink noise with NF 5: -174 + 10 log10(180e3) + 5
    expected = -174 + 10 * math.log10(180e3) + 5
    assert ul_noise_per_prb_dbm(URBAN, 5.0) == pytest.approx(expected)
    assert expected == pytest.approx(-116.447, abs=1e-3)
