"""Composite link gains: path loss, LOS probability, antenna patterns, shadowing.

Distances feed the loss curves in km. Gains are signed dB: received power
(dBm) = transmit power (dBm) + gain. Shadowing applies to non-line-of-sight
links only; line-of-sight links carry exactly zero shadowing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .scenario import MACRO, RELAY, NetworkLayout, Node, UserTerminal


@dataclass(frozen=True)
class PathLossCurve:
    """Log-distance loss: intercept + slope * log10(R_km)."""

    intercept_db: float
    slope_db_decade: float

    def loss_db(self, r_km):
        return self.intercept_db + self.slope_db_decade * np.log10(r_km)


@dataclass(frozen=True)
class PropagationModel:
    """Coefficient table for one scenario kind.

    The defaults follow the relay evaluation channel models of the LTE-A
    standardization framework. Noise figures, the horizontal antenna pattern
    and the minimum-distance floor are implementation constants (not pinned
    by any reference); all of them can be overridden from the run config.
    """

    scenario_kind: str                     # "urban" or "suburban"
    macro_los: PathLossCurve = PathLossCurve(103.4, 24.2)
    macro_nlos: PathLossCurve = PathLossCurve(131.1, 42.8)
    relay_los: PathLossCurve = PathLossCurve(103.8, 20.9)
    relay_nlos: PathLossCurve = PathLossCurve(145.4, 37.5)
    # LOS probability parameters, distances in km:
    #   macro urban:    min(a/R, 1)(1 - exp(-R/b)) + exp(-R/b)
    #   macro suburban: min(1, exp(-(R - a)/b))
    #   relay:          0.5 - min(0.5, A exp(-c_far/R)) + min(0.5, A exp(-R/c_near))
    macro_los_prob_urban: tuple[float, float] = (0.018, 0.063)
    macro_los_prob_suburban: tuple[float, float] = (0.01, 0.2)
    relay_los_prob_urban: tuple[float, float, float] = (5.0, 0.156, 0.03)
    relay_los_prob_suburban: tuple[float, float, float] = (3.0, 0.3, 0.095)
    min_distance_m: float = 10.0
    shadow_std_macro_db: float = 8.0
    shadow_std_relay_db: float = 10.0
    penetration_loss_db: float = 20.0
    thermal_noise_dbm_hz: float = -174.0
    ue_noise_figure_db: float = 9.0
    pattern_theta3db_deg: float = 65.0
    pattern_backlobe_db: float = 20.0

    @classmethod
    def for_scenario(cls, scenario_kind: str, **overrides) -> "PropagationModel":
        return cls(scenario_kind=scenario_kind, **overrides)

    def shadow_std_db(self, link_kind: str) -> float:
        return self.shadow_std_relay_db if link_kind == RELAY else self.shadow_std_macro_db


def path_loss_db(model: PropagationModel, link_kind: str, distance_m, is_los):
    """Distance-dependent loss for one link class.

    Distances below the model floor are clamped to the floor. The NLOS branch
    is floored at the LOS value so that an obstructed link never beats a
    clear one at the same distance (the raw macro curves would cross below
    ~33 m).
    """
    r_km = np.maximum(np.asarray(distance_m, dtype=float),
                      model.min_distance_m) / 1000.0
    if link_kind == RELAY:
        los_curve, nlos_curve = model.relay_los, model.relay_nlos
    else:
        los_curve, nlos_curve = model.macro_los, model.macro_nlos
    los = los_curve.loss_db(r_km)
    nlos = np.maximum(nlos_curve.loss_db(r_km), los)
    out = np.where(np.asarray(is_los, dtype=bool), los, nlos)
    if np.ndim(distance_m) == 0 and np.ndim(is_los) == 0:
        return float(out)
    return out


def los_probability(model: PropagationModel, link_kind: str, distance_m):
    """LOS probability at a given distance; the state is drawn once per drop."""
    r = np.maximum(np.asarray(distance_m, dtype=float), 1e-6) / 1000.0
    if link_kind == RELAY:
        if model.scenario_kind == "urban":
            amp, c_far, c_near = model.relay_los_prob_urban
        else:
            amp, c_far, c_near = model.relay_los_prob_suburban
        p = (0.5 - np.minimum(0.5, amp * np.exp(-c_far / r))
             + np.minimum(0.5, amp * np.exp(-r / c_near)))
    else:
        if model.scenario_kind == "urban":
            a, b = model.macro_los_prob_urban
            p = np.minimum(a / r, 1.0) * (1.0 - np.exp(-r / b)) + np.exp(-r / b)
        else:
            a, b = model.macro_los_prob_suburban
            p = np.minimum(1.0, np.exp(-(r - a) / b))
    p = np.clip(p, 0.0, 1.0)
    if np.ndim(distance_m) == 0:
        return float(p)
    return p


def macro_pattern_db(azimuth_off_deg, theta3db_deg=65.0, backlobe_db=20.0):
    """Horizontal sector pattern: -min(12 (theta/theta3db)^2, A_m) dB."""
    th = np.asarray(azimuth_off_deg, dtype=float)
    return -np.minimum(12.0 * (th / theta3db_deg) ** 2, backlobe_db)


def antenna_gain_dbi(node: Node, azimuth_off_deg, model: PropagationModel | None = None):
    """Antenna gain toward a boresight-relative azimuth in (-180, 180].

    Macro sectors use the parabolic pattern with a backlobe floor; relays are
    omnidirectional at their elevation gain.
    """
    theta3db = model.pattern_theta3db_deg if model else 65.0
    backlobe = model.pattern_backlobe_db if model else 20.0
    if node.is_relay:
        out = np.broadcast_to(node.antenna_gain_dbi,
                              np.shape(azimuth_off_deg)).astype(float)
        return float(node.antenna_gain_dbi) if np.ndim(azimuth_off_deg) == 0 else out
    g = node.antenna_gain_dbi + macro_pattern_db(azimuth_off_deg, theta3db, backlobe)
    if np.ndim(azimuth_off_deg) == 0:
        return float(g)
    return g


@dataclass(frozen=True)
class LinkGain:
    """Composite gain of one node -> terminal link, signed dB."""

    node_id: int
    terminal_id: int
    gain_db: float


def link_gain(node: Node, terminal: UserTerminal, layout: NetworkLayout,
              model: PropagationModel, is_los: bool, shadow_db: float) -> LinkGain:
    """Composite gain with the LOS state and shadowing draw already realized.

    ``shadow_db`` is the raw normal draw; it contributes only on NLOS links.
    """
    from .scenario import wrap_distance

    dist, az = wrap_distance(terminal.position, node, layout)
    kind = RELAY if node.is_relay else MACRO
    pl = path_loss_db(model, kind, dist, is_los)
    ant = antenna_gain_dbi(node, az, model)
    shade = 0.0 if is_los else float(shadow_db)
    gain = -pl + ant - terminal.penetration_loss_db - shade
    return LinkGain(node.id, terminal.id, float(gain))


@dataclass
class LinkGainTable:
    """Per-drop channel realization for all node -> point pairs.

    Arrays are (n_nodes, n_points). ``shadow_db`` already carries the NLOS
    mask (zero on LOS links).
    """

    gain_db: np.ndarray
    is_los: np.ndarray
    shadow_db: np.ndarray
    distance_m: np.ndarray
    azimuth_off_deg: np.ndarray


def realize_link_gains(layout: NetworkLayout, points_xy, model: PropagationModel,
                       streams, penetration_loss_db: float | None = None) -> LinkGainTable:
    """Realize LOS states, shadowing and composite gains for one drop.

    ``streams`` are the four channel SeedSequences from
    :func:`relaysim.scenario.drop_rng_streams` (macro LOS, macro shadow,
    relay LOS, relay shadow), so macro-link draws do not depend on how many
    relays are deployed.
    """
    pen = model.penetration_loss_db if penetration_loss_db is None else penetration_loss_db
    pts = np.atleast_2d(np.asarray(points_xy, dtype=float))
    m = pts.shape[0]
    dist, azoff = layout.nearest_image_geometry(pts)

    is_rn = layout.node_is_rn
    n_macro = int(np.count_nonzero(~is_rn))
    n_relay = int(np.count_nonzero(is_rn))

    rng_mlos = np.random.Generator(np.random.PCG64(streams[0]))
    rng_msh = np.random.Generator(np.random.PCG64(streams[1]))
    rng_rlos = np.random.Generator(np.random.PCG64(streams[2]))
    rng_rsh = np.random.Generator(np.random.PCG64(streams[3]))

    is_los = np.zeros((layout.n_nodes, m), dtype=bool)
    shadow = np.zeros((layout.n_nodes, m))
    pl = np.empty((layout.n_nodes, m))
    ant = np.empty((layout.n_nodes, m))

    macro_rows = np.flatnonzero(~is_rn)
    relay_rows = np.flatnonzero(is_rn)

    if n_macro:
        p = los_probability(model, MACRO, dist[macro_rows])
        is_los[macro_rows] = rng_mlos.random((n_macro, m)) < p
        z = rng_msh.standard_normal((n_macro, m)) * model.shadow_std_macro_db
        shadow[macro_rows] = np.where(is_los[macro_rows], 0.0, z)
        pl[macro_rows] = path_loss_db(model, MACRO, dist[macro_rows],
                                      is_los[macro_rows])
        peak = layout.node_ant_dbi[macro_rows][:, None]
        ant[macro_rows] = peak + macro_pattern_db(azoff[macro_rows],
                                                  model.pattern_theta3db_deg,
                                                  model.pattern_backlobe_db)
    if n_relay:
        p = los_probability(model, RELAY, dist[relay_rows])
        is_los[relay_rows] = rng_rlos.random((n_relay, m)) < p
        z = rng_rsh.standard_normal((n_relay, m)) * model.shadow_std_relay_db
        shadow[relay_rows] = np.where(is_los[relay_rows], 0.0, z)
        pl[relay_rows] = path_loss_db(model, RELAY, dist[relay_rows],
                                      is_los[relay_rows])
        ant[relay_rows] = layout.node_ant_dbi[relay_rows][:, None]

    gain = -pl + ant - pen - shadow
    return LinkGainTable(gain, is_los, shadow, dist, azoff)


def dl_noise_dbm(model: PropagationModel, bandwidth_hz: float = 10e6) -> float:
    """Terminal-side noise floor over the full downlink bandwidth."""
    return (model.thermal_noise_dbm_hz + 10.0 * math.log10(bandwidth_hz)
            + model.ue_noise_figure_db)


def ul_noise_per_prb_dbm(model: PropagationModel, rx_noise_figure_db,
                         prb_bandwidth_hz: float = 180e3):
    """Receiver-side noise in one resource block."""
    return (model.thermal_noise_dbm_hz + 10.0 * np.log10(prb_bandwidth_hz)
            + np.asarray(rx_noise_figure_db, dtype=float))


def db_to_linear(db):
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0)


def linear_to_db(lin):
    return 10.0 * np.log10(lin)
