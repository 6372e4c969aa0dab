"""Open-loop uplink power control, PRB allocation, per-PRB interference, SINR.

The transmit power rule is min(P_max, P0 + 10 log10(M) + alpha * L) with L
the downlink path-loss estimate of the serving link (the negated composite
link gain, antennas and penetration included). L does not see the macro
power reduction, so the whole uplink outcome depends on the operating point
only through the association it produces.

Within a cell the round-robin scheduler splits the 50-PRB grid evenly; PRB p
of every cell is reused by every other cell, and the co-PRB occupants are the
uplink interferers. SC-FDMA keeps terminals of the same cell orthogonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .downlink import ShannonMapping, shannon_spectral_eff
from .errors import ConfigError
from .propagation import db_to_linear

TOTAL_PRBS = 50          # 10 MHz grid
PRB_BANDWIDTH_HZ = 180e3

LEGAL_ALPHAS = (0.0, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
P0_MIN_DBM = -126.0
P0_MAX_DBM = 23.0
P_MAX_CAP_DBM = 23.0


@dataclass(frozen=True)
class PowerControlConfig:
    """One (P0, alpha, P_max) triple, applied per serving-node class."""

    p0_dbm: float
    alpha: float
    p_max_dbm: float = 23.0

    def __post_init__(self):
        if not P0_MIN_DBM <= self.p0_dbm <= P0_MAX_DBM:
            raise ConfigError(
                f"p0_dbm = {self.p0_dbm}; legal range is [-126, 23] in 1 dB steps"
            )
        if float(self.p0_dbm) != int(self.p0_dbm):
            raise ConfigError(
                f"p0_dbm = {self.p0_dbm}; legal range is [-126, 23] in 1 dB steps"
            )
        if not any(math.isclose(self.alpha, a) for a in LEGAL_ALPHAS):
            raise ConfigError(
                f"alpha = {self.alpha}; legal values are 0 or 0.4..1.0 in 0.1 steps"
            )
        if self.p_max_dbm > P_MAX_CAP_DBM:
            raise ConfigError(
                f"p_max_dbm = {self.p_max_dbm}; must be <= 23"
            )


def ue_tx_power_dbm(pc: PowerControlConfig, m_prbs: int, l_db: float) -> float:
    """Open-loop transmit power for one terminal, dBm."""
    if m_prbs < 1:
        raise ValueError(f"m_prbs = {m_prbs}; at least one PRB is required")
    return min(pc.p_max_dbm, pc.p0_dbm + 10.0 * math.log10(m_prbs)
               + pc.alpha * l_db)


def allocate_prbs(n_terminals: int, total_prbs: int = TOTAL_PRBS) -> np.ndarray:
    """Equal PRB split in drop order; remainder PRBs go one each to the head.

    Allocations differ by at most one PRB. With more terminals than PRBs the
    first ``total_prbs`` terminals get one PRB each and the rest get none.
    """
    if n_terminals <= 0:
        return np.zeros(0, dtype=int)
    base, rem = divmod(total_prbs, n_terminals)
    m = np.full(n_terminals, base, dtype=int)
    m[:rem] += 1
    return m


@dataclass
class UlResult:
    """Per-terminal uplink outcome for one drop."""

    tx_power_dbm: np.ndarray
    m_prbs: np.ndarray
    sinr_db: np.ndarray
    throughput_bps: np.ndarray
    outage: np.ndarray


@dataclass
class UlContext:
    """Everything about a drop's uplink that does not depend on power control.

    Built once per (drop, association); evaluating a power-control candidate
    on it is a handful of vectorized operations, which is what makes the
    parameter search affordable.
    """

    n_terminals: int
    active_cells: np.ndarray       # (n_c,) node indices with >= 1 terminal
    cell_of_terminal: np.ndarray   # (n_t,) index into active_cells
    rn_served: np.ndarray          # (n_t,) bool
    m_prbs: np.ndarray             # (n_t,)
    l_db: np.ndarray               # (n_t,) serving-link loss estimate
    w_lin: np.ndarray              # (n_c, n_t) linear gain terminal -> receiver
    occupancy: np.ndarray          # (n_t, total_prbs) 0/1
    occ_flat: np.ndarray           # (n_c * total_prbs,) occupant terminal index
    w_occ_flat: np.ndarray         # w_lin at (cell, occupant) pairs, flattened
    noise_lin: np.ndarray          # (n_c,) per-PRB receiver noise, linear mW
    total_prbs: int
    prb_bandwidth_hz: float


def build_ul_context(gain_db, serving, node_nf_db, thermal_noise_dbm_hz=-174.0,
                     total_prbs: int = TOTAL_PRBS,
                     prb_bandwidth_hz: float = PRB_BANDWIDTH_HZ,
                     node_is_rn=None) -> UlContext:
    gain_db = np.asarray(gain_db, dtype=float)
    serving = np.asarray(serving, dtype=int)
    n_t = serving.size

    active_cells = np.unique(serving)
    cell_index = {int(c): i for i, c in enumerate(active_cells)}
    cell_of_terminal = np.array([cell_index[int(c)] for c in serving], dtype=int)

    m = np.zeros(n_t, dtype=int)
    occ = np.full((len(active_cells), total_prbs), -1, dtype=int)
    for ci, cell in enumerate(active_cells):
        members = np.flatnonzero(serving == cell)       # ascending = drop order
        alloc = allocate_prbs(len(members), total_prbs)
        m[members] = alloc
        occ[ci] = np.repeat(members, alloc)
    occupancy = np.zeros((n_t, total_prbs))
    prb_of_cell = np.tile(np.arange(total_prbs), len(active_cells))
    occ_flat = occ.reshape(-1)
    occupancy[occ_flat, prb_of_cell] = 1.0

    idx = np.arange(n_t)
    l_db = -gain_db[serving, idx]
    w_lin = db_to_linear(gain_db[active_cells, :])
    w_occ_flat = w_lin[np.repeat(np.arange(len(active_cells)), total_prbs),
                       occ_flat]
    noise_dbm = (thermal_noise_dbm_hz + 10.0 * math.log10(prb_bandwidth_hz)
                 + np.asarray(node_nf_db, dtype=float)[active_cells])
    rn_served = (np.asarray(node_is_rn, dtype=bool)[serving]
                 if node_is_rn is not None else np.zeros(n_t, dtype=bool))
    return UlContext(n_t, active_cells, cell_of_terminal, rn_served, m, l_db,
                     w_lin, occupancy, occ_flat, w_occ_flat,
                     db_to_linear(noise_dbm), total_prbs, prb_bandwidth_hz)


def ul_tx_power_vec(ctx: UlContext, pc_macro: PowerControlConfig,
                    pc_rn: PowerControlConfig) -> np.ndarray:
    """Per-terminal transmit power (dBm); -inf for terminals without PRBs."""
    p0 = np.where(ctx.rn_served, pc_rn.p0_dbm, pc_macro.p0_dbm)
    alpha = np.where(ctx.rn_served, pc_rn.alpha, pc_macro.alpha)
    pmax = np.where(ctx.rn_served, pc_rn.p_max_dbm, pc_macro.p_max_dbm)
    with np.errstate(divide="ignore"):
        log_m = 10.0 * np.log10(ctx.m_prbs)              # -inf where m == 0
    return np.minimum(pmax, p0 + log_m + alpha * ctx.l_db)


def ul_eval_psd(ctx: UlContext, psd_dbm, mapping: ShannonMapping):
    """Uplink SINR and throughput given per-terminal transmit PSD (dBm/PRB).

    Returns (sinr_db, throughput_bps). Terminals without PRBs get -inf SINR
    and zero throughput.
    """
    q = db_to_linear(psd_dbm)
    q = np.where(ctx.m_prbs > 0, q, 0.0)
    # received-per-PRB totals at each receiver: sum over all occupants
    total = ctx.w_lin @ (ctx.occupancy * q[:, None])     # (n_c, total_prbs)
    own = (q[ctx.occ_flat] * ctx.w_occ_flat).reshape(total.shape)
    interference = total - own
    noise = ctx.noise_lin[:, None]
    ratio = own / (interference + noise)
    sum_ratio = np.bincount(ctx.occ_flat, weights=ratio.reshape(-1),
                            minlength=ctx.n_terminals)
    with np.errstate(divide="ignore", invalid="ignore"):
        mean_lin = sum_ratio / ctx.m_prbs
        sinr_db = 10.0 * np.log10(mean_lin)
    sinr_db = np.where(ctx.m_prbs > 0, sinr_db, -np.inf)
    eff = shannon_spectral_eff(sinr_db, mapping)
    tput = ctx.m_prbs * ctx.prb_bandwidth_hz * eff
    return sinr_db, tput


def ul_eval(ctx: UlContext, pc_macro: PowerControlConfig,
            pc_rn: PowerControlConfig,
            mapping: ShannonMapping = ShannonMapping()) -> UlResult:
    tx = ul_tx_power_vec(ctx, pc_macro, pc_rn)
    with np.errstate(divide="ignore", invalid="ignore"):
        psd = tx - 10.0 * np.log10(ctx.m_prbs)
    psd = np.where(ctx.m_prbs > 0, psd, -np.inf)
    sinr_db, tput = ul_eval_psd(ctx, psd, mapping)
    outage = sinr_db < mapping.sinr_floor_db
    return UlResult(tx, ctx.m_prbs.copy(), sinr_db, tput, outage)


def ul_sinr(terminal_index: int, ctx: UlContext, pc_macro: PowerControlConfig,
            pc_rn: PowerControlConfig,
            mapping: ShannonMapping = ShannonMapping()) -> float:
    """Single-terminal uplink SINR (dB) under the given power control."""
    return float(ul_eval(ctx, pc_macro, pc_rn, mapping).sinr_db[terminal_index])


def ul_drop_throughputs(gain_db, serving, node_is_rn, node_nf_db,
                        pc_macro: PowerControlConfig, pc_rn: PowerControlConfig,
                        thermal_noise_dbm_hz: float = -174.0,
                        mapping: ShannonMapping = ShannonMapping()) -> UlResult:
    """Complete uplink evaluation of one drop (context build plus one eval)."""
    ctx = build_ul_context(gain_db, serving, node_nf_db, thermal_noise_dbm_hz,
                           node_is_rn=node_is_rn)
    return ul_eval(ctx, pc_macro, pc_rn, mapping)
