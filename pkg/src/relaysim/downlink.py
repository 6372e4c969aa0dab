"""Downlink SINR under full reuse, round-robin sharing, capped Shannon rates.

All cells transmit on all resources, so a terminal's interference is the sum
of received powers from every node except its serving one. Terminals below
the SINR reliability floor are in outage and contribute zero-throughput
samples (they stay in the distribution).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .association import OperatingPoint
from .propagation import db_to_linear


@dataclass(frozen=True)
class ShannonMapping:
    """Bandwidth/SINR-efficiency-corrected Shannon rate with an MCS cap.

    The cap is the highest-MCS spectral efficiency (64-QAM rate 9/10:
    6 x 0.9 = 5.4 bps/Hz); the floor is the reliability bound below which a
    link is unusable.
    """

    bw_eff: float = 0.56
    sinr_eff: float = 1.25
    max_spectral_eff_bps_hz: float = 5.4
    sinr_floor_db: float = -7.0


def shannon_spectral_eff(sinr_db, mapping: ShannonMapping = ShannonMapping()):
    """Spectral efficiency in bps/Hz; zero below the SINR floor."""
    sinr_db = np.asarray(sinr_db, dtype=float)
    lin = db_to_linear(sinr_db)
    eff = np.minimum(mapping.max_spectral_eff_bps_hz,
                     mapping.bw_eff * np.log2(1.0 + lin / mapping.sinr_eff))
    out = np.where(sinr_db < mapping.sinr_floor_db, 0.0, eff)
    if np.ndim(sinr_db) == 0:
        return float(out)
    return out


def shannon_throughput(sinr_db, bandwidth_hz: float,
                       mapping: ShannonMapping = ShannonMapping()):
    """Link throughput in bps over the given bandwidth."""
    if bandwidth_hz <= 0:
        raise ValueError(f"bandwidth_hz = {bandwidth_hz}; must be > 0")
    eff = shannon_spectral_eff(sinr_db, mapping)
    return bandwidth_hz * eff


@dataclass
class DlResult:
    """Per-terminal downlink outcome for one drop."""

    sinr_db: np.ndarray
    prb_share: np.ndarray
    throughput_bps: np.ndarray
    outage: np.ndarray


def dl_received_dbm(gain_db, node_tx_dbm, node_is_rn, op: OperatingPoint):
    """Received power matrix (n_nodes, n_terminals) with macro power reduced."""
    tx = np.asarray(node_tx_dbm, dtype=float).copy()
    tx[~np.asarray(node_is_rn, dtype=bool)] -= op.x_reduction_db
    return tx[:, None] + np.asarray(gain_db, dtype=float)


def dl_sinr_db(gain_db, serving, node_tx_dbm, node_is_rn, op: OperatingPoint,
               noise_dbm: float) -> np.ndarray:
    """Full-reuse downlink SINR per terminal, dB.

    Every non-serving node interferes, including the other sectors of the
    serving site and, for relay-served terminals, the donor macro.
    """
    rx_dbm = dl_received_dbm(gain_db, node_tx_dbm, node_is_rn, op)
    rx_lin = db_to_linear(rx_dbm)
    idx = np.arange(rx_lin.shape[1])
    s = rx_lin[serving, idx]
    total = rx_lin.sum(axis=0)
    interference = total - s
    noise = db_to_linear(noise_dbm)
    return 10.0 * np.log10(s / (interference + noise))


def dl_sinr(terminal_index: int, gain_db, serving, node_tx_dbm, node_is_rn,
            op: OperatingPoint, noise_dbm: float) -> float:
    """Single-terminal convenience wrapper around :func:`dl_sinr_db`."""
    return float(dl_sinr_db(gain_db, serving, node_tx_dbm, node_is_rn, op,
                            noise_dbm)[terminal_index])


def dl_drop_throughputs(gain_db, serving, node_tx_dbm, node_is_rn,
                        op: OperatingPoint, noise_dbm: float,
                        mapping: ShannonMapping = ShannonMapping(),
                        bandwidth_hz: float = 10e6) -> DlResult:
    """Round-robin full-buffer downlink throughput for one drop.

    Each terminal gets an equal time/frequency share of its cell, so its rate
    is the single-occupant Shannon rate divided by the cell population. The
    relay backhaul is ideal and adds no penalty.
    """
    serving = np.asarray(serving, dtype=int)
    sinr = dl_sinr_db(gain_db, serving, node_tx_dbm, node_is_rn, op, noise_dbm)
    n_nodes = np.asarray(gain_db).shape[0]
    counts = np.bincount(serving, minlength=n_nodes)
    share = 1.0 / counts[serving]
    tput = shannon_throughput(sinr, bandwidth_hz, mapping) * share
    outage = sinr < mapping.sinr_floor_db
    return DlResult(sinr, share, tput, outage)
