"""Biased cell selection with macro power reduction, and relay coverage area.

Selection score of a macro sector is its reduced transmit power plus link
gain; a relay's score additionally carries the selection bias. The argmax
therefore depends on the two knobs only through their sum (the effective
bias), which is the identity the uplink evaluation relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .propagation import PropagationModel, realize_link_gains
from .scenario import NetworkLayout, sample_sector_points


@dataclass(frozen=True)
class OperatingPoint:
    """Cell-extension knobs: macro power reduction X and selection bias Y, dB."""

    x_reduction_db: float = 0.0
    y_bias_db: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.x_reduction_db <= 16.0:
            raise ConfigError(
                f"x_reduction_db = {self.x_reduction_db}; legal range is [0, 16]"
            )
        if self.y_bias_db < 0.0:
            raise ConfigError(f"y_bias_db = {self.y_bias_db}; must be >= 0")

    @property
    def effective_bias_db(self) -> float:
        return self.x_reduction_db + self.y_bias_db


@dataclass
class AssociationMap:
    """Serving-node assignment for one drop."""

    serving_node: np.ndarray       # (n_terminals,) node index
    users_per_node: np.ndarray     # (n_nodes,)

    @classmethod
    def build(cls, serving_node, n_nodes: int) -> "AssociationMap":
        serving_node = np.asarray(serving_node, dtype=int)
        counts = np.bincount(serving_node, minlength=n_nodes)
        return cls(serving_node, counts)


def selection_scores(gain_db, node_tx_dbm, node_is_rn, op: OperatingPoint):
    """Score matrix (n_nodes, n_terminals) used for cell selection.

    Reducing every macro score by X is argmax-equivalent to raising every
    relay score by X, so the scores carry one effective-bias term X + Y on
    relay rows. This makes the selection under (X, Y) bit-identical to the
    selection under (0, X + Y), not just mathematically equal.
    """
    gain_db = np.asarray(gain_db, dtype=float)
    tx = np.asarray(node_tx_dbm, dtype=float)
    is_rn = np.asarray(node_is_rn, dtype=bool)
    bias = np.where(is_rn, op.x_reduction_db + op.y_bias_db, 0.0)
    return (tx + bias)[:, None] + gain_db


def select_cells(gain_db, node_tx_dbm, node_is_rn, op: OperatingPoint) -> np.ndarray:
    """Serving node index per terminal; ties go to the lowest node id."""
    scores = selection_scores(gain_db, node_tx_dbm, node_is_rn, op)
    return np.argmax(scores, axis=0)


def select_cell(gains, layout: NetworkLayout, op: OperatingPoint) -> int:
    """Single-terminal selection over a list of LinkGain entries."""
    node_ids = [g.node_id for g in gains]
    gain_col = np.array([[g.gain_db] for g in gains])
    tx = layout.node_tx_dbm[node_ids]
    is_rn = layout.node_is_rn[node_ids]
    row = int(select_cells(gain_col, tx, is_rn, op)[0])
    return int(node_ids[row])


def associate(layout: NetworkLayout, gain_db, op: OperatingPoint) -> AssociationMap:
    serving = select_cells(gain_db, layout.node_tx_dbm, layout.node_is_rn, op)
    return AssociationMap.build(serving, layout.n_nodes)


def coverage_fraction(layout: NetworkLayout, model: PropagationModel,
                      op: OperatingPoint, n_area_samples: int = 10_000,
                      n_realizations: int = 10, seed: int = 0) -> float:
    """Fraction of the deployment area whose selected cell is a relay.

    Points are sampled uniformly over the whole wraparound region with fresh
    LOS/shadowing per realization; fractions are averaged over realizations.
    The sampled positions and channel draws do not depend on the operating
    point, so the fraction is exactly non-decreasing in the effective bias at
    a fixed seed.
    """
    if layout.n_relays == 0:
        return 0.0
    fracs = []
    for real in range(n_realizations):
        ss = np.random.SeedSequence((int(seed), 0xC0FE, real)).spawn(5)
        rng = np.random.Generator(np.random.PCG64(ss[0]))
        sectors = rng.integers(0, layout.n_sectors, n_area_samples)
        counts = np.bincount(sectors, minlength=layout.n_sectors)
        pts, _ = sample_sector_points(layout, counts, rng)
        table = realize_link_gains(layout, pts, model, ss[1:5])
        serving = select_cells(table.gain_db, layout.node_tx_dbm,
                               layout.node_is_rn, op)
        fracs.append(np.mean(layout.node_is_rn[serving]))
    return float(np.mean(fracs))
