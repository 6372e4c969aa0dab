"""Hexagonal site layout, relay ring placement, user drops and wraparound geometry.

All positions are metres in a flat plane. The site cluster lives on a torus:
every node has seven wraparound images (identity plus six cluster
translations), which removes boundary effects from distance and interference
queries. Statistics can therefore be collected from all sectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

SQRT3 = math.sqrt(3.0)

MACRO = "macro"
RELAY = "relay"

SECTOR_BORESIGHTS_DEG = (0.0, 120.0, 240.0)

# Cluster shift (i, j) with n_sites = i^2 + i*j + j^2. The wraparound lattice
# is spanned by T1 = i*u + j*v and its 60 degree rotations, where u, v are the
# site lattice basis vectors.
_CLUSTER_SHIFT = {1: (1, 0), 7: (2, 1), 19: (3, 2)}

# Relay fan half-angles about the sector bisector (degrees). 4 relays sit at
# 25 deg spacing, 10 relays at 11 deg spacing, all on one ring.
DEFAULT_RN_FAN_DEG = {
    0: (),
    4: (-37.5, -12.5, 12.5, 37.5),
    10: (-49.5, -38.5, -27.5, -16.5, -5.5, 5.5, 16.5, 27.5, 38.5, 49.5),
}

PAPER_ISD_M = {"urban": 500.0, "suburban": 1732.0}

STANDARD_RN_COUNTS = (0, 4, 10)


def wrap_angle_deg(angle):
    """Normalize an angle (deg) to the half-open interval (-180, 180]."""
    w = np.asarray(angle, dtype=float) % 360.0
    w = np.where(w > 180.0, w - 360.0, w)
    if np.ndim(angle) == 0:
        return float(w)
    return w


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one simulated deployment.

    ``bias_y_db`` and ``power_reduction_x_db`` define the cell-extension
    operating point applied during association; the geometry itself does not
    depend on them.
    """

    scenario_kind: str                 # "urban" or "suburban"
    isd_m: float
    n_sites: int = 19
    sectors_per_site: int = 3
    rns_per_sector: int = 0
    ues_per_sector: int = 10
    n_drops: int = 50
    rng_seed: int = 1
    bias_y_db: float = 0.0
    power_reduction_x_db: float = 0.0
    macro_tx_dbm: float = 46.0
    rn_tx_dbm: float = 30.0
    macro_antenna_dbi: float = 14.0
    rn_antenna_dbi: float = 5.0
    macro_rx_noise_figure_db: float = 5.0
    rn_rx_noise_figure_db: float = 5.0
    rn_ring_radius_factor: float = 0.4
    rn_fan_angles_deg: tuple[float, ...] | None = None
    allow_any_rn_count: bool = False

    @classmethod
    def for_scenario(cls, scenario_kind: str, **overrides) -> "ScenarioConfig":
        """Config with the named scenario's inter-site distance filled in."""
        if scenario_kind not in PAPER_ISD_M:
            raise ConfigError(
                f"scenario_kind = {scenario_kind!r} is not known; "
                f"legal values are {sorted(PAPER_ISD_M)}"
            )
        isd = overrides.pop("isd_m", PAPER_ISD_M[scenario_kind])
        return cls(scenario_kind=scenario_kind, isd_m=isd, **overrides)

    @property
    def is_paper_isd(self) -> bool:
        return math.isclose(self.isd_m, PAPER_ISD_M.get(self.scenario_kind, -1.0))

    @property
    def effective_bias_db(self) -> float:
        return self.power_reduction_x_db + self.bias_y_db

    def validate(self) -> None:
        if self.scenario_kind not in PAPER_ISD_M:
            raise ConfigError(
                f"scenario_kind = {self.scenario_kind!r}; legal values are "
                f"{sorted(PAPER_ISD_M)}"
            )
        if not self.isd_m > 0:
            raise ConfigError(f"isd_m = {self.isd_m}; must be > 0")
        if self.n_sites not in _CLUSTER_SHIFT:
            raise ConfigError(
                f"n_sites = {self.n_sites}; legal values are "
                f"{sorted(_CLUSTER_SHIFT)} (wraparound cluster sizes)"
            )
        if self.sectors_per_site != 3:
            raise ConfigError(
                f"sectors_per_site = {self.sectors_per_site}; only 3 is supported"
            )
        if self.rns_per_sector not in STANDARD_RN_COUNTS and not self.allow_any_rn_count:
            raise ConfigError(
                f"rns_per_sector = {self.rns_per_sector}; legal values are "
                f"{STANDARD_RN_COUNTS} (set allow_any_rn_count to override)"
            )
        if self.rns_per_sector < 0:
            raise ConfigError(f"rns_per_sector = {self.rns_per_sector}; must be >= 0")
        if self.rns_per_sector not in DEFAULT_RN_FAN_DEG and self.rn_fan_angles_deg is None:
            raise ConfigError(
                f"rns_per_sector = {self.rns_per_sector} has no default ring "
                "pattern; provide rn_fan_angles_deg"
            )
        if self.rn_fan_angles_deg is not None and len(self.rn_fan_angles_deg) != self.rns_per_sector:
            raise ConfigError(
                f"rn_fan_angles_deg has {len(self.rn_fan_angles_deg)} entries "
                f"for rns_per_sector = {self.rns_per_sector}"
            )
        if self.ues_per_sector < 0:
            raise ConfigError(f"ues_per_sector = {self.ues_per_sector}; must be >= 0")
        if self.n_drops < 1:
            raise ConfigError(f"n_drops = {self.n_drops}; must be >= 1")
        if not 0.0 <= self.power_reduction_x_db <= 16.0:
            raise ConfigError(
                f"power_reduction_x_db = {self.power_reduction_x_db}; "
                "legal range is [0, 16]"
            )
        if self.bias_y_db < 0.0:
            raise ConfigError(f"bias_y_db = {self.bias_y_db}; must be >= 0")
        if not self.rn_ring_radius_factor > 0:
            raise ConfigError(
                f"rn_ring_radius_factor = {self.rn_ring_radius_factor}; must be > 0"
            )


@dataclass(frozen=True)
class Node:
    """One transmission point: a macro sector or a relay."""

    id: int
    kind: str                          # MACRO or RELAY
    position: tuple[float, float]      # metres
    boresight_deg: float               # pattern boresight; 0 for omni relays
    tx_power_dbm: float
    antenna_gain_dbi: float
    noise_figure_db: float             # receiver NF, used on the uplink

    @property
    def is_relay(self) -> bool:
        return self.kind == RELAY


@dataclass(frozen=True)
class UserTerminal:
    id: int
    position: tuple[float, float]      # metres
    sector_of_drop: int                # index of the sector the UE was dropped in
    penetration_loss_db: float = 20.0  # indoor UEs


class NetworkLayout:
    """Immutable node geometry plus wraparound bookkeeping.

    Safe to share across threads: nothing here mutates after construction.
    """

    def __init__(self, nodes, site_centers_m, wraparound_offsets_m, isd_m,
                 sectors_per_site=3):
        self.nodes: list[Node] = list(nodes)
        self.site_centers_m = np.asarray(site_centers_m, dtype=float)
        self.wraparound_offsets_m = np.asarray(wraparound_offsets_m, dtype=float)
        self.isd_m = float(isd_m)
        self.sectors_per_site = int(sectors_per_site)

        self.node_xy = np.array([n.position for n in self.nodes], dtype=float)
        self.node_is_rn = np.array([n.is_relay for n in self.nodes], dtype=bool)
        self.node_boresight_deg = np.array([n.boresight_deg for n in self.nodes])
        self.node_tx_dbm = np.array([n.tx_power_dbm for n in self.nodes])
        self.node_ant_dbi = np.array([n.antenna_gain_dbi for n in self.nodes])
        self.node_nf_db = np.array([n.noise_figure_db for n in self.nodes])
        # flattened (n * n_off, 2) image tables; distance queries run as
        # |a - b|^2 = |a|^2 + |b|^2 - 2 a.b with the cross term done by BLAS
        n_off = len(self.wraparound_offsets_m)
        self._n_off = n_off
        self._node_images = (self.node_xy[:, None, :]
                             + self.wraparound_offsets_m[None, :, :]
                             ).reshape(-1, 2)
        self._node_img_norm2 = np.einsum("ij,ij->i", self._node_images,
                                         self._node_images)
        self._site_images = (self.site_centers_m[:, None, :]
                             + self.wraparound_offsets_m[None, :, :]
                             ).reshape(-1, 2)
        self._site_img_norm2 = np.einsum("ij,ij->i", self._site_images,
                                         self._site_images)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_sites(self) -> int:
        return len(self.site_centers_m)

    @property
    def n_sectors(self) -> int:
        return self.n_sites * self.sectors_per_site

    @property
    def n_macro(self) -> int:
        return int(np.count_nonzero(~self.node_is_rn))

    @property
    def n_relays(self) -> int:
        return int(np.count_nonzero(self.node_is_rn))

    def sector_site(self, sector: int) -> int:
        return sector // self.sectors_per_site

    def sector_boresight_deg(self, sector: int) -> float:
        return SECTOR_BORESIGHTS_DEG[sector % self.sectors_per_site]

    def nearest_site(self, points) -> np.ndarray:
        """Index of the wraparound-nearest site for each point, shape (m,)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        pn2 = np.einsum("ij,ij->i", pts, pts)
        d2 = (self._site_img_norm2[:, None] + pn2[None, :]
              - 2.0 * (self._site_images @ pts.T))
        d2 = d2.reshape(self.n_sites, self._n_off, -1)
        return np.argmin(d2.min(axis=1), axis=0)

    def nearest_image_geometry(self, points, chunk=4096):
        """Wraparound distance and boresight-relative azimuth to every node.

        Returns (distance_m, azimuth_off_deg), each of shape (n_nodes, m).
        Per node the single nearest image is used; power is never combined
        across images.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        m = pts.shape[0]
        n = self.n_nodes
        dist = np.empty((n, m))
        azoff = np.empty((n, m))
        flat_base = self._n_off * np.arange(n)[:, None]
        for start in range(0, m, chunk):
            sl = slice(start, min(start + chunk, m))
            p = pts[sl]
            pn2 = np.einsum("ij,ij->i", p, p)
            d2 = (self._node_img_norm2[:, None] + pn2[None, :]
                  - 2.0 * (self._node_images @ p.T))      # (n*n_off, k)
            d2 = d2.reshape(n, self._n_off, -1)
            best = np.argmin(d2, axis=1)                   # (n, k)
            img = self._node_images[flat_base + best]      # (n, k, 2)
            dx = p[None, :, 0] - img[..., 0]
            dy = p[None, :, 1] - img[..., 1]
            dist[:, sl] = np.hypot(dx, dy)
            bearing = np.degrees(np.arctan2(dy, dx))
            azoff[:, sl] = wrap_angle_deg(bearing - self.node_boresight_deg[:, None])
        return dist, azoff


def _site_lattice_basis(isd_m: float):
    u = np.array([isd_m, 0.0])
    v = np.array([isd_m / 2.0, isd_m * SQRT3 / 2.0])
    return u, v


def _site_positions(n_sites: int, isd_m: float) -> np.ndarray:
    """Hex ring positions: centre site first, then rings ordered by angle."""
    u, v = _site_lattice_basis(isd_m)
    max_ring = {1: 0, 7: 1, 19: 2}[n_sites]
    coords = []
    for i in range(-max_ring, max_ring + 1):
        for j in range(-max_ring, max_ring + 1):
            ring = (abs(i) + abs(j) + abs(i + j)) // 2
            if ring <= max_ring:
                coords.append((ring, i, j))
    pts = []
    for ring, i, j in coords:
        p = i * u + j * v
        ang = math.atan2(p[1], p[0]) % (2 * math.pi) if ring else 0.0
        pts.append((ring, ang, p))
    pts.sort(key=lambda t: (t[0], t[1]))
    return np.array([p for _, _, p in pts])


def _wraparound_offsets(n_sites: int, isd_m: float) -> np.ndarray:
    """Identity plus the six cluster translations, exact on the site lattice.

    A 60 degree rotation maps lattice coordinates (i, j) -> (-j, i + j), so
    the six images are generated by integer arithmetic and land exactly on
    lattice points.
    """
    u, v = _site_lattice_basis(isd_m)
    i, j = _CLUSTER_SHIFT[n_sites]
    offsets = [np.zeros(2)]
    for _ in range(6):
        offsets.append(i * u + j * v)
        i, j = -j, i + j
    return np.array(offsets)


def build_layout(config: ScenarioConfig) -> NetworkLayout:
    """Construct the full node layout for a scenario.

    Macro sectors come first (3 co-located per site, boresights at 120 deg
    spacing), then relays in (site, sector, fan-angle) order. Relays sit on a
    ring of radius ``rn_ring_radius_factor * isd`` spread about each sector
    bisector.
    """
    config.validate()
    sites = _site_positions(config.n_sites, config.isd_m)
    offsets = _wraparound_offsets(config.n_sites, config.isd_m)

    nodes = []
    nid = 0
    for sx, sy in sites:
        for bore in SECTOR_BORESIGHTS_DEG:
            nodes.append(Node(nid, MACRO, (float(sx), float(sy)), bore,
                              config.macro_tx_dbm, config.macro_antenna_dbi,
                              config.macro_rx_noise_figure_db))
            nid += 1

    fan = config.rn_fan_angles_deg
    if fan is None:
        fan = DEFAULT_RN_FAN_DEG[config.rns_per_sector]
    radius = config.rn_ring_radius_factor * config.isd_m
    for sx, sy in sites:
        for bore in SECTOR_BORESIGHTS_DEG:
            for a in fan:
                ang = math.radians(bore + a)
                pos = (float(sx + radius * math.cos(ang)),
                       float(sy + radius * math.sin(ang)))
                nodes.append(Node(nid, RELAY, pos, 0.0, config.rn_tx_dbm,
                                  config.rn_antenna_dbi,
                                  config.rn_rx_noise_figure_db))
                nid += 1

    return NetworkLayout(nodes, sites, offsets, config.isd_m,
                         config.sectors_per_site)


def wrap_distance(point, node: Node, layout: NetworkLayout):
    """Minimum distance over the node's wraparound images, plus azimuth.

    Returns (distance_m, azimuth_off_deg) where the azimuth is measured from
    the node boresight to the direction of the point, as seen from the
    nearest image, normalized to (-180, 180].
    """
    p = np.asarray(point, dtype=float)
    images = np.asarray(node.position) + layout.wraparound_offsets_m
    diff = p[None, :] - images
    d = np.hypot(diff[:, 0], diff[:, 1])
    k = int(np.argmin(d))
    bearing = math.degrees(math.atan2(diff[k, 1], diff[k, 0]))
    return float(d[k]), wrap_angle_deg(bearing - node.boresight_deg)


def drop_rng_streams(seed: int, drop_index: int) -> list[np.random.SeedSequence]:
    """Per-drop substreams, independent of execution order and worker count.

    Index 0 feeds UE positions, 1/2 the macro-link LOS and shadowing draws,
    3/4 the relay-link draws, 5 is reserved. Keeping macro and relay draws on
    separate streams makes macro-link channel realizations bit-identical
    across relay deployment sizes, which is what lets gain comparisons use
    common random numbers.
    """
    return np.random.SeedSequence((int(seed), int(drop_index))).spawn(6)


def sample_sector_points(layout: NetworkLayout, counts, rng: np.random.Generator):
    """Uniform points over sector areas, ``counts[s]`` points in sector s.

    A sector's area is the wraparound Voronoi cell of its site clipped to the
    120 degree wedge around the sector boresight; sampling is by rejection
    from the circumscribed disc. Returns (positions (m, 2), sector_ids (m,)).
    """
    counts = np.asarray(counts, dtype=int)
    circum = layout.isd_m / SQRT3
    out_pos = []
    out_sec = []
    for sector, need in enumerate(counts):
        if need <= 0:
            continue
        site = layout.sector_site(sector)
        bore = layout.sector_boresight_deg(sector)
        centre = layout.site_centers_m[site]
        got = []
        remaining = int(need)
        while remaining > 0:
            k = max(64, 4 * remaining)
            r = circum * np.sqrt(rng.random(k))
            th = 2.0 * math.pi * rng.random(k)
            pts = centre + np.column_stack((r * np.cos(th), r * np.sin(th)))
            ok_site = layout.nearest_site(pts) == site
            rel = np.degrees(np.arctan2(pts[:, 1] - centre[1],
                                        pts[:, 0] - centre[0]))
            off = wrap_angle_deg(rel - bore)
            ok_wedge = (off >= -60.0) & (off < 60.0)
            acc = pts[ok_site & ok_wedge]
            if len(acc) > remaining:
                acc = acc[:remaining]
            got.append(acc)
            remaining -= len(acc)
        pos = np.concatenate(got)
        out_pos.append(pos)
        out_sec.append(np.full(len(pos), sector, dtype=int))
    if not out_pos:
        return np.empty((0, 2)), np.empty(0, dtype=int)
    return np.concatenate(out_pos), np.concatenate(out_sec)


def drop_users(layout: NetworkLayout, config: ScenarioConfig, drop_index: int,
               penetration_loss_db: float = 20.0) -> list[UserTerminal]:
    """Drop ``ues_per_sector`` uniform indoor terminals into every sector.

    Deterministic in (rng_seed, drop_index); positions do not depend on the
    relay count or the operating point, so different deployments evaluated at
    the same seed see identical user drops.
    """
    if not 0 <= drop_index < config.n_drops:
        raise ValueError(f"drop_index = {drop_index} outside [0, {config.n_drops})")
    streams = drop_rng_streams(config.rng_seed, drop_index)
    rng = np.random.Generator(np.random.PCG64(streams[0]))
    counts = np.full(layout.n_sectors, config.ues_per_sector, dtype=int)
    pos, sec = sample_sector_points(layout, counts, rng)
    return [UserTerminal(i, (float(x), float(y)), int(s), penetration_loss_db)
            for i, ((x, y), s) in enumerate(zip(pos, sec))]


def terminal_positions(terminals) -> np.ndarray:
    return np.array([t.position for t in terminals], dtype=float)
