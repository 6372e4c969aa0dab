"""Run configuration: JSON grammar, strict validation, resolved defaults.

A run config is a JSON object; every key is optional except ``scenario``.
Unknown keys anywhere are hard errors so that typos never silently fall back
to defaults. The resolved form (all defaults filled in) round-trips: loading
a written resolved config reproduces the identical configuration.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, fields, replace

from .downlink import ShannonMapping
from .errors import ConfigError
from .propagation import PathLossCurve, PropagationModel
from .scenario import PAPER_ISD_M, ScenarioConfig
from .sweep import DEFAULT_PC, PcPair
from .uplink import PowerControlConfig

_SCENARIO_KEYS = {
    "isd_m": float, "n_sites": int, "sectors_per_site": int,
    "rns_per_sector": int, "ues_per_sector": int, "n_drops": int,
    "seed": int, "bias_y_db": float, "power_reduction_x_db": float,
    "macro_tx_dbm": float, "rn_tx_dbm": float,
    "macro_antenna_dbi": float, "rn_antenna_dbi": float,
    "macro_rx_noise_figure_db": float, "rn_rx_noise_figure_db": float,
    "rn_ring_radius_factor": float, "rn_fan_angles_deg": "angles",
    "allow_any_rn_count": bool,
}

_PC_KEYS = {"p0_dbm": float, "alpha": float, "p_max_dbm": float}

_MAPPING_KEYS = {"bw_eff": float, "sinr_eff": float,
                 "max_spectral_eff_bps_hz": float, "sinr_floor_db": float}

_MODEL_CURVES = ("macro_los", "macro_nlos", "relay_los", "relay_nlos")
_MODEL_TUPLES = {"macro_los_prob_urban": 2, "macro_los_prob_suburban": 2,
                 "relay_los_prob_urban": 3, "relay_los_prob_suburban": 3}
_MODEL_SCALARS = ("min_distance_m", "shadow_std_macro_db",
                  "shadow_std_relay_db", "penetration_loss_db",
                  "thermal_noise_dbm_hz", "ue_noise_figure_db",
                  "pattern_theta3db_deg", "pattern_backlobe_db")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration of one simulation run."""

    scenario: ScenarioConfig
    model: PropagationModel
    mapping: ShannonMapping
    pc: PcPair

    def to_resolved_dict(self) -> dict:
        """Raw-config form with every default resolved.

        Numeric values are canonicalized (floats as floats, counts as ints)
        so the serialized form, and with it the config hash, is identical no
        matter how the values were originally spelled.
        """
        s = self.scenario
        pc_dict = {cls: {"p0_dbm": float(t.p0_dbm), "alpha": float(t.alpha),
                         "p_max_dbm": float(t.p_max_dbm)}
                   for cls, t in (("macro_served", self.pc.macro_served),
                                  ("rn_served", self.pc.rn_served))}
        model = {}
        for name in _MODEL_CURVES:
            curve: PathLossCurve = getattr(self.model, name)
            model[name] = [float(curve.intercept_db),
                           float(curve.slope_db_decade)]
        for name in _MODEL_TUPLES:
            model[name] = [float(v) for v in getattr(self.model, name)]
        for name in _MODEL_SCALARS:
            model[name] = float(getattr(self.model, name))
        return {
            "scenario": s.scenario_kind,
            "isd_m": float(s.isd_m), "n_sites": int(s.n_sites),
            "sectors_per_site": int(s.sectors_per_site),
            "rns_per_sector": int(s.rns_per_sector),
            "ues_per_sector": int(s.ues_per_sector),
            "n_drops": int(s.n_drops), "seed": int(s.rng_seed),
            "bias_y_db": float(s.bias_y_db),
            "power_reduction_x_db": float(s.power_reduction_x_db),
            "macro_tx_dbm": float(s.macro_tx_dbm),
            "rn_tx_dbm": float(s.rn_tx_dbm),
            "macro_antenna_dbi": float(s.macro_antenna_dbi),
            "rn_antenna_dbi": float(s.rn_antenna_dbi),
            "macro_rx_noise_figure_db": float(s.macro_rx_noise_figure_db),
            "rn_rx_noise_figure_db": float(s.rn_rx_noise_figure_db),
            "rn_ring_radius_factor": float(s.rn_ring_radius_factor),
            "rn_fan_angles_deg": (None if s.rn_fan_angles_deg is None
                                  else [float(a) for a in s.rn_fan_angles_deg]),
            "allow_any_rn_count": bool(s.allow_any_rn_count),
            "power_control": pc_dict,
            "mapping": {k: float(getattr(self.mapping, k))
                        for k in _MAPPING_KEYS},
            "model": model,
        }

    def config_hash(self) -> str:
        payload = json.dumps(self.to_resolved_dict(), sort_keys=True,
                             separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


def _want(value, kind, path):
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path} = {value!r}; expected a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path} = {value!r}; expected an integer")
        return int(value)
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path} = {value!r}; expected true/false")
        return value
    if kind == "angles":
        if value is None:
            return None
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{path} = {value!r}; expected a list of angles")
        return tuple(float(a) for a in value)
    raise AssertionError(kind)


def _check_unknown(raw: dict, legal, path: str):
    for key in raw:
        if key not in legal:
            where = f"{path}.{key}" if path else key
            raise ConfigError(f"unknown config key {where!r}")


def _parse_pc_triple(raw: dict, path: str, default: PowerControlConfig):
    _check_unknown(raw, _PC_KEYS, path)
    vals = {k: _want(raw[k], t, f"{path}.{k}")
            for k, t in _PC_KEYS.items() if k in raw}
    return PowerControlConfig(
        p0_dbm=vals.get("p0_dbm", default.p0_dbm),
        alpha=vals.get("alpha", default.alpha),
        p_max_dbm=vals.get("p_max_dbm", default.p_max_dbm),
    )


def _parse_model(raw: dict, scenario_kind: str) -> PropagationModel:
    legal = set(_MODEL_CURVES) | set(_MODEL_TUPLES) | set(_MODEL_SCALARS)
    _check_unknown(raw, legal, "model")
    kwargs = {}
    for name in _MODEL_CURVES:
        if name in raw:
            pair = raw[name]
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ConfigError(
                    f"model.{name} = {pair!r}; expected [intercept_db, slope_db_decade]"
                )
            kwargs[name] = PathLossCurve(float(pair[0]), float(pair[1]))
    for name, n in _MODEL_TUPLES.items():
        if name in raw:
            vals = raw[name]
            if not isinstance(vals, (list, tuple)) or len(vals) != n:
                raise ConfigError(
                    f"model.{name} = {vals!r}; expected {n} parameters"
                )
            kwargs[name] = tuple(float(v) for v in vals)
    for name in _MODEL_SCALARS:
        if name in raw:
            kwargs[name] = _want(raw[name], float, f"model.{name}")
    return PropagationModel.for_scenario(scenario_kind, **kwargs)


def resolve_config(raw: dict) -> RunConfig:
    """Validate a raw (JSON-shaped) config and fill in every default."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    legal_top = {"scenario", "power_control", "mapping", "model"} | set(_SCENARIO_KEYS)
    _check_unknown(raw, legal_top, "")

    if "scenario" not in raw:
        raise ConfigError("missing required key 'scenario' (urban or suburban)")
    kind = raw["scenario"]
    if kind not in PAPER_ISD_M:
        raise ConfigError(
            f"scenario = {kind!r}; legal values are {sorted(PAPER_ISD_M)}"
        )

    sc_kwargs = {}
    for key, t in _SCENARIO_KEYS.items():
        if key in raw:
            sc_kwargs[key] = _want(raw[key], t, key)
    seed = sc_kwargs.pop("seed", 1)
    isd = sc_kwargs.pop("isd_m", PAPER_ISD_M[kind])
    scenario = ScenarioConfig(scenario_kind=kind, isd_m=isd, rng_seed=seed,
                              **sc_kwargs)
    scenario.validate()

    pc_raw = raw.get("power_control", {})
    if not isinstance(pc_raw, dict):
        raise ConfigError("power_control must be an object")
    _check_unknown(pc_raw, {"macro_served", "rn_served"}, "power_control")
    default = DEFAULT_PC[kind]
    pc = PcPair(
        _parse_pc_triple(pc_raw.get("macro_served", {}),
                         "power_control.macro_served", default),
        _parse_pc_triple(pc_raw.get("rn_served", {}),
                         "power_control.rn_served", default),
    )

    map_raw = raw.get("mapping", {})
    if not isinstance(map_raw, dict):
        raise ConfigError("mapping must be an object")
    _check_unknown(map_raw, _MAPPING_KEYS, "mapping")
    mapping = ShannonMapping(**{k: _want(map_raw[k], t, f"mapping.{k}")
                                for k, t in _MAPPING_KEYS.items()
                                if k in map_raw})

    model_raw = raw.get("model", {})
    if not isinstance(model_raw, dict):
        raise ConfigError("model must be an object")
    model = _parse_model(model_raw, kind)

    return RunConfig(scenario, model, mapping, pc)


def load_config(path) -> RunConfig:
    """Load and resolve a JSON run config from disk."""
    try:
        with open(path) as f:
            raw = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}")
    return resolve_config(raw)
