"""System-level simulator for relay-enhanced cellular downlink and uplink.

The package models relay cell extension (selection bias plus macro power
reduction) and LTE-style open-loop uplink power control on a wraparound
hexagonal multi-site layout, and reports percentile-throughput gains against
a macro-only reference.
"""

from .association import (AssociationMap, OperatingPoint, associate,
                          coverage_fraction, select_cell, select_cells)
from .config import RunConfig, load_config, resolve_config
from .downlink import (DlResult, ShannonMapping, dl_drop_throughputs, dl_sinr,
                       dl_sinr_db, shannon_throughput)
from .errors import (ConfigError, OutputExistsError, RelaysimError,
                     UndefinedGainError)
from .metrics import (ThroughputDistribution, cdf_points, gain, percentile,
                      percentile_stderr, quantiles)
from .propagation import (LinkGain, LinkGainTable, PathLossCurve,
                          PropagationModel, antenna_gain_dbi, dl_noise_dbm,
                          link_gain, los_probability, path_loss_db,
                          realize_link_gains, ul_noise_per_prb_dbm)
from .scenario import (NetworkLayout, Node, ScenarioConfig, UserTerminal,
                       build_layout, drop_users, wrap_distance)
from .sweep import (GainSurface, PcOptimum, PcPair, PcStrategy, ScenarioResult,
                    SearchSpace, dl_limited_effective_bias,
                    optimize_enb_only_setting, optimize_pc, run_scenario,
                    sweep_grid)
from .uplink import (PowerControlConfig, UlContext, UlResult, allocate_prbs,
                     build_ul_context, ue_tx_power_dbm, ul_drop_throughputs,
                     ul_eval, ul_sinr)

__version__ = "0.1.0"
