"""Walk through the deployment geometry and relay coverage areas.

Builds the two named scenarios, shows how relays sit on the sector-border
ring, and sweeps the selection bias to watch relay cells grow.
"""

import numpy as np

from relaysim import (OperatingPoint, PropagationModel, ScenarioConfig,
                      build_layout, coverage_fraction, wrap_distance)

for kind, rns in (("urban", 4), ("suburban", 10)):
    cfg = ScenarioConfig.for_scenario(kind, rns_per_sector=rns)
    layout = build_layout(cfg)
    print(f"--- {kind}: ISD {cfg.isd_m:g} m, {rns} relays per sector ---")
    print(f"macro sectors: {layout.n_macro}, relays: {layout.n_relays}, "
          f"sites: {layout.n_sites}")

    # relays of the first sector sit on a ring at 0.4 * ISD from the site
    first_rn = next(n for n in layout.nodes if n.is_relay)
    d, _ = wrap_distance(first_rn.position, layout.nodes[0], layout)
    print(f"first relay sits {d:.1f} m from its site "
          f"(ring radius {0.4 * cfg.isd_m:g} m)")

# Relay coverage area as a function of the effective bias. The same seed is
# used for every operating point, so the growth is exactly monotone.
print("\nrelay coverage fraction vs selection bias (urban, 4 relays/sector)")
cfg = ScenarioConfig.for_scenario("urban", rns_per_sector=4)
layout = build_layout(cfg)
model = PropagationModel.for_scenario("urban")
print("  bias [dB]   no power cut   with 8 dB power cut")
for y in (0.0, 4.0, 8.0, 12.0):
    plain = coverage_fraction(layout, model, OperatingPoint(0.0, y),
                              n_area_samples=4000, n_realizations=3, seed=1)
    cut = coverage_fraction(layout, model, OperatingPoint(8.0, y),
                            n_area_samples=4000, n_realizations=3, seed=1)
    print(f"  {y:9.0f}   {plain:12.3f}   {cut:19.3f}")

print("\nAt zero bias and full power roughly 29% of the area prefers a "
      "relay;\nbias and macro power reduction both extend that share.")
