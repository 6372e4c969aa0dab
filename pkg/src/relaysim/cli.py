"""Command-line front end: run, sweep, optimize-pc, coverage.

Exit codes: 0 success, 2 configuration error, 3 runtime error. Diagnostics go
to stderr; stdout carries nothing but a one-line completion summary.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .association import OperatingPoint, coverage_fraction
from .config import RunConfig, load_config, resolve_config
from .errors import ConfigError, RelaysimError
from .metrics import quantiles
from .output import (check_overwrite, write_cdf_csv, write_coverage_csv,
                     write_manifest, write_pc_csv, write_resolved_config,
                     write_surface_csv)
from .scenario import build_layout
from .sweep import PcStrategy, optimize_pc, run_scenario, sweep_grid

log = logging.getLogger("relaysim")


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigError(f"cannot parse value list {text!r}; expected e.g. '0,4,8'")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run config; flags override its fields")
    p.add_argument("--scenario", choices=["urban", "suburban"],
                   help="scenario kind (resets the inter-site distance)")
    p.add_argument("--rns", type=int, help="relays per sector (0, 4 or 10)")
    p.add_argument("--bias", type=float, help="selection bias Y, dB")
    p.add_argument("--power-reduction", type=float,
                   help="macro power reduction X, dB")
    p.add_argument("--drops", type=int, help="number of user drops")
    p.add_argument("--seed", type=int, help="master RNG seed")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1,
                   help="worker threads (results are worker-count independent)")
    p.add_argument("--overwrite", action="store_true",
                   help="allow overwriting existing output files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaysim",
        description="Relay cell-extension system simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single scenario run, CDF output")
    _add_common(p_run)
    p_run.add_argument("--label", help="run label used in the CDF CSV")
    p_run.add_argument("--coverage-samples", type=int, default=0,
                       help="area samples for the coverage estimate (0 = skip)")
    p_run.add_argument("--coverage-realizations", type=int, default=10)

    p_sweep = sub.add_parser("sweep", help="bias x power-reduction gain grid")
    _add_common(p_sweep)
    p_sweep.add_argument("--direction", choices=["dl", "ul", "both"],
                         default="dl")
    p_sweep.add_argument("--x-values", default="0,4,8,12,16",
                         help="comma list of power reductions, dB")
    p_sweep.add_argument("--y-values", default="0,1,2,3,4",
                         help="comma list of biases, dB")
    p_sweep.add_argument("--coverage-samples", type=int, default=0)
    p_sweep.add_argument("--coverage-realizations", type=int, default=10)

    p_opt = sub.add_parser("optimize-pc", help="uplink power-control strategies")
    _add_common(p_opt)
    p_opt.add_argument("--strategy", choices=["i", "ii", "iii"], required=True)
    p_opt.add_argument("--bias-points", default="0,6,12,18",
                       help="comma list of effective biases, dB")

    p_cov = sub.add_parser("coverage", help="relay coverage-area fractions")
    _add_common(p_cov)
    p_cov.add_argument("--bias-points", default="0,4,8,12,16",
                       help="comma list of biases Y, dB")
    p_cov.add_argument("--coverage-samples", type=int, default=10_000)
    p_cov.add_argument("--coverage-realizations", type=int, default=10)

    return parser


def _resolve(args) -> RunConfig:
    raw = {}
    if args.config:
        with open(args.config) as f:
            try:
                raw = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"config file {args.config} is not valid JSON: {e}")
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
    if args.scenario:
        raw["scenario"] = args.scenario
        raw.pop("isd_m", None)       # scenario choice resets the ISD default
    if not raw.get("scenario"):
        raise ConfigError("no scenario given; pass --scenario or a config file")
    for flag, key in (("rns", "rns_per_sector"), ("bias", "bias_y_db"),
                      ("power_reduction", "power_reduction_x_db"),
                      ("drops", "n_drops"), ("seed", "seed")):
        value = getattr(args, flag, None)
        if value is not None:
            raw[key] = value
    return resolve_config(raw)


def _prepare_out(args, run_cfg: RunConfig, names: list[str]) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / n for n in names] + [out / "resolved_config.json",
                                        out / "manifest.json"]
    check_overwrite(paths, args.overwrite)
    return out


def _finish(out: Path, run_cfg: RunConfig, names: list[str]) -> None:
    write_resolved_config(out, run_cfg)
    write_manifest(out, run_cfg, names + ["resolved_config.json"])


def _cmd_run(args) -> str:
    run_cfg = _resolve(args)
    s = run_cfg.scenario
    label = args.label or (f"{s.scenario_kind}-{s.rns_per_sector}rn"
                           f"-x{s.power_reduction_x_db:g}-y{s.bias_y_db:g}")
    names = ["cdf_dl.csv", "cdf_ul.csv"]
    out = _prepare_out(args, run_cfg, names)
    result = run_scenario(s, run_cfg.pc, run_cfg.model, run_cfg.mapping,
                          coverage_samples=args.coverage_samples,
                          coverage_realizations=args.coverage_realizations,
                          workers=args.workers)
    write_cdf_csv(out / "cdf_dl.csv", [(label, result.dl_samples)])
    write_cdf_csv(out / "cdf_ul.csv", [(label, result.ul_samples)])
    _finish(out, run_cfg, names)
    parts = []
    for direction, samples in (("dl", result.dl_samples),
                               ("ul", result.ul_samples)):
        if len(samples) >= 2:
            q5, q50 = quantiles(samples, (0.05, 0.5))
            parts.append(f"{direction} 5%={q5 / 1e6:.3f} Mbps"
                         f" 50%={q50 / 1e6:.3f} Mbps")
    if result.coverage_fraction is not None:
        parts.append(f"coverage={result.coverage_fraction:.3f}")
    return f"run complete: {label}; " + "; ".join(parts) + f"; outputs in {out}"


def _cmd_sweep(args) -> str:
    run_cfg = _resolve(args)
    x_values = _parse_values(args.x_values)
    y_values = _parse_values(args.y_values)
    directions = ["dl", "ul"] if args.direction == "both" else [args.direction]
    names = [f"surface_{d}.csv" for d in directions]
    out = _prepare_out(args, run_cfg, names)
    for d in directions:
        surface = sweep_grid(run_cfg.scenario, x_values, y_values, d,
                             run_cfg.pc, run_cfg.model, run_cfg.mapping,
                             coverage_samples=args.coverage_samples,
                             coverage_realizations=args.coverage_realizations,
                             workers=args.workers)
        write_surface_csv(out / f"surface_{d}.csv", surface)
    _finish(out, run_cfg, names)
    n = len(x_values) * len(y_values)
    return (f"sweep complete: {n} grid points x {len(directions)} direction(s);"
            f" outputs in {out}")


def _cmd_optimize_pc(args) -> str:
    run_cfg = _resolve(args)
    strategy = PcStrategy(args.strategy)
    bias_points = _parse_values(args.bias_points)
    name = f"pc_{strategy.value}.csv"
    out = _prepare_out(args, run_cfg, [name])
    results = optimize_pc(run_cfg.scenario, strategy, bias_points,
                          run_cfg.model, run_cfg.mapping,
                          workers=args.workers)
    write_pc_csv(out / name, strategy, results)
    _finish(out, run_cfg, [name])
    return (f"optimize-pc complete: strategy {strategy.value} at "
            f"{len(bias_points)} bias point(s); outputs in {out}")


def _cmd_coverage(args) -> str:
    run_cfg = _resolve(args)
    s = run_cfg.scenario
    bias_points = _parse_values(args.bias_points)
    names = ["coverage.csv"]
    out = _prepare_out(args, run_cfg, names)
    layout = build_layout(s)
    rows = []
    for y in bias_points:
        op = OperatingPoint(s.power_reduction_x_db, y)
        frac = coverage_fraction(layout, run_cfg.model, op,
                                 args.coverage_samples,
                                 args.coverage_realizations,
                                 seed=s.rng_seed)
        rows.append((s.power_reduction_x_db, y, frac))
    write_coverage_csv(out / "coverage.csv", rows)
    _finish(out, run_cfg, names)
    return (f"coverage complete: {len(rows)} bias point(s); outputs in {out}")


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "optimize-pc": _cmd_optimize_pc,
    "coverage": _cmd_coverage,
}


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        summary = _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (RelaysimError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
