"""Command-line driver tying the valuation pipeline together.

Subcommands:

* ``price-cap``: value the remuneration option and report its net cost.
* ``simulate``: emit loss-ratio scenario, fan-chart and histogram files.
* ``value``: full underwriting-risk report (or replay of pre-computed
  PVFP figures, which isolates the report arithmetic).
* ``calibrate-spread``: fit the risk-aversion spread function.

Every run writes a manifest with the config hash, seed and engine version.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__, reports
from .cap import CapValuation, price_cap
from .config import (
    RunConfig,
    load_cap_inputs,
    load_market,
    load_portfolio,
    load_replay_pvfp,
    load_run_config,
    load_weight_matrix,
    load_zero_curve_only,
)
from .errors import CalibrationError, ConfigError
from .loss import generate_scenarios, histogram, resolve_params
from .projection import pvfp, pvfp_batch
from .risk import SpreadFunction, aggregate, calibrate_spread, pvfp_stats, risk_statistics

HISTOGRAM_BIN_WIDTH = 0.10


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="engine",
        description="Valuation engine for aggregate-data protection portfolios.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_sim_flags: bool) -> None:
        p.add_argument("--config", required=True, help="Path to the JSON run config.")
        p.add_argument("--out", default=None, help="Output directory (overrides config).")
        if with_sim_flags:
            p.add_argument("--seed", type=int, default=None, help="Simulation seed.")
            p.add_argument("--scenarios", type=int, default=None, help="Scenario count.")
            p.add_argument("--workers", type=int, default=None, help="Worker threads.")

    add_common(sub.add_parser("price-cap", help="Value the distributor remuneration cap."), False)
    add_common(sub.add_parser("simulate", help="Generate loss-ratio scenario files."), True)
    add_common(sub.add_parser("value", help="Produce the underwriting-risk report."), True)
    add_common(sub.add_parser("calibrate-spread", help="Fit the spread function."), False)
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    return load_run_config(
        args.config,
        seed=getattr(args, "seed", None),
        scenarios=getattr(args, "scenarios", None),
        workers=getattr(args, "workers", None),
        out=args.out,
    )


def _spread_function(config: RunConfig) -> SpreadFunction:
    if config.spread_points is None:
        raise ConfigError(f"{config.config_path}: 'spread_points' is required for this command")
    return calibrate_spread(config.spread_points)


def cmd_price_cap(config: RunConfig) -> int:
    if config.cap_spec_path is None:
        raise ConfigError(f"{config.config_path}: 'cap_spec' is required for price-cap")
    market = load_market(config)
    inputs = load_cap_inputs(config.cap_spec_path, config.spot_index_rate)

    if inputs.is_replay:
        valuation = CapValuation.from_caplets(
            inputs.replay_caplet_costs,
            deterministic_value=inputs.replay_deterministic_cost,
            booked_flows_pv=inputs.booked_flows_pv,
            tax_rate=market.tax_rate,
        )
    else:
        priced = price_cap(inputs.spec, market)
        valuation = CapValuation.from_caplets(
            [-v for v in priced.caplet_values],
            deterministic_value=-priced.deterministic_value,
            booked_flows_pv=inputs.booked_flows_pv,
            tax_rate=market.tax_rate,
        )

    config.output_dir.mkdir(parents=True, exist_ok=True)
    reports.write_cap_report(config.output_dir / "cap_report.csv", inputs, market, valuation)
    reports.write_manifest(config.output_dir, "price-cap", config)

    print(f"stochastic value     {reports.money(valuation.stochastic_value)}")
    print(f"deterministic value  {reports.money(valuation.deterministic_value)}")
    print(f"valuation spread     {reports.money(valuation.valuation_spread)}")
    print(f"booked flows pv      {reports.money(valuation.booked_flows_pv)}")
    print(f"crd                  {reports.money(valuation.crd)}")
    return 0


def _load_portfolios(config: RunConfig):
    if not config.portfolio_paths:
        raise ConfigError(f"{config.config_path}: 'portfolios' is required for this command")
    portfolios = [load_portfolio(p, config.horizon) for p in config.portfolio_paths]
    weights = load_weight_matrix(config.weights_path) if config.weights_path else None
    return portfolios, weights


def cmd_simulate(config: RunConfig) -> int:
    portfolios, weights = _load_portfolios(config)
    config.output_dir.mkdir(parents=True, exist_ok=True)

    for portfolio in portfolios:
        scenario_set = generate_scenarios(
            portfolio, config.scenarios, config.seed, weights=weights, workers=config.workers
        )
        out = config.output_dir
        reports.write_scenarios_csv(out / f"{portfolio.id}_scenarios.csv", scenario_set)
        reports.write_fan_chart_csv(out / f"{portfolio.id}_fan_chart.csv", scenario_set)
        bins = histogram(scenario_set.initial_ratios(), HISTOGRAM_BIN_WIDTH)
        reports.write_histogram_csv(
            out / f"{portfolio.id}_histogram.csv", bins, HISTOGRAM_BIN_WIDTH
        )
        print(
            f"{portfolio.id}: {scenario_set.n_scenarios} scenarios x {scenario_set.horizon} years, "
            f"seed {config.seed}, floored {scenario_set.floored_count}"
        )

    reports.write_manifest(config.output_dir, "simulate", config)
    return 0


def cmd_value(config: RunConfig) -> int:
    spread_fn = _spread_function(config)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    rows = []

    if config.replay_pvfp_path is not None:
        for entry in load_replay_pvfp(config.replay_pvfp_path):
            stats = risk_statistics(
                entry.mean_pvfp, entry.vol_pvfp, spread_fn, entry.pvfp_tsr, entry.pvfp_tsr_spread
            )
            rows.append((entry.id, stats))
    else:
        portfolios, weights = _load_portfolios(config)
        curve = load_zero_curve_only(config)
        echo_rows = []
        for portfolio in portfolios:
            params = resolve_params(portfolio, weights)
            echo_rows.append((portfolio.id, portfolio.mean_sp, params.mu, params.sigma))

            scenario_set = generate_scenarios(
                portfolio, config.scenarios, config.seed, weights=weights, workers=config.workers
            )
            samples = pvfp_batch(portfolio, scenario_set, curve)
            reports.write_pvfp_samples_csv(
                config.output_dir / f"{portfolio.id}_pvfp_samples.csv", samples
            )
            mean, vol = pvfp_stats(s.pvfp for s in samples)
            spread = spread_fn.spread_for(vol / mean)
            pvfp_tsr = pvfp(portfolio, portfolio.chronicle, curve)
            pvfp_spread = pvfp(portfolio, portfolio.chronicle, curve, extra_spread=spread)
            rows.append((portfolio.id, risk_statistics(mean, vol, spread_fn, pvfp_tsr, pvfp_spread)))

        reports.write_params_echo_csv(config.output_dir / "lognormal_params.csv", echo_rows)
        print("lognormal parameters:")
        print("  portfolio        mean_sp       mu    sigma")
        for name, mean_sp, mu, sigma in echo_rows:
            print(f"  {name:<15} {reports.pct(mean_sp):>8} {reports.pct(mu):>8} {reports.pct(sigma):>8}")
        print()

    totals = aggregate([stats for _, stats in rows])
    reports.write_risk_report_csv(config.output_dir / "risk_report.csv", rows, totals)
    reports.write_manifest(config.output_dir, "value", config)

    print("risk report:")
    print("  portfolio         mean_pvfp     vol_pvfp  spread  pvfp_tsr_spread      pvfp_tsr           cur")
    for name, stats in rows:
        print(
            f"  {name:<15} {reports.money(stats.mean):>12} {reports.money(stats.vol):>12} "
            f"{reports.pct(stats.spread, 2):>7} {reports.money(stats.pvfp_spread):>16} "
            f"{reports.money(stats.pvfp_tsr):>13} {reports.money(stats.cur):>13}"
        )
    print(
        f"  {'TOTAL':<15} {'':>12} {'':>12} {'':>7} {'':>16} "
        f"{reports.money(totals[0]):>13} {reports.money(totals[1]):>13}"
    )
    return 0


def cmd_calibrate_spread(config: RunConfig) -> int:
    spread_fn = _spread_function(config)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    out = config.output_dir / "spread_function.json"
    out.write_text(
        f'{{\n  "a": {spread_fn.a!r},\n  "b": {spread_fn.b!r},\n  "c": {spread_fn.c!r}\n}}\n',
        encoding="utf-8",
    )
    reports.write_manifest(config.output_dir, "calibrate-spread", config)
    print(f"spread(vol) = a * ln(b * vol + 1) with a = {spread_fn.a:.6f}, b = {spread_fn.b:.4f}")
    return 0


_COMMANDS = {
    "price-cap": cmd_price_cap,
    "simulate": cmd_simulate,
    "value": cmd_value,
    "calibrate-spread": cmd_calibrate_spread,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args)
        return _COMMANDS[args.command](config)
    except (ConfigError, CalibrationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
