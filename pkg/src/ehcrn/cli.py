"""Command line interface.

Subcommands::

    ehcrn analyze  --config FILE                 analytic row to stdout
    ehcrn simulate --config FILE [--slots N] [--seed S]
                   [--sensing event|signal] [--replications R]
    ehcrn sweep    --case 1|2|custom --config FILE --out DIR
                   [--format csv|json] [--plots]
    ehcrn validate --config FILE                 oracle-equivalence suite

Exit codes: 0 success, 2 configuration error, 3 numeric/oracle failure,
4 I/O error.  EHCRN_THREADS bounds the sweep worker pool (results do not
depend on it).
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from ehcrn.analytic import operating_point
from ehcrn.configio import load_config
from ehcrn.errors import ConfigError, NumericsError
from ehcrn.simulate import run_simulation
from ehcrn.sweep import (
    case_one_sweep,
    case_two_sweep,
    custom_sweep,
    emit_csv,
    emit_json,
    emit_plot_script,
    format_float,
    run_sweep,
)
from ehcrn.validate import run_validation

ANALYZE_HEADER = "pf,pd,delta,pi_idle,e_on,alpha,analytic_pi0,analytic_pl"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ehcrn",
        description="packet-loss analysis and simulation for an energy-harvesting "
                    "opportunistic spectrum access link",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="print the analytic operating point as a CSV row")
    p.add_argument("--config", required=True, help="scenario config file")

    p = sub.add_parser("simulate", help="run the slot-level Monte-Carlo simulation")
    p.add_argument("--config", required=True, help="scenario config file")
    p.add_argument("--slots", type=int, help="slots per replication (overrides config)")
    p.add_argument("--seed", type=int, help="base seed (overrides config)")
    p.add_argument("--sensing", choices=("event", "signal"), help="sensing mode (overrides config)")
    p.add_argument("--replications", type=int, help="replication count (overrides config)")

    p = sub.add_parser("sweep", help="run a sweep campaign and write result files")
    p.add_argument("--case", required=True, choices=("1", "2", "custom"))
    p.add_argument("--config", required=True, help="base scenario config file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--plots", action="store_true", help="also write a gnuplot script")

    p = sub.add_parser("validate", help="run the oracle-equivalence suite")
    p.add_argument("--config", required=True, help="scenario config file")
    return parser


def _cmd_analyze(args) -> int:
    bundle = load_config(args.config)
    op = operating_point(bundle.scenario)
    values = (op.pf, op.pd, op.delta, op.pi_idle, op.e_on, op.alpha, op.outage, op.packet_loss)
    print(ANALYZE_HEADER)
    print(",".join(format_float(v) for v in values))
    return 0


def _cmd_simulate(args) -> int:
    bundle = load_config(args.config)
    sim = bundle.sim
    overrides = {}
    if args.slots is not None:
        overrides["slots"] = args.slots
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.sensing is not None:
        overrides["sensing_mode"] = args.sensing
    if args.replications is not None:
        overrides["replications"] = args.replications
    try:
        sim = replace(sim, **overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    report = run_simulation(bundle.scenario, sim)
    op = operating_point(bundle.scenario)
    print(f"slots                      {report.slots} ({sim.replications} replication(s))")
    print(f"sensing mode               {sim.sensing_mode}")
    print(f"packet loss (simulated)    {report.empirical_packet_loss:.6f} "
          f"+/- {report.packet_loss_ci95:.6f} (95% CI)")
    print(f"packet loss (analytic)     {op.packet_loss:.6f}")
    print(f"outage occupancy sim/ana   {report.empirical_outage_occupancy:.6f} / {op.outage:.6f}")
    print(f"false alarm sim/ana        {report.empirical_pf:.6f} / {op.pf:.6f}")
    print(f"detection sim/ana          {report.empirical_pd:.6f} / {op.pd:.6f}")
    print(f"access prob sim/ana        {report.empirical_delta:.6f} / {op.delta:.6f}")
    print(f"idle prob sim/ana          {report.empirical_pi_idle:.6f} / {op.pi_idle:.6f}")
    print(f"delivered / collided       {report.packets_delivered} / {report.packets_collided}")
    print(f"lost to outage / no-access {report.packets_lost_outage} / "
          f"{report.packets_lost_false_alarm_or_busy}")
    return 0


def _cmd_sweep(args) -> int:
    bundle = load_config(args.config)
    if args.case in ("1", "2") and bundle.sweep is not None:
        raise ConfigError(
            "cases 1 and 2 use built-in sweep definitions; remove the [sweep] "
            "section or run with --case custom"
        )
    if args.case == "1":
        spec, stem = case_one_sweep(bundle), "case1"
    elif args.case == "2":
        spec, stem = case_two_sweep(bundle), "case2"
    else:
        spec, stem = custom_sweep(bundle), "custom"
    rows = run_sweep(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    emit_csv(rows, csv_path)
    written = [csv_path]
    if args.format == "json":
        json_path = out / f"{stem}.json"
        emit_json(rows, json_path)
        written.append(json_path)
    if args.plots:
        plot_path = out / f"{stem}.gp"
        emit_plot_script(rows, plot_path, sweep_variable=spec.variable, csv_name=csv_path.name)
        written.append(plot_path)
    for path in written:
        print(path)
    return 0


def _cmd_validate(args) -> int:
    bundle = load_config(args.config)
    results = run_validation(bundle)
    failed = False
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.name}: {res.detail}")
        failed = failed or not res.passed
    return 3 if failed else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "analyze": _cmd_analyze,
        "simulate": _cmd_simulate,
        "sweep": _cmd_sweep,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"ehcrn: config error: {exc}", file=sys.stderr)
        return 2
    except (NumericsError, ValueError, ArithmeticError) as exc:
        print(f"ehcrn: numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"ehcrn: i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
