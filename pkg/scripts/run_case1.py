#!/usr/bin/env python3
"""Run the case-1 campaign: packet loss vs primary SNR.

Sweeps the primary SNR from -20 to -8 dB with the detection threshold
fixed by the configured target false-alarm rate, one curve per
energy-arrival chain, and writes CSV + JSON + a gnuplot script.

Usage:
    python scripts/run_case1.py [--config configs/case1.cfg] [--out results/case1]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ehcrn.configio import load_config
from ehcrn.sweep import case_one_sweep, emit_csv, emit_json, emit_plot_script, run_sweep


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default="configs/case1.cfg")
    parser.add_argument("--out", default="results/case1")
    args = parser.parse_args()

    spec = case_one_sweep(load_config(args.config))
    rows = run_sweep(spec)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(rows, out / "case1.csv")
    emit_json(rows, out / "case1.json")
    emit_plot_script(rows, out / "case1.gp", sweep_variable=spec.variable)

    print(f"{'variant':<16} {'snr_db':>7} {'analytic':>10} {'simulated':>10} {'ci95':>9}")
    for row in rows:
        print(f"{row.variant:<16} {row.sweep_value:>7.1f} {row.analytic_pl:>10.6f} "
              f"{row.sim_pl:>10.6f} {row.sim_pl_ci95:>9.6f}")
    print(f"\nwrote {out}/case1.csv, case1.json, case1.gp")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
