"""Parameter sweep campaigns, result tables and emitters.

A sweep runs a grid of operating points for several labelled parameter
variants, producing one row per (variant, grid value) with the analytic
quantities, the simulated estimates and the seed that reproduces the
simulation.  Sweep points are independent jobs executed by a bounded
thread pool (the slot kernel releases the GIL); every point derives its
own seed from the base seed and its (variant, point) index, so the output
is byte-identical no matter how many workers run.

Two stock campaigns mirror the headline experiments:

* case 1 -- sweep the primary SNR (dB) with the detection threshold fixed
  by a target false-alarm probability, one curve per energy-arrival chain.
* case 2 -- sweep the normalized detection threshold at fixed SNR, one
  curve per spectrum occupancy chain.
"""

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from ehcrn.analytic import Scenario, operating_point, threshold_for_target_pf
from ehcrn.chains import RandomStream, TwoStateChain
from ehcrn.configio import LoadedConfig, snr_db_to_linear
from ehcrn.errors import ConfigError
from ehcrn.simulate import SimConfig, run_simulation

__all__ = [
    "CASE_ONE_GRID_DB",
    "CASE_ONE_VARIANTS",
    "CASE_TWO_GRID",
    "CASE_TWO_VARIANTS",
    "SweepResultRow",
    "SweepSpec",
    "apply_overrides",
    "case_one_sweep",
    "case_two_sweep",
    "custom_sweep",
    "emit_csv",
    "emit_json",
    "emit_plot_script",
    "run_sweep",
    "worker_count",
]

SWEEP_VARIABLES = ("primary_snr_db", "normalized_threshold")

CASE_ONE_GRID_DB = tuple(float(v) for v in range(-20, -7))
CASE_ONE_VARIANTS = (
    ("pon0.7-poff0.5", {"p_on": 0.7, "p_off": 0.5}),
    ("pon0.5-poff0.5", {"p_on": 0.5, "p_off": 0.5}),
    ("pon0.3-poff0.5", {"p_on": 0.3, "p_off": 0.5}),
)
# 0.98 .. 1.12 in steps of 0.005; the tail is long enough for the loss
# curve to flatten to within 1e-4 over the last few points.
CASE_TWO_GRID = tuple(round(0.98 + 0.005 * k, 10) for k in range(29))
CASE_TWO_VARIANTS = (
    ("qo0.7-qi0.5", {"q_o": 0.7, "q_i": 0.5}),
    ("qo0.5-qi0.5", {"q_o": 0.5, "q_i": 0.5}),
    ("qo0.3-qi0.5", {"q_o": 0.3, "q_i": 0.5}),
)

_XLABEL = {
    "primary_snr_db": "primary SNR (dB)",
    "normalized_threshold": "normalized detection threshold",
}

CSV_HEADER = (
    "variant,sweep_value,analytic_pl,sim_pl,sim_pl_ci95,analytic_pi0,sim_pi0,"
    "pf,pd,delta,pi_idle,slots,seed"
)

_FLOAT_FIELDS = (
    "sweep_value", "analytic_pl", "sim_pl", "sim_pl_ci95", "analytic_pi0",
    "sim_pi0", "pf", "pd", "delta", "pi_idle",
)
_INT_FIELDS = ("slots", "seed")


@dataclass(frozen=True)
class SweepResultRow:
    """One sweep point: analytic columns are re-derivable from the row's
    parameters alone; ``seed`` reproduces the simulation columns."""

    variant: str
    sweep_value: float
    analytic_pl: float
    sim_pl: float
    sim_pl_ci95: float
    analytic_pi0: float
    sim_pi0: float
    pf: float
    pd: float
    delta: float
    pi_idle: float
    slots: int
    seed: int


@dataclass(frozen=True)
class SweepSpec:
    """A sweep campaign: grid, labelled variants, base scenario, controls."""

    variable: str
    grid: tuple
    base: Scenario
    variants: tuple
    sim: SimConfig
    target_pf: float | None = None

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        if len(self.grid) < 2:
            raise ValueError(f"grid needs at least 2 values, got {len(self.grid)}")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid values must be strictly increasing")
        if not self.variants:
            raise ValueError("at least one variant is required")
        seen = set()
        for label, overrides in self.variants:
            if not label or any(ch in label for ch in ", \t\n"):
                raise ValueError(f"variant label {label!r} must be non-empty, without commas or spaces")
            if label in seen:
                raise ValueError(f"duplicate variant label {label!r}")
            seen.add(label)
            # Every variant must give a valid scenario at every grid end.
            scn, tgt = apply_overrides(self.base, self.target_pf, overrides)
            for value in (self.grid[0], self.grid[-1]):
                _point_scenario(self.variable, scn, tgt, value)


def apply_overrides(scenario: Scenario, target_pf, overrides: dict):
    """Rebuild a scenario with labelled parameter overrides applied.

    Returns the new scenario and the (possibly overridden) target
    false-alarm probability; a ``normalized_threshold`` override clears
    the target since it pins the threshold directly.
    """
    q_i, q_o = scenario.spectrum.stay_a, scenario.spectrum.stay_b
    p_on, p_off = scenario.energy.stay_a, scenario.energy.stay_b
    levels = scenario.battery_levels
    det = scenario.detector
    snr = det.primary_snr
    threshold = det.threshold
    target = target_pf
    for key, value in overrides.items():
        if key == "q_i":
            q_i = value
        elif key == "q_o":
            q_o = value
        elif key == "p_on":
            p_on = value
        elif key == "p_off":
            p_off = value
        elif key == "levels":
            levels = int(value)
        elif key == "primary_snr_db":
            snr = snr_db_to_linear(value)
        elif key == "target_pf":
            target = value
        elif key == "normalized_threshold":
            threshold = value * det.noise_power
            target = None
        else:
            raise ValueError(f"unknown override key {key!r}")
    det = replace(det, primary_snr=snr, threshold=threshold)
    if target is not None:
        det = replace(det, threshold=threshold_for_target_pf(target, det))
    scenario = Scenario(
        spectrum=TwoStateChain(q_i, q_o, labels=scenario.spectrum.labels),
        energy=TwoStateChain(p_on, p_off, labels=scenario.energy.labels),
        detector=det,
        battery_levels=levels,
        slot_duration=scenario.slot_duration,
    )
    return scenario, target


def _point_scenario(variable: str, scenario: Scenario, target_pf, value: float) -> Scenario:
    """Resolve the detector threshold for one grid value."""
    det = scenario.detector
    if variable == "primary_snr_db":
        det = replace(det, primary_snr=snr_db_to_linear(value))
        if target_pf is not None:
            det = replace(det, threshold=threshold_for_target_pf(target_pf, det))
    else:
        det = replace(det, threshold=value * det.noise_power)
    return replace(scenario, detector=det)


def worker_count() -> int:
    """Worker-pool bound: EHCRN_THREADS if set, else the CPU count."""
    raw = os.environ.get("EHCRN_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"EHCRN_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"EHCRN_THREADS must be >= 1, got {n}")
    return n


def _run_point(spec: SweepSpec, vi: int, gi: int) -> SweepResultRow:
    label, overrides = spec.variants[vi]
    scenario, target = apply_overrides(spec.base, spec.target_pf, overrides)
    value = spec.grid[gi]
    scenario = _point_scenario(spec.variable, scenario, target, value)
    op = operating_point(scenario)
    row_seed = RandomStream.derive_seed(spec.sim.seed, vi, gi)
    report = run_simulation(scenario, replace(spec.sim, seed=row_seed))
    return SweepResultRow(
        variant=label,
        sweep_value=float(value),
        analytic_pl=op.packet_loss,
        sim_pl=report.empirical_packet_loss,
        sim_pl_ci95=report.packet_loss_ci95,
        analytic_pi0=op.outage,
        sim_pi0=report.empirical_outage_occupancy,
        pf=op.pf,
        pd=op.pd,
        delta=op.delta,
        pi_idle=op.pi_idle,
        slots=report.slots,
        seed=row_seed,
    )


def run_sweep(spec: SweepSpec) -> list[SweepResultRow]:
    """Run every (variant, grid value) job; rows ordered by (variant, value)."""
    jobs = [(vi, gi) for vi in range(len(spec.variants)) for gi in range(len(spec.grid))]
    workers = min(worker_count(), len(jobs))
    if workers == 1:
        return [_run_point(spec, vi, gi) for vi, gi in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {(vi, gi): pool.submit(_run_point, spec, vi, gi) for vi, gi in jobs}
        return [futures[key].result() for key in jobs]


def case_one_sweep(bundle: LoadedConfig) -> SweepSpec:
    """SNR sweep at a fixed target false-alarm rate, one curve per
    energy-arrival chain."""
    if bundle.target_pf is None:
        raise ConfigError(
            "case 1 derives the detection threshold from a target false-alarm "
            "rate; set detector.target_pf in the config"
        )
    return SweepSpec(
        variable="primary_snr_db",
        grid=CASE_ONE_GRID_DB,
        base=bundle.scenario,
        variants=CASE_ONE_VARIANTS,
        sim=bundle.sim,
        target_pf=bundle.target_pf,
    )


def case_two_sweep(bundle: LoadedConfig) -> SweepSpec:
    """Normalized-threshold sweep, one curve per spectrum occupancy chain."""
    return SweepSpec(
        variable="normalized_threshold",
        grid=CASE_TWO_GRID,
        base=bundle.scenario,
        variants=CASE_TWO_VARIANTS,
        sim=bundle.sim,
        target_pf=None,
    )


def custom_sweep(bundle: LoadedConfig) -> SweepSpec:
    """Sweep campaign defined by the config file's [sweep] section."""
    if bundle.sweep is None:
        raise ConfigError("the config file has no [sweep] section; one is required for --case custom")
    try:
        return SweepSpec(
            variable=bundle.sweep.variable,
            grid=bundle.sweep.grid,
            base=bundle.scenario,
            variants=bundle.sweep.variants,
            sim=bundle.sim,
            target_pf=bundle.target_pf,
        )
    except ValueError as exc:
        raise ConfigError(f"sweep: {exc}") from exc


def format_float(x: float) -> str:
    """Canonical 9-significant-digit rendering used by all emitters."""
    return format(float(x), ".9g")


def _row_cells(row: SweepResultRow) -> list[str]:
    cells = [row.variant]
    for name in _FLOAT_FIELDS:
        cells.append(format_float(getattr(row, name)))
    for name in _INT_FIELDS:
        cells.append(str(int(getattr(row, name))))
    return cells


def emit_csv(rows, path) -> None:
    """Write rows as CSV: fixed header, 9-significant-digit floats, LF endings."""
    if not rows:
        raise ValueError("no rows to emit")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for row in rows:
            writer.writerow(_row_cells(row))


def emit_json(rows, path) -> None:
    """Write rows as a JSON array with the same field names and the same
    9-significant-digit values as the CSV."""
    if not rows:
        raise ValueError("no rows to emit")
    payload = []
    for row in rows:
        obj = {"variant": row.variant}
        for name in _FLOAT_FIELDS:
            obj[name] = float(format_float(getattr(row, name)))
        for name in _INT_FIELDS:
            obj[name] = int(getattr(row, name))
        payload.append(obj)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def emit_plot_script(rows, path, sweep_variable: str = "primary_snr_db", csv_name: str | None = None) -> None:
    """Write a gnuplot script rendering analytic curves plus simulated
    points with error bars, one series per variant.

    The script references only the CSV (by relative path, assumed to sit
    next to the script; default: same stem with a .csv suffix).
    """
    if not rows:
        raise ValueError("no rows to emit")
    if sweep_variable not in _XLABEL:
        raise ValueError(f"sweep_variable must be one of {tuple(_XLABEL)}, got {sweep_variable!r}")
    if csv_name is None:
        csv_name = Path(path).with_suffix(".csv").name
    labels = list(dict.fromkeys(row.variant for row in rows))
    lines = [
        "# generated by ehcrn sweep; run with: gnuplot -persist " + Path(path).name,
        f'csvfile = "{csv_name}"',
        "set datafile separator comma",
        f'set xlabel "{_XLABEL[sweep_variable]}"',
        'set ylabel "packet loss probability"',
        "set key outside right top",
        "set grid",
        f'labels = "{" ".join(labels)}"',
        "plot \\",
        "    for [v in labels] csvfile skip 1 \\",
        "        using (strcol(1) eq v ? column(2) : NaN):(column(3)) \\",
        '        with lines lw 2 title v." (analytic)", \\',
        "    for [v in labels] csvfile skip 1 \\",
        "        using (strcol(1) eq v ? column(2) : NaN):(column(4)):(column(5)) \\",
        '        with yerrorbars pt 7 ps 0.6 title v." (simulated)"',
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
