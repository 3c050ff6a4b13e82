"""Command-line interface: config ingestion, sweep orchestration and
deterministic CSV emission.

Subcommands: witness, pair-scan, cycle, sweep-tauc, sweep-jkappa,
limit-cycle.  Exit codes: 0 success, 1 usage or config error,
2 numerical failure, 3 identity-check breach.

Config files are flat UTF-8 ``key = value`` text; ``#`` starts a
comment and unknown keys are errors.  Frequencies are given as ordinary
kHz and converted internally via omega = 2*pi*1000*value rad/s; rates
are 1/s and durations seconds.  Every output file carries one ``#``
header line with the tool version and the fully resolved configuration,
so identical configs produce byte-identical files regardless of
``--jobs``.
"""

from __future__ import annotations

import argparse
import math
import multiprocessing
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import __version__
from .cycle import (
    CycleConfig,
    cop_identity_checks,
    run_cycle,
    run_to_limit_cycle,
)
from .dynamics import PositivityError
from .reservoir import ReservoirParams
from .witness import WitnessConfig, pair_scan, trace_distance_trajectory

__all__ = ["main", "RunManifest", "ConfigError", "parse_config", "DEFAULTS"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IDENTITY = 3

KHZ_TO_RAD = 2.0 * math.pi * 1000.0


class ConfigError(ValueError):
    """Malformed config file or unknown key."""


def _parse_float_list(text: str) -> tuple[float, ...]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    return tuple(float(part) for part in items)


# key -> (parser, default); None defaults are resolved per subcommand.
DEFAULTS: dict[str, tuple] = {
    "omega0_khz": (float, 3.6),
    "omega_tau1_khz": (float, 2.2),
    "omega_aux_khz": (float, 2.2),
    "kappa_hz": (float, 20.0),
    "beta_h_omega0": (float, 3.0),
    "beta_c_omega_tau1": (float, 2.5),
    "tau1_s": (float, 0.75e-3),
    "delta_tau_h_s": (float, 0.25),
    "delta_tau_c_s": (float, 0.12),
    "j_over_kappa": (float, 0.5),
    "j_over_kappa_list": (_parse_float_list, (40.0, 10.0, 0.5)),
    "aux_init_policy": (str, "fresh-gibbs"),
    "witness_t_max_s": (float, 0.3),
    "witness_grid_step_s": (float, 1e-4),
    "witness_bath_temp_over_omega_aux": (float, 10.0),
    "witness_positivity_tol": (float, 1e-6),
    "n_pairs": (int, 1000),
    "delta_tau_c_min_s": (float, 0.0),
    "delta_tau_c_max_s": (float, 0.12),
    "delta_tau_c_step_s": (float, 0.25e-3),
    "j_over_kappa_min": (float, 0.1),
    "j_over_kappa_max": (float, 50.0),
    "j_over_kappa_step": (float, 0.25),
    "delta_tau_c_list_s": (_parse_float_list, (3e-3, 50e-3, 0.12)),
    "max_iters": (int, 200),
    "limit_cycle_tol": (float, 1e-10),
}


def parse_config(path: str | None) -> dict:
    """Read a flat key = value config; unknown keys are errors."""
    values = {key: default for key, (_, default) in DEFAULTS.items()}
    if path is None:
        return values
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        text = text.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        parser = DEFAULTS[key][0]
        try:
            values[key] = parser(text)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {text!r}") from exc
    return values


def cycle_config(values: dict, j_over_kappa: float, delta_tau_c: float) -> CycleConfig:
    omega0 = values["omega0_khz"] * KHZ_TO_RAD
    omega_tau1 = values["omega_tau1_khz"] * KHZ_TO_RAD
    return CycleConfig(
        j_over_kappa=j_over_kappa,
        delta_tau_c=delta_tau_c,
        omega0=omega0,
        omega_tau1=omega_tau1,
        omega_aux=values["omega_aux_khz"] * KHZ_TO_RAD,
        kappa=values["kappa_hz"],
        tau1=values["tau1_s"],
        delta_tau_h=values["delta_tau_h_s"],
        beta_h=values["beta_h_omega0"] / omega0,
        beta_c=values["beta_c_omega_tau1"] / omega_tau1,
        aux_init_policy=values["aux_init_policy"],
    )


def witness_params(values: dict, j_over_kappa: float) -> ReservoirParams:
    """Witness reservoir: both qubits at the auxiliary gap, hot bath."""
    omega_aux = values["omega_aux_khz"] * KHZ_TO_RAD
    beta = 1.0 / (values["witness_bath_temp_over_omega_aux"] * omega_aux)
    return ReservoirParams.from_ratio(
        omega_aux, omega_aux, j_over_kappa, values["kappa_hz"], beta
    )


@dataclass(frozen=True)
class RunManifest:
    """Provenance of one CLI invocation, rendered into output headers."""

    subcommand: str
    config_path: str | None
    out_dir: str
    jobs: int
    version: str = __version__

    def header(self, values: dict) -> str:
        resolved = " ".join(
            f"{key}={_render_value(values[key])}" for key in sorted(values)
        )
        return (
            f"# ottoref {self.version} | {self.subcommand} | {resolved} | "
            "units: *_khz ordinary kHz (omega = 2*pi*1000*value rad/s), "
            "rates 1/s, durations s, energies rad/s"
        )


def _render_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(repr(v) for v in value)
    return repr(value) if not isinstance(value, str) else value


def _fmt(x: float) -> str:
    return f"{x:.12e}"


def write_csv_atomic(path: str, header_comment: str, columns: list[str], rows: list[tuple]) -> None:
    """Write a CSV with a header comment, atomically (temp then rename)."""
    payload_lines = [header_comment, ",".join(columns)]
    for row in rows:
        payload_lines.append(
            ",".join(part if isinstance(part, str) else _fmt(part) for part in row)
        )
    payload = "\n".join(payload_lines) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _grid(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0:
        raise ConfigError("grid step must be positive")
    n = int(math.floor((hi - lo) / step + 1e-9))
    values = [lo + k * step for k in range(n + 1)]
    if not values:
        raise ConfigError("empty grid")
    return values


SWEEP_COLUMNS = [
    "delta_tau_c_s",
    "J_over_kappa",
    "cop",
    "gamma",
    "cooling_power",
    "injected_power",
    "cop_lag_L",
    "F_lag",
    "I_SA_nat",
    "flags",
]

DIAG_COLUMNS = SWEEP_COLUMNS + [
    "first_law_residual",
    "cop_lag_form_residual",
    "quasistatic_lag_abs",
    "otto_form_residual",
]


def _sweep_point(args) -> tuple:
    """Worker for one sweep grid point; returns (key, row, ok, diag_row)."""
    values, j_over_kappa, delta_tau_c = args
    cfg = cycle_config(values, j_over_kappa, delta_tau_c)
    ledger, metrics = run_cycle(cfg)
    report = cop_identity_checks(ledger, metrics, cfg)
    row = (
        delta_tau_c,
        j_over_kappa,
        metrics.cop,
        metrics.gamma_param,
        metrics.cooling_power,
        metrics.injected_power,
        metrics.cop_lag,
        metrics.quasistatic_lag,
        metrics.mutual_information,
        metrics.flags.bits(),
    )
    ok = report.within()
    diag = row + (
        report.first_law_residual,
        report.cop_lag_form_residual,
        report.quasistatic_lag_abs,
        report.otto_form_residual,
    )
    return row, ok, diag


def _run_points(points: list, jobs: int) -> list:
    if jobs > 1 and len(points) > 1:
        with multiprocessing.Pool(processes=jobs) as pool:
            return pool.map(_sweep_point, points, chunksize=8)
    return [_sweep_point(p) for p in points]


def _emit_sweep(name, manifest, values, points, jobs, out_dir):
    results = _run_points(points, jobs)
    rows = [r for r, ok, _ in results if ok]
    diagnostics = [d for _, ok, d in results if not ok]
    header = manifest.header(values)
    write_csv_atomic(os.path.join(out_dir, f"{name}.csv"), header, SWEEP_COLUMNS, rows)
    if diagnostics:
        write_csv_atomic(
            os.path.join(out_dir, f"{name}_diagnostics.csv"),
            header,
            DIAG_COLUMNS,
            diagnostics,
        )
        print(
            f"{len(diagnostics)} row(s) failed the identity checks; "
            f"see {name}_diagnostics.csv",
            file=sys.stderr,
        )
        return EXIT_IDENTITY
    return EXIT_OK


def cmd_sweep_tauc(manifest: RunManifest, values: dict) -> int:
    grid = _grid(
        values["delta_tau_c_min_s"],
        values["delta_tau_c_max_s"],
        values["delta_tau_c_step_s"],
    )
    ratios = values["j_over_kappa_list"]
    if not ratios:
        raise ConfigError("j_over_kappa_list must not be empty")
    points = [(values, jk, dtc) for jk in ratios for dtc in grid]
    return _emit_sweep("sweep_tauc", manifest, values, points, manifest.jobs, manifest.out_dir)


def cmd_sweep_jkappa(manifest: RunManifest, values: dict) -> int:
    grid = _grid(
        values["j_over_kappa_min"],
        values["j_over_kappa_max"],
        values["j_over_kappa_step"],
    )
    durations = values["delta_tau_c_list_s"]
    if not durations:
        raise ConfigError("delta_tau_c_list_s must not be empty")
    points = [(values, jk, dtc) for dtc in durations for jk in grid]
    results = _run_points(points, manifest.jobs)
    header = manifest.header(values)
    rows = []
    diagnostics = []
    for row, ok, diag in results:
        # same schema with J/kappa as the swept axis; keep column order
        if ok:
            rows.append(row)
        else:
            diagnostics.append(diag)
    write_csv_atomic(
        os.path.join(manifest.out_dir, "sweep_jkappa.csv"), header, SWEEP_COLUMNS, rows
    )
    if diagnostics:
        write_csv_atomic(
            os.path.join(manifest.out_dir, "sweep_jkappa_diagnostics.csv"),
            header,
            DIAG_COLUMNS,
            diagnostics,
        )
        print(
            f"{len(diagnostics)} row(s) failed the identity checks; "
            "see sweep_jkappa_diagnostics.csv",
            file=sys.stderr,
        )
        return EXIT_IDENTITY
    return EXIT_OK


def cmd_witness(manifest: RunManifest, values: dict) -> int:
    ratios = values["j_over_kappa_list"]
    if not ratios:
        raise ConfigError("j_over_kappa_list must not be empty")
    rows = []
    for j_over_kappa in ratios:
        cfg = WitnessConfig(
            params=witness_params(values, j_over_kappa),
            t_max=values["witness_t_max_s"],
            grid_step=values["witness_grid_step_s"],
            positivity_tolerance=values["witness_positivity_tol"],
        )
        report = trace_distance_trajectory(cfg)
        for t, d, dd in zip(report.times, report.distances, report.derivative):
            rows.append((float(t), float(d), float(dd), j_over_kappa))
        verdict = "non-Markovian" if report.is_non_markovian else "Markovian"
        print(
            f"J/kappa = {j_over_kappa:g}: max dD/dt = "
            f"{report.max_positive_derivative:.6e} 1/s -> {verdict}"
        )
    write_csv_atomic(
        os.path.join(manifest.out_dir, "witness.csv"),
        manifest.header(values),
        ["t_s", "D", "dDdt", "J_over_kappa"],
        rows,
    )
    return EXIT_OK


def cmd_pair_scan(manifest: RunManifest, values: dict) -> int:
    n_pairs = values["n_pairs"]
    if n_pairs < 1:
        raise ConfigError("n_pairs must be >= 1")
    report = pair_scan(
        witness_params(values, values["j_over_kappa"]),
        n_pairs,
        t_max=values["witness_t_max_s"],
        grid_step=values["witness_grid_step_s"],
        positivity_tolerance=values["witness_positivity_tol"],
    )
    rows = [
        (
            str(i),
            float(report.directions[i, 0]),
            float(report.directions[i, 1]),
            float(report.directions[i, 2]),
            float(report.max_positive_derivative_per_pair[i]),
        )
        for i in range(n_pairs)
    ]
    write_csv_atomic(
        os.path.join(manifest.out_dir, "pair_scan.csv"),
        manifest.header(values),
        ["pair_index", "n_x", "n_y", "n_z", "max_dDdt_1_per_s"],
        rows,
    )
    verdict = "non-Markovian" if report.is_non_markovian else "Markovian"
    print(
        f"{n_pairs} pairs, J/kappa = {values['j_over_kappa']:g}: "
        f"worst max dD/dt = {report.max_positive_derivative:.6e} 1/s -> {verdict}"
    )
    return EXIT_OK


def _print_cycle_report(cfg: CycleConfig, ledger, metrics, report) -> None:
    print(f"tau_cycle = {ledger.tau_cycle:.6g} s   (J/kappa = {cfg.j_over_kappa:g}, "
          f"delta_tau_c = {cfg.delta_tau_c:.6g} s)")
    print("energies (rad/s):")
    for name, value in (
        ("U0", ledger.u0),
        ("U_tau1", ledger.u_tau1),
        ("U_tau2", ledger.u_tau2),
        ("U_tau3", ledger.u_tau3),
        ("U_tau4", ledger.u_tau4),
        ("W1", ledger.w1),
        ("W3", ledger.w3),
        ("W_net", ledger.w_net),
        ("Qc_S", ledger.qc_s),
        ("Qh", ledger.qh),
        ("dV_SA", ledger.dv_sa),
        ("-Qc_R", ledger.heat_released_cold),
    ):
        print(f"  {name:8s} = {value:+.9e}")
    print("figures of merit:")
    print(f"  cop          = {metrics.cop:.9g}   (otto {metrics.cop_otto:.9g}, "
          f"carnot {metrics.cop_carnot:.9g})")
    gamma = metrics.gamma_param
    if math.isnan(gamma):
        print("  gamma        = undefined (no heat exchanged)")
    else:
        print(f"  gamma        = {gamma:.9g}   (overestimation factor 1/gamma = "
              f"{1.0 / gamma:.9g})" if gamma != 0 else f"  gamma        = {gamma:.9g}")
    print(f"  cooling pwr  = {metrics.cooling_power:.9g} rad/s^2")
    print(f"  injected pwr = {metrics.injected_power:.9g} rad/s^2")
    print(f"  cop lag L    = {metrics.cop_lag:.9g}")
    print(f"  F lag        = {metrics.quasistatic_lag:.9g}")
    print(f"  I(S:A)       = {metrics.mutual_information:.9g} nat")
    print(f"  flags        = {metrics.flags.bits()} "
          "(cold-heat-released, work-injected, hot-heat-rejected, gamma-positive)")
    print("identity residuals:")
    print(f"  first law         = {report.first_law_residual:.3e} (rel)")
    print(f"  cold-side ledger  = {report.cold_ledger_residual:.3e} (abs)")
    print(f"  Carnot-lag form   = {report.cop_lag_form_residual:.3e} (rel)")
    print(f"  |F|               = {report.quasistatic_lag_abs:.3e}")
    print(f"  Otto-form         = {report.otto_form_residual:.3e} (rel)")
    print(f"  gamma necessity   = {'ok' if report.gamma_necessity else 'VIOLATED'}")


def _ledger_rows(ledger, metrics) -> list[tuple]:
    pairs = [
        ("U0", ledger.u0),
        ("U_tau1", ledger.u_tau1),
        ("U_tau2", ledger.u_tau2),
        ("U_tau3", ledger.u_tau3),
        ("U_tau4", ledger.u_tau4),
        ("W1", ledger.w1),
        ("W3", ledger.w3),
        ("W_net", ledger.w_net),
        ("Qc_S", ledger.qc_s),
        ("Qh", ledger.qh),
        ("dV_SA", ledger.dv_sa),
        ("minus_Qc_R", ledger.heat_released_cold),
        ("I_SA_nat", ledger.i_sa),
        ("tau_cycle_s", ledger.tau_cycle),
        ("cop", metrics.cop),
        ("gamma", metrics.gamma_param),
        ("cooling_power", metrics.cooling_power),
        ("injected_power", metrics.injected_power),
        ("cop_lag_L", metrics.cop_lag),
        ("F_lag", metrics.quasistatic_lag),
        ("cop_otto", metrics.cop_otto),
        ("cop_carnot", metrics.cop_carnot),
    ]
    return [(name, value) for name, value in pairs]


def cmd_cycle(manifest: RunManifest, values: dict) -> int:
    cfg = cycle_config(values, values["j_over_kappa"], values["delta_tau_c_s"])
    ledger, metrics = run_cycle(cfg)
    report = cop_identity_checks(ledger, metrics, cfg)
    _print_cycle_report(cfg, ledger, metrics, report)
    rows = _ledger_rows(ledger, metrics) + [("flags", metrics.flags.bits())]
    write_csv_atomic(
        os.path.join(manifest.out_dir, "cycle.csv"),
        manifest.header(values),
        ["quantity", "value"],
        rows,
    )
    if not report.within():
        print("identity-check breach", file=sys.stderr)
        return EXIT_IDENTITY
    if not metrics.flags.all_hold():
        print("note: not operating as a refrigerator (regime flags failed)")
    return EXIT_OK


def cmd_limit_cycle(manifest: RunManifest, values: dict) -> int:
    base = cycle_config(values, values["j_over_kappa"], values["delta_tau_c_s"])
    result = run_to_limit_cycle(
        base, max_iters=values["max_iters"], tol=values["limit_cycle_tol"]
    )
    report = cop_identity_checks(result.ledger, result.metrics, base)
    print(
        f"limit cycle ({base.aux_init_policy}): iterations = {result.iterations}, "
        f"converged = {result.converged}, last delta = {result.last_delta:.3e}"
    )
    _print_cycle_report(base, result.ledger, result.metrics, report)
    rows = _ledger_rows(result.ledger, result.metrics) + [
        ("iterations", float(result.iterations)),
        ("converged", "1" if result.converged else "0"),
        ("last_delta", result.last_delta),
    ]
    write_csv_atomic(
        os.path.join(manifest.out_dir, "limit_cycle.csv"),
        manifest.header(values),
        ["quantity", "value"],
        rows,
    )
    if not result.converged:
        print("limit cycle did not converge", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_IDENTITY if not report.within() else EXIT_OK


COMMANDS = {
    "witness": cmd_witness,
    "pair-scan": cmd_pair_scan,
    "cycle": cmd_cycle,
    "sweep-tauc": cmd_sweep_tauc,
    "sweep-jkappa": cmd_sweep_jkappa,
    "limit-cycle": cmd_limit_cycle,
}

# subcommand -> config key overridden by --step
STEP_KEYS = {
    "witness": "witness_grid_step_s",
    "pair-scan": "witness_grid_step_s",
    "sweep-tauc": "delta_tau_c_step_s",
    "sweep-jkappa": "j_over_kappa_step",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ottoref",
        description="Finite-time quantum Otto refrigerator with an engineered cold reservoir",
    )
    parser.add_argument("subcommand", choices=sorted(COMMANDS))
    parser.add_argument("--config", default=None, help="flat key = value config file")
    parser.add_argument("--out", default=".", help="output directory for CSV files")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers for sweeps")
    parser.add_argument("--step", type=float, default=None,
                        help="override the subcommand's primary grid step")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        values = parse_config(args.config)
        if args.step is not None:
            key = STEP_KEYS.get(args.subcommand)
            if key is None:
                raise ConfigError(f"--step does not apply to {args.subcommand}")
            if args.step <= 0:
                raise ConfigError("--step must be positive")
            values[key] = args.step
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        manifest = RunManifest(
            subcommand=args.subcommand,
            config_path=args.config,
            out_dir=args.out,
            jobs=args.jobs,
        )
        return COMMANDS[args.subcommand](manifest, values)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PositivityError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
