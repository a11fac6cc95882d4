"""Command-line front end.

Each subcommand loads a JSON configuration (or a built-in default that
mirrors a standard parameter set), runs the corresponding computation, and
writes CSV data files plus a JSON run manifest into the output directory.

The tool is fully deterministic: it uses no random numbers anywhere, and
identical configurations produce byte-identical data files (floats are
written with 17 significant digits, '.' decimal separator, and LF line
endings). The reserved --seedless flag documents this; setting it is
rejected because there is no seed to suppress.

Exit status: 0 on success; 2 for configuration/usage errors; 3 for
numerical failures. Errors are reported as a JSON object on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, counting, dynamics, linear_response, verify
from .counting import CountingOverflowError, DistributionError
from .dynamics import PeriodicConvergenceError
from .fock_oracle import LeakageError, TruncationError
from .model import (
    Config,
    ConfigError,
    DriveError,
    DriveWaveform,
    SimulationGrid,
    SystemParams,
    config_to_dict,
    load_config,
)
from .stepping import IntegrationError

TAU_DEFAULT = 2.0 * math.pi / 0.1  # drive period for a 0.1*omega_bar modulation frequency

THERMO_UNITS = (
    "t [1/omega_bar], omega0 [omega_bar], n [-], T [hbar*omega_bar/k_B], "
    "U [hbar*omega_bar], P [hbar*omega_bar^2], J [hbar*omega_bar^2]"
)


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path: Path, units_comment: str, names: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    for col in columns:
        if len(col) != rows:
            raise ValueError("CSV columns must have equal length")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {units_comment}\n")
        fh.write(",".join(names) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(col[i]) for col in columns) + "\n")


def config_hash(config: Config) -> str:
    doc = json.dumps(config_to_dict(config), sort_keys=True)
    return hashlib.sha256(doc.encode()).hexdigest()


def write_manifest(outdir: Path, subcommand: str, config: Config, outputs: list[str], t0: float) -> None:
    manifest = {
        "subcommand": subcommand,
        "version": __version__,
        "config": config_to_dict(config),
        "config_sha256": config_hash(config),
        "duration_seconds": time.monotonic() - t0,
        "outputs": outputs,
    }
    path = outdir / f"{subcommand.replace('-', '_')}_manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def _default_config(subcommand: str) -> Config:
    """Built-in parameter sets; each mirrors a standard plotting setup."""
    if subcommand in ("temperature", "thermo"):
        amp = 0.1 if subcommand == "temperature" else 0.7
        return Config(
            system=SystemParams(omega_bar=1.0, gamma=0.05, T_e=1.5),
            drive=DriveWaveform(kind="square", omega_bar=1.0, amplitude=amp, period=TAU_DEFAULT),
            grid=SimulationGrid(t_start=0.0, t_end=3.0 * TAU_DEFAULT, n_samples=3001),
        )
    if subcommand == "linear-response":
        return Config(
            system=SystemParams(omega_bar=1.0, gamma=0.1, T_e=1.5),
            drive=DriveWaveform(kind="harmonic", omega_bar=1.0, amplitude=0.1, period=TAU_DEFAULT),
            grid=SimulationGrid(t_start=0.0, t_end=2.0 * TAU_DEFAULT, n_samples=2001),
        )
    if subcommand == "cumulants":
        return Config(
            system=SystemParams(omega_bar=1.0, gamma=0.1, T_e=4.0),
            drive=DriveWaveform(kind="harmonic", omega_bar=1.0, amplitude=0.6, period=TAU_DEFAULT),
            grid=SimulationGrid(t_start=0.0, t_end=4.0 * TAU_DEFAULT, n_samples=4001),
        )
    if subcommand in ("lr-cumulants",):
        return Config(
            system=SystemParams(omega_bar=1.0, gamma=0.1, T_e=4.0),
            drive=DriveWaveform(kind="harmonic", omega_bar=1.0, amplitude=0.01, period=TAU_DEFAULT),
            grid=SimulationGrid(t_start=0.0, t_end=6.0 * TAU_DEFAULT, n_samples=6001),
        )
    if subcommand == "distribution":
        return Config(
            system=SystemParams(omega_bar=1.0, gamma=0.1, T_e=4.0),
            drive=DriveWaveform(kind="harmonic", omega_bar=1.0, amplitude=0.6, period=TAU_DEFAULT),
            grid=SimulationGrid(t_start=0.0, t_end=4.0 * TAU_DEFAULT, n_samples=2001),
        )
    if subcommand == "verify-oracle":
        # the driven cross-method case of the battery; the identity checks
        # in the battery run on their own fixed cases regardless
        return Config(
            system=SystemParams(omega_bar=1.0, gamma=0.1, T_e=1.0),
            drive=DriveWaveform(kind="harmonic", omega_bar=1.0, amplitude=0.3, period=TAU_DEFAULT),
            grid=SimulationGrid(t_start=0.0, t_end=TAU_DEFAULT, n_samples=2),
        )
    raise ConfigError(f"no default configuration for {subcommand!r}")


def _thermo_columns(traj: dynamics.ThermoTrajectory, t_offset: float = 0.0):
    names = ["t", "omega0", "n", "T", "U", "P", "J"]
    cols = [traj.t - t_offset, traj.omega0, traj.n, traj.T, traj.U, traj.P, traj.J]
    return names, cols


def _write_thermo(outdir: Path, stem: str, traj: dynamics.ThermoTrajectory, t_offset: float) -> list[str]:
    names, cols = _thermo_columns(traj, t_offset)
    write_csv(outdir / f"{stem}.csv", THERMO_UNITS, names, cols)
    write_csv(
        outdir / f"{stem}_impulses.csv",
        "t [1/omega_bar], W [hbar*omega_bar]",
        ["t", "W"],
        [traj.impulse_times - t_offset, traj.impulse_works],
    )
    return [f"{stem}.csv", f"{stem}_impulses.csv"]


def _periodic_thermo(config: Config, periods: float) -> tuple[dynamics.ThermoTrajectory, float]:
    """Thermo trajectory over `periods` drive periods in the periodic state."""
    params, drive, grid = config.system, config.drive, config.grid
    state = dynamics.relax_to_periodic(params, drive, grid)
    span = periods * state.period
    window = SimulationGrid(
        t_start=state.epoch,
        t_end=state.epoch + span,
        dt_max=grid.dt_max,
        n_samples=grid.n_samples,
    )
    occ = dynamics.occupancy_trajectory(params, drive, window, state.start_occupation)
    return dynamics.thermo_observables(occ, drive, params), state.epoch


def cmd_temperature(config: Config, outdir: Path, args) -> list[str]:
    periods = (config.grid.t_end - config.grid.t_start) / (
        config.drive.period if config.drive.is_periodic else (config.grid.t_end - config.grid.t_start)
    )
    traj, epoch = _periodic_thermo(config, periods)
    return _write_thermo(outdir, "temperature", traj, epoch)


def cmd_thermo(config: Config, outdir: Path, args) -> list[str]:
    outputs: list[str] = []
    base = config.drive
    kinds = (base.kind,) if base.kind == "tabulated" else ("square", "sawtooth", "harmonic")
    for kind in kinds:
        drive = base if kind == base.kind else DriveWaveform(
            kind=kind,
            omega_bar=base.omega_bar,
            amplitude=base.amplitude,
            period=base.period,
            phase=base.phase,
        )
        cfg = Config(system=config.system, drive=drive, grid=config.grid)
        traj, epoch = _periodic_thermo(cfg, (config.grid.t_end - config.grid.t_start) / base.period)
        outputs += _write_thermo(outdir, f"thermo_{kind}", traj, epoch)
    return outputs


def cmd_linear_response(config: Config, outdir: Path, args) -> list[str]:
    params, drive = config.system, config.drive
    if not drive.is_periodic:
        raise ConfigError("linear-response needs a periodic drive")
    outputs = []
    omega_mod = drive.angular_frequency
    responses = {
        "T": linear_response.temp_response(omega_mod, params),
        "P": linear_response.power_response(omega_mod, params),
        "J": linear_response.heat_response(omega_mod, params),
    }
    periods = (config.grid.t_end - config.grid.t_start) / drive.period
    traj, epoch = _periodic_thermo(config, periods)
    phase_arg = omega_mod * traj.t + drive.phase
    baselines = {"T": params.T_e, "P": 0.0, "J": 0.0}
    lr_cols = {
        key: baselines[key] + np.imag(resp * drive.amplitude * np.exp(1j * phase_arg))
        for key, resp in responses.items()
    }
    write_csv(
        outdir / "linear_response_timeseries.csv",
        THERMO_UNITS + "; *_lr are small-signal predictions",
        ["t", "omega0", "T", "P", "J", "T_lr", "P_lr", "J_lr"],
        [traj.t - epoch, traj.omega0, traj.T, traj.P, traj.J, lr_cols["T"], lr_cols["P"], lr_cols["J"]],
    )
    outputs.append("linear_response_timeseries.csv")

    sweep = np.linspace(0.0, 10.0 * params.gamma, 201)
    table = {
        "temperature": linear_response.temp_response(sweep, params),
        "power": linear_response.power_response(sweep, params),
        "heat": linear_response.heat_response(sweep, params),
    }
    for kind, values in table.items():
        name = f"response_{kind}.csv"
        write_csv(
            outdir / name,
            "Omega [omega_bar]; response per unit drive amplitude",
            ["Omega", "Re", "Im", "modulus", "argument"],
            [sweep, values.real, values.imag, np.abs(values), np.angle(values)],
        )
        outputs.append(name)
    return outputs


def cmd_cumulants(config: Config, outdir: Path, args) -> list[str]:
    order = args.order
    jets = counting.cumulant_trajectories(order, config.system, config.drive, config.grid)
    names = ["t"] + [f"c{k}" for k in range(1, order + 1)]
    cols = [jets.t] + [jets.cumulants[:, k] for k in range(order)]
    write_csv(
        outdir / "cumulants.csv",
        "t [1/omega_bar] since counting reset; ck = k-th cumulant of net transfers",
        names,
        cols,
    )
    return ["cumulants.csv"]


def cmd_lr_cumulants(config: Config, outdir: Path, args) -> list[str]:
    params, drive = config.system, config.drive
    if not drive.is_periodic:
        raise ConfigError("lr-cumulants needs a periodic drive")
    order = args.order
    jets = counting.cumulant_trajectories(order, params, drive, config.grid)
    omega_mod = drive.angular_frequency
    phase_arg = omega_mod * (jets.t + jets.epoch) + drive.phase
    modulation = drive.amplitude * np.sin(phase_arg)
    names = ["t", "domega0"]
    cols = [jets.t, modulation]
    eq = linear_response.equilibrium_cumulants(params.x, order)
    for k in range(1, order + 1):
        names.append(f"c{k}")
        cols.append(jets.cumulants[:, k - 1])
    for k in range(1, order + 1):
        resp = linear_response.lr_cumulant_response(k, omega_mod, params)
        names.append(f"c{k}_lr")
        cols.append(eq[k - 1] + np.imag(resp * drive.amplitude * np.exp(1j * phase_arg)))
    write_csv(
        outdir / "lr_cumulants.csv",
        "t [1/omega_bar] since counting reset; ck accumulated, ck_lr = equilibrium value "
        "plus small-signal modulation",
        names,
        cols,
    )
    return ["lr_cumulants.csv"]


def _auto_distribution_time(config: Config) -> float:
    """Default sampling time: maximal variance in the third/fourth period."""
    tau = config.drive.period
    grid = SimulationGrid(t_start=0.0, t_end=4.0 * tau, n_samples=2001)
    jets = counting.cumulant_trajectories(2, config.system, config.drive, grid)
    sel = jets.t >= 2.0 * tau
    idx = np.argmax(jets.cumulants[sel, 1])
    return float(jets.t[sel][idx])


def cmd_distribution(config: Config, outdir: Path, args) -> list[str]:
    t_count = args.at_time if args.at_time is not None else _auto_distribution_time(config)
    if t_count == 0.0:
        write_csv(
            outdir / "distribution.csv",
            "m [-], p [-]; zero-duration counting",
            ["m", "p"],
            [np.array([0]), np.array([1.0])],
        )
        return ["distribution.csv"]
    dist = counting.distribution(t_count, args.m_max, config.system, config.drive, config.grid)
    write_csv(
        outdir / "distribution.csv",
        f"m [-], p [-] after counting for t = {_fmt(t_count)} [1/omega_bar]",
        ["m", "p"],
        [dist.m, dist.p],
    )
    write_csv(
        outdir / "distribution_equilibrium.csv",
        "m [-], p_eq [-]: saturated undriven distribution for comparison",
        ["m", "p_eq"],
        [dist.m, counting.equilibrium_distribution(config.system.x, dist.m)],
    )
    return ["distribution.csv", "distribution_equilibrium.csv"]


def cmd_verify_oracle(config: Config, outdir: Path, args) -> list[str]:
    outcomes = verify.run_verification(
        include_driven=not args.quick, params=config.system, drive=config.drive
    )
    width = max(len(o.name) for o in outcomes)
    failures = 0
    for o in outcomes:
        status = "PASS" if o.passed else "FAIL"
        failures += 0 if o.passed else 1
        print(f"[{status}] {o.name:<{width}}  value={o.value:.3e}  threshold={o.threshold:.1e}")
    write_csv(
        outdir / "verify_oracle.csv",
        "cross-method verification distances",
        ["name", "value", "threshold", "passed"],
        [
            np.array([o.name for o in outcomes], dtype=object),
            np.array([o.value for o in outcomes]),
            np.array([o.threshold for o in outcomes]),
            np.array([int(o.passed) for o in outcomes]),
        ],
    )
    if failures:
        raise RuntimeError(f"{failures} verification check(s) failed")
    return ["verify_oracle.csv"]


COMMANDS = {
    "temperature": cmd_temperature,
    "thermo": cmd_thermo,
    "linear-response": cmd_linear_response,
    "cumulants": cmd_cumulants,
    "lr-cumulants": cmd_lr_cumulants,
    "distribution": cmd_distribution,
    "verify-oracle": cmd_verify_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driven-resonator",
        description="Thermodynamics and photon counting statistics of a "
        "frequency-modulated quantum resonator.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} computation")
        p.add_argument("--params", type=Path, default=None, help="JSON configuration file")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument(
            "--seedless",
            action="store_true",
            help="reserved: the tool is deterministic and has no RNG to disable",
        )
        if name in ("cumulants", "lr-cumulants"):
            p.add_argument("--order", type=int, default=4, help="highest cumulant order")
        if name == "distribution":
            p.add_argument("--at-time", type=float, default=None, help="counting duration")
            p.add_argument("--m-max", type=int, default=120, help="half-width of the m window")
        if name == "verify-oracle":
            p.add_argument("--quick", action="store_true", help="skip the driven cross-method case")
    return parser


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message}}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seedless:
        return _error(
            "usage",
            "--seedless is reserved: no computation here consumes randomness",
            2,
        )
    t0 = time.monotonic()
    try:
        config = load_config(args.params) if args.params else _default_config(args.subcommand)
        outdir = args.out
        outdir.mkdir(parents=True, exist_ok=True)
        outputs = COMMANDS[args.subcommand](config, outdir, args)
        write_manifest(outdir, args.subcommand, config, outputs, t0)
    except (ConfigError, DriveError, ValueError) as exc:
        return _error("config", str(exc), 2)
    except (
        IntegrationError,
        PeriodicConvergenceError,
        CountingOverflowError,
        DistributionError,
        TruncationError,
        LeakageError,
        RuntimeError,
    ) as exc:
        return _error("numerical", str(exc), 3)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
