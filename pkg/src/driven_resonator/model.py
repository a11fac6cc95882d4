"""System parameters, drive waveforms, and simulation grids.

Natural units are used throughout the package: hbar = k_B = 1, and every
frequency, rate, temperature, and time is expressed relative to the undriven
resonator frequency ``omega_bar`` (typically set to 1). Temperatures are
therefore the dimensionless combination k_B T / (hbar omega_bar), times are in
units of 1/omega_bar, and energies in units of hbar*omega_bar.

All types here are immutable after construction and all functions are pure,
so everything in this module is safe to share across threads.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "ConfigError",
    "DriveError",
    "SystemParams",
    "DriveWaveform",
    "SimulationGrid",
    "Config",
    "bose_einstein",
    "bose_einstein_derivative",
    "drive_eval",
    "discontinuities",
    "config_from_dict",
    "config_to_dict",
    "load_config",
    "dump_config",
]

DRIVE_KINDS = ("constant", "square", "sawtooth", "harmonic", "tabulated")


class ConfigError(ValueError):
    """Raised for malformed or inconsistent configuration input."""


class DriveError(ValueError):
    """Raised when a drive waveform is invalid (e.g. omega_0(t) <= 0)."""


def bose_einstein(omega, T):
    """Equilibrium occupation 1/(exp(omega/T) - 1) of a mode at frequency omega.

    Strictly positive, strictly decreasing in omega and increasing in T.
    Raises ValueError if omega <= 0 or T <= 0.
    """
    omega = np.asarray(omega, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(omega <= 0.0):
        raise ValueError("bose_einstein requires omega > 0")
    if np.any(T <= 0.0):
        raise ValueError("bose_einstein requires T > 0")
    out = 1.0 / np.expm1(omega / T)
    return float(out) if out.ndim == 0 else out


def bose_einstein_derivative(omega, T):
    """Frequency derivative of the equilibrium occupation (negative)."""
    n = bose_einstein(omega, T)
    return -(n * (1.0 + n)) / np.asarray(T, dtype=float)


@dataclass(frozen=True)
class SystemParams:
    """Resonator and reservoir parameters.

    omega_bar : undriven resonator frequency (sets the unit scale)
    gamma     : coupling rate to the reservoir, in units of omega_bar
    T_e       : reservoir temperature as k_B T_e / (hbar omega_bar)
    """

    omega_bar: float = 1.0
    gamma: float = 0.1
    T_e: float = 1.5

    def __post_init__(self):
        if not self.omega_bar > 0.0:
            raise ConfigError("omega_bar must be positive")
        if self.gamma < 0.0:
            raise ConfigError("gamma must be non-negative")
        if not self.T_e > 0.0:
            raise ConfigError("T_e must be positive")
        if self.gamma >= self.omega_bar:
            # weak-coupling master equation; advisory only, not a hard error
            warnings.warn(
                "gamma >= omega_bar: outside the weak-coupling regime the "
                "master equation becomes questionable",
                stacklevel=2,
            )

    @property
    def x(self) -> float:
        """Dimensionless inverse temperature hbar*omega_bar / (k_B T_e)."""
        return self.omega_bar / self.T_e

    @property
    def n_thermal(self) -> float:
        """Equilibrium occupation at the undriven frequency."""
        return bose_einstein(self.omega_bar, self.T_e)


@dataclass(frozen=True)
class DriveWaveform:
    """Time-dependent resonator frequency omega_0(t).

    kind      : one of "constant", "square", "sawtooth", "harmonic", "tabulated"
    omega_bar : baseline frequency about which the drive modulates
    amplitude : modulation amplitude (peak deviation from omega_bar)
    period    : modulation period tau; the angular drive frequency is 2*pi/tau
    phase     : phase offset in radians added to the cycle variable
    knots     : for "tabulated", ((t0, w0), (t1, w1), ...) with linear
                interpolation between knots; evaluation outside the knot
                range is an error

    Square and sawtooth drives jump at exactly computable times; the value at
    a jump time is the post-jump one (right-continuity). Tabulated knots are
    slope breaks, never value jumps.
    """

    kind: str
    omega_bar: float
    amplitude: float = 0.0
    period: float = 0.0
    phase: float = 0.0
    knots: tuple = ()

    def __post_init__(self):
        if self.kind not in DRIVE_KINDS:
            raise DriveError(f"unknown drive kind {self.kind!r}; expected one of {DRIVE_KINDS}")
        if not self.omega_bar > 0.0:
            raise DriveError("omega_bar must be positive")
        if self.kind == "constant":
            if self.amplitude != 0.0:
                raise DriveError("constant drive must have amplitude 0")
        elif self.kind == "tabulated":
            knots = tuple((float(t), float(w)) for t, w in self.knots)
            object.__setattr__(self, "knots", knots)
            if len(knots) < 2:
                raise DriveError("tabulated drive needs at least two knots")
            times = [t for t, _ in knots]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise DriveError("tabulated knot times must be strictly increasing")
            if any(w <= 0.0 for _, w in knots):
                raise DriveError("tabulated frequencies must be positive")
        else:
            if not self.period > 0.0:
                raise DriveError(f"{self.kind} drive needs period > 0")
            if abs(self.amplitude) >= self.omega_bar:
                raise DriveError(
                    "drive amplitude must satisfy |amplitude| < omega_bar "
                    "so that omega_0(t) stays positive"
                )
        self._check_positive_on_grid()

    # -- evaluation ---------------------------------------------------------

    @property
    def angular_frequency(self) -> float:
        if self.period <= 0.0:
            raise DriveError(f"{self.kind} drive has no period")
        return 2.0 * math.pi / self.period

    @property
    def is_periodic(self) -> bool:
        return self.kind in ("square", "sawtooth", "harmonic")

    @property
    def phase_cycles(self) -> float:
        return self.phase / (2.0 * math.pi)

    def omega(self, t, side: int = +1):
        """omega_0(t); side=-1 selects the left limit at a jump/break time."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if self.kind == "constant":
            out = np.full_like(t, self.omega_bar)
        elif self.kind == "harmonic":
            out = self.omega_bar + self.amplitude * np.sin(
                self.angular_frequency * t + self.phase
            )
        elif self.kind == "square":
            k = self._square_halfindex(t, side)
            out = self.omega_bar + np.where(k % 2 == 0, self.amplitude, -self.amplitude)
        elif self.kind == "sawtooth":
            k, frac = self._sawtooth_cycle(t, side)
            out = self.omega_bar + self.amplitude * (2.0 * frac - 1.0)
        else:  # tabulated
            out = self._tabulated_value(t)
        return float(out[0]) if scalar else out

    def slope(self, t, side: int = +1):
        """d omega_0 / dt; side=-1 selects the left limit at a break time."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if self.kind in ("constant", "square"):
            out = np.zeros_like(t)
        elif self.kind == "harmonic":
            out = self.amplitude * self.angular_frequency * np.cos(
                self.angular_frequency * t + self.phase
            )
        elif self.kind == "sawtooth":
            out = np.full_like(t, 2.0 * self.amplitude / self.period)
        else:
            out = self._tabulated_slope(t, side)
        return float(out[0]) if scalar else out

    # -- discontinuity bookkeeping -------------------------------------------

    def jump_times(self, t_start: float, t_end: float) -> np.ndarray:
        """All value-jump times of omega_0 in the half-open span [t_start, t_end).

        Exact edge locations, no tolerance search; empty for smooth drives.
        """
        if t_end <= t_start:
            return np.empty(0)
        if self.kind == "square":
            return self._edges(t_start, t_end, per_period=2)
        if self.kind == "sawtooth":
            return self._edges(t_start, t_end, per_period=1)
        return np.empty(0)

    def breakpoints(self, t_start: float, t_end: float) -> np.ndarray:
        """Times in [t_start, t_end) where omega_0 or its slope is discontinuous.

        Superset of jump_times; tabulated knots appear here but not there.
        """
        if self.kind == "tabulated":
            times = np.array([t for t, _ in self.knots])
            return times[(times >= t_start) & (times < t_end)]
        return self.jump_times(t_start, t_end)

    def jump_values(self, t_jump: float) -> tuple[float, float]:
        """(omega before, omega after) at a jump time."""
        return self.omega(t_jump, side=-1), self.omega(t_jump, side=+1)

    # -- internals ------------------------------------------------------------

    def _edge(self, j: int, per_period: int) -> float:
        # edge j sits at cycle coordinate j/per_period
        return (j / per_period - self.phase_cycles) * self.period

    def _edges(self, t_start, t_end, per_period):
        lo = math.floor(per_period * (t_start / self.period + self.phase_cycles)) - 1
        hi = math.ceil(per_period * (t_end / self.period + self.phase_cycles)) + 1
        edges = np.array([self._edge(j, per_period) for j in range(lo, hi + 1)])
        return edges[(edges >= t_start) & (edges < t_end)]

    def _square_halfindex(self, t, side):
        u2 = 2.0 * (t / self.period + self.phase_cycles)
        k = np.floor(u2).astype(np.int64)
        # exact edge hits: make evaluation consistent with the advertised
        # edge times from jump_times()
        if side >= 0:
            k = np.where(t == self._edge_array(k + 1, 2), k + 1, k)
        else:
            k = np.where(t == self._edge_array(k, 2), k - 1, k)
        return k

    def _sawtooth_cycle(self, t, side):
        u = t / self.period + self.phase_cycles
        k = np.floor(u).astype(np.int64)
        frac = u - k
        if side >= 0:
            on_edge = t == self._edge_array(k + 1, 1)
            k = np.where(on_edge, k + 1, k)
            frac = np.where(on_edge, 0.0, frac)
        else:
            on_edge = t == self._edge_array(k, 1)
            k = np.where(on_edge, k - 1, k)
            frac = np.where(on_edge, 1.0, frac)
        return k, frac

    def _edge_array(self, j, per_period):
        return (j / per_period - self.phase_cycles) * self.period

    def _tabulated_value(self, t):
        times = np.array([k[0] for k in self.knots])
        freqs = np.array([k[1] for k in self.knots])
        if np.any(t < times[0]) or np.any(t > times[-1]):
            raise DriveError("tabulated drive evaluated outside the knot range")
        return np.interp(t, times, freqs)

    def _tabulated_slope(self, t, side):
        times = np.array([k[0] for k in self.knots])
        freqs = np.array([k[1] for k in self.knots])
        if np.any(t < times[0]) or np.any(t > times[-1]):
            raise DriveError("tabulated drive evaluated outside the knot range")
        seg = np.searchsorted(times, t, side="right" if side >= 0 else "left") - 1
        seg = np.clip(seg, 0, len(times) - 2)
        return (freqs[seg + 1] - freqs[seg]) / (times[seg + 1] - times[seg])

    def _check_positive_on_grid(self):
        # dense sweep plus all breakpoints; parametric kinds are also covered
        # exactly by the |amplitude| < omega_bar constructor check
        if self.kind == "tabulated":
            lo, hi = self.knots[0][0], self.knots[-1][0]
        elif self.kind == "constant":
            return
        else:
            lo, hi = 0.0, self.period
        grid = np.linspace(lo, hi, 1001)
        checkpoints = np.concatenate([grid, self.breakpoints(lo, hi), [hi]])
        vals = self.omega(np.sort(checkpoints))
        if np.any(vals <= 0.0):
            raise DriveError("omega_0(t) must stay positive over the drive")


def drive_eval(drive: DriveWaveform, t):
    """Evaluate omega_0(t) (right-continuous at jumps)."""
    return drive.omega(t)


def discontinuities(drive: DriveWaveform, t_start: float, t_end: float) -> np.ndarray:
    """Sorted value-jump times of the drive in [t_start, t_end)."""
    return drive.jump_times(t_start, t_end)


@dataclass(frozen=True)
class SimulationGrid:
    """Integration window and output sampling.

    t_start, t_end : integration span, units of 1/omega_bar
    dt_max         : maximum integrator step (np.inf = let the stepper choose)
    n_samples      : number of equally spaced output samples, >= 2
    relax_periods  : optional pre-run length, in whole drive periods, used to
                     reach the periodic state; None selects the default
                     heuristic max(10/gamma, 20*tau) rounded up to periods
    """

    t_start: float = 0.0
    t_end: float = 100.0
    dt_max: float = math.inf
    n_samples: int = 1001
    relax_periods: int | None = None

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ConfigError("grid requires t_end > t_start")
        if not self.dt_max > 0.0:
            raise ConfigError("grid requires dt_max > 0")
        if self.n_samples < 2:
            raise ConfigError("grid requires n_samples >= 2")
        if self.relax_periods is not None and self.relax_periods <= 0:
            raise ConfigError("relax_periods must be positive when given")

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_samples)


@dataclass(frozen=True)
class Config:
    system: SystemParams
    drive: DriveWaveform
    grid: SimulationGrid


_SYSTEM_KEYS = {"omega_bar", "gamma", "T_e"}
_DRIVE_KEYS = {"kind", "amplitude", "period", "phase", "knots"}
_GRID_KEYS = {"t_start", "t_end", "dt_max", "n_samples", "relax_periods"}


def _reject_unknown(section: str, given: dict, allowed: set):
    unknown = set(given) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {section!r} section: {sorted(unknown)}")


def config_from_dict(doc: dict) -> Config:
    """Build a Config from a parsed JSON document. Unknown keys are an error."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    _reject_unknown("top-level", doc, {"system", "drive", "grid"})
    for section in ("system", "drive", "grid"):
        if section not in doc:
            raise ConfigError(f"missing configuration section {section!r}")
        if not isinstance(doc[section], dict):
            raise ConfigError(f"configuration section {section!r} must be an object")

    _reject_unknown("system", doc["system"], _SYSTEM_KEYS)
    _reject_unknown("drive", doc["drive"], _DRIVE_KEYS)
    _reject_unknown("grid", doc["grid"], _GRID_KEYS)

    system = SystemParams(**doc["system"])
    drive_args = dict(doc["drive"])
    if "knots" in drive_args and drive_args["knots"] is not None:
        drive_args["knots"] = tuple(tuple(k) for k in drive_args["knots"])
    elif "knots" in drive_args:
        del drive_args["knots"]
    drive = DriveWaveform(omega_bar=system.omega_bar, **drive_args)
    grid_args = dict(doc["grid"])
    if grid_args.get("dt_max") is None:
        grid_args["dt_max"] = math.inf
    return Config(system=system, drive=drive, grid=SimulationGrid(**grid_args))


def config_to_dict(config: Config) -> dict:
    """Inverse of config_from_dict; round-trips every parameter exactly."""
    drive = {
        "kind": config.drive.kind,
        "amplitude": config.drive.amplitude,
        "period": config.drive.period,
        "phase": config.drive.phase,
    }
    if config.drive.kind == "tabulated":
        drive["knots"] = [list(k) for k in config.drive.knots]
    return {
        "system": {
            "omega_bar": config.system.omega_bar,
            "gamma": config.system.gamma,
            "T_e": config.system.T_e,
        },
        "drive": drive,
        "grid": {
            "t_start": config.grid.t_start,
            "t_end": config.grid.t_end,
            "dt_max": config.grid.dt_max if math.isfinite(config.grid.dt_max) else None,
            "n_samples": config.grid.n_samples,
            "relax_periods": config.grid.relax_periods,
        },
    }


def load_config(path) -> Config:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return config_from_dict(doc)


def dump_config(config: Config, path) -> None:
    # json round-trips floats exactly (shortest repr)
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n", encoding="utf-8")
