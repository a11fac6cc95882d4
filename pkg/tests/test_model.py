import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driven_resonator.model import (
    ConfigError,
    DriveError,
    DriveWaveform,
    SimulationGrid,
    SystemParams,
    bose_einstein,
    config_from_dict,
    config_to_dict,
    discontinuities,
    drive_eval,
)

TAU = 2.0 * math.pi / 0.1


# -- Bose-Einstein occupation -------------------------------------------------


def test_bose_einstein_reference_value():
    # direct evaluation at x = 1/4: 1/(e^0.25 - 1)
    assert bose_einstein(1.0, 4.0) == pytest.approx(3.520812, abs=5e-7)


def test_bose_einstein_low_temperature_limit():
    assert bose_einstein(1.0, 0.005) < 1e-80


def test_bose_einstein_unit_occupation():
    assert bose_einstein(1.0, 1.0 / math.log(2.0)) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("omega,T", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_bose_einstein_domain_errors(omega, T):
    with pytest.raises(ValueError):
        bose_einstein(omega, T)


@given(
    omega=st.floats(0.05, 20.0),
    T=st.floats(0.05, 50.0),
)
@settings(max_examples=100, deadline=None)
def test_detailed_balance_identity(omega, T):
    n = bose_einstein(omega, T)
    assert n > 0.0
    assert n / (1.0 + n) == pytest.approx(math.exp(-omega / T), rel=1e-13)


def test_bose_einstein_monotonicity():
    omegas = np.linspace(0.2, 3.0, 40)
    n = bose_einstein(omegas, 1.5)
    assert np.all(np.diff(n) < 0.0)
    temps = np.linspace(0.2, 8.0, 40)
    n_t = np.array([bose_einstein(1.0, T) for T in temps])
    assert np.all(np.diff(n_t) > 0.0)


# -- parameter validation -----------------------------------------------------


def test_params_validation():
    with pytest.raises(ConfigError):
        SystemParams(omega_bar=0.0)
    with pytest.raises(ConfigError):
        SystemParams(gamma=-0.1)
    with pytest.raises(ConfigError):
        SystemParams(T_e=0.0)


def test_weak_coupling_advisory_warns_but_accepts():
    with pytest.warns(UserWarning):
        p = SystemParams(omega_bar=1.0, gamma=1.5, T_e=1.0)
    assert p.gamma == 1.5


# -- drive evaluation ----------------------------------------------------------


def test_harmonic_drive_matches_sine():
    d = DriveWaveform(kind="harmonic", omega_bar=1.0, amplitude=0.1, period=TAU)
    assert drive_eval(d, 0.0) == pytest.approx(1.0, abs=1e-15)
    t = np.linspace(0.0, 2 * TAU, 101)
    assert np.allclose(d.omega(t), 1.0 + 0.1 * np.sin(0.1 * t), atol=1e-14)


def test_constant_drive_identity():
    d = DriveWaveform(kind="constant", omega_bar=1.0)
    assert drive_eval(d, 123.4) == 1.0


def test_square_quarter_period_values():
    d = DriveWaveform(kind="square", omega_bar=1.0, amplitude=0.7, period=TAU)
    vals = [d.omega(t) for t in (TAU / 4, 3 * TAU / 4, 5 * TAU / 4)]
    assert vals == pytest.approx([1.7, 0.3, 1.7])


def test_square_right_continuity_at_jump():
    d = DriveWaveform(kind="square", omega_bar=1.0, amplitude=0.7, period=TAU)
    tj = d.jump_times(0.0, TAU)[1]
    assert d.omega(tj) == pytest.approx(0.3)
    assert d.omega(tj, side=-1) == pytest.approx(1.7)


def test_square_discontinuities_per_period():
    d = DriveWaveform(kind="square", omega_bar=1.0, amplitude=0.7, period=TAU)
    jumps = discontinuities(d, 0.0, TAU)
    assert jumps == pytest.approx([0.0, TAU / 2])


def test_sawtooth_discontinuities_are_resets():
    d = DriveWaveform(kind="sawtooth", omega_bar=1.0, amplitude=0.7, period=TAU)
    jumps = discontinuities(d, 0.0, 2 * TAU)
    assert jumps == pytest.approx([0.0, TAU])
    before, after = d.jump_values(TAU)
    assert before == pytest.approx(1.7)
    assert after == pytest.approx(0.3)


def test_smooth_drives_have_no_discontinuities():
    for kind in ("constant", "harmonic"):
        d = DriveWaveform(
            kind=kind,
            omega_bar=1.0,
            amplitude=0.0 if kind == "constant" else 0.3,
            period=TAU,
        )
        assert discontinuities(d, 0.0, 5 * TAU).size == 0


@pytest.mark.parametrize("kind", ["square", "sawtooth", "harmonic"])
def test_zero_mean_modulation(kind):
    d = DriveWaveform(kind=kind, omega_bar=1.0, amplitude=0.7, period=TAU, phase=0.3)
    # midpoint rule over whole periods, anchored at a jump edge so each cell
    # is smooth: exact for the piecewise-linear kinds, spectral for harmonic
    jumps = d.jump_times(0.0, TAU)
    origin = jumps[0] if jumps.size else 0.0
    n = 4096
    t = origin + (np.arange(n) + 0.5) * (2 * TAU / n)
    assert np.mean(d.omega(t)) == pytest.approx(1.0, abs=1e-9)


def test_drive_positivity_guard():
    with pytest.raises(DriveError):
        DriveWaveform(kind="square", omega_bar=1.0, amplitude=1.0, period=TAU)
    with pytest.raises(DriveError):
        DriveWaveform(kind="harmonic", omega_bar=1.0, amplitude=1.2, period=TAU)


def test_tabulated_interpolation_and_slopes():
    d = DriveWaveform(
        kind="tabulated", omega_bar=1.0, knots=((0.0, 1.0), (1.0, 2.0), (3.0, 1.0))
    )
    assert d.omega(0.5) == pytest.approx(1.5)
    assert d.omega(2.0) == pytest.approx(1.5)
    assert d.slope(0.5) == pytest.approx(1.0)
    assert d.slope(2.0) == pytest.approx(-0.5)
    # knots are slope breaks, not value jumps
    assert d.jump_times(0.0, 3.0).size == 0
    assert d.breakpoints(0.5, 3.0) == pytest.approx([1.0])
    with pytest.raises(DriveError):
        d.omega(3.5)


def test_tabulated_validation():
    with pytest.raises(DriveError):
        DriveWaveform(kind="tabulated", omega_bar=1.0, knots=((0.0, 1.0),))
    with pytest.raises(DriveError):
        DriveWaveform(kind="tabulated", omega_bar=1.0, knots=((0.0, 1.0), (0.0, 2.0)))
    with pytest.raises(DriveError):
        DriveWaveform(kind="tabulated", omega_bar=1.0, knots=((0.0, 1.0), (1.0, -2.0)))


def test_phase_offset_shifts_square_edges():
    d = DriveWaveform(kind="square", omega_bar=1.0, amplitude=0.5, period=TAU, phase=np.pi / 2)
    jumps = d.jump_times(0.0, TAU)
    assert jumps == pytest.approx([TAU / 4, 3 * TAU / 4])


# -- grid and configuration ----------------------------------------------------


def test_grid_validation():
    with pytest.raises(ConfigError):
        SimulationGrid(t_start=1.0, t_end=1.0)
    with pytest.raises(ConfigError):
        SimulationGrid(dt_max=0.0)
    with pytest.raises(ConfigError):
        SimulationGrid(n_samples=1)


def _doc(kind="harmonic", **drive_extra):
    return {
        "system": {"omega_bar": 1.0, "gamma": 0.1, "T_e": 1.5},
        "drive": {"kind": kind, "amplitude": 0.1, "period": TAU, "phase": 0.0, **drive_extra},
        "grid": {
            "t_start": 0.0,
            "t_end": 100.0,
            "dt_max": None,
            "n_samples": 201,
            "relax_periods": None,
        },
    }


def test_unknown_keys_are_hard_errors():
    bad = _doc()
    bad["extra"] = 1
    with pytest.raises(ConfigError):
        config_from_dict(bad)
    bad = _doc()
    bad["system"]["hbar"] = 1
    with pytest.raises(ConfigError):
        config_from_dict(bad)
    bad = _doc()
    bad["grid"]["steps"] = 10
    with pytest.raises(ConfigError):
        config_from_dict(bad)


def test_missing_section_is_an_error():
    doc = _doc()
    del doc["grid"]
    with pytest.raises(ConfigError):
        config_from_dict(doc)


@given(
    gamma=st.floats(0.0, 0.9),
    T_e=st.floats(0.1, 10.0),
    amplitude=st.floats(0.0, 0.9),
    period=st.floats(1.0, 200.0),
    phase=st.floats(-3.0, 3.0),
    n_samples=st.integers(2, 5000),
)
@settings(max_examples=60, deadline=None)
def test_config_roundtrip_is_exact(gamma, T_e, amplitude, period, phase, n_samples):
    doc = {
        "system": {"omega_bar": 1.0, "gamma": gamma, "T_e": T_e},
        "drive": {"kind": "harmonic", "amplitude": amplitude, "period": period, "phase": phase},
        "grid": {"t_start": 0.0, "t_end": period, "n_samples": n_samples},
    }
    config = config_from_dict(doc)
    echoed = json.loads(json.dumps(config_to_dict(config)))
    again = config_from_dict(echoed)
    assert again == config


def test_config_file_roundtrip(tmp_path):
    from driven_resonator.model import dump_config, load_config

    config = config_from_dict(_doc(kind="tabulated", knots=[[0.0, 1.0], [7.5, 1.25]]))
    path = tmp_path / "config.json"
    dump_config(config, path)
    assert load_config(path) == config
