import math

import pytest

from driven_resonator.model import DriveWaveform, SystemParams

TAU = 2.0 * math.pi / 0.1  # period of a 0.1*omega_bar modulation


@pytest.fixture
def warm_params():
    """k_B T_e = 1.5 in resonator units."""
    return SystemParams(omega_bar=1.0, gamma=0.1, T_e=1.5)


@pytest.fixture
def hot_params():
    """k_B T_e = 4 in resonator units (x = 0.25)."""
    return SystemParams(omega_bar=1.0, gamma=0.1, T_e=4.0)


@pytest.fixture
def constant_drive():
    return DriveWaveform(kind="constant", omega_bar=1.0)


def harmonic_drive(amplitude: float, period: float = TAU, phase: float = 0.0) -> DriveWaveform:
    return DriveWaveform(
        kind="harmonic", omega_bar=1.0, amplitude=amplitude, period=period, phase=phase
    )
