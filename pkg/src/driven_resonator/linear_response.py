"""Closed-form small-signal response and equilibrium counting statistics.

For a weak frequency modulation about omega_bar, each observable responds
through a complex transfer function of the modulation frequency Omega:
the modulus gives the output amplitude per unit drive amplitude, and the
argument gives the phase lead of the output relative to the drive. All
response functions satisfy R(-Omega) = conj(R(Omega)).

The equilibrium (undriven, long-time) photon-exchange statistics are
available in closed form and serve as oracles for the time-dependent
counting machinery: the counting-field-shifted occupation, the saturated
cumulant generating function, and its cumulants of any order.
"""

from __future__ import annotations

import math

import numpy as np

from .model import SystemParams, bose_einstein, bose_einstein_derivative
from .series import equilibrium_occupation_jet, jet_log

__all__ = [
    "temp_response",
    "power_response",
    "heat_response",
    "equilibrium_occupation_s",
    "equilibrium_cgf",
    "equilibrium_cumulants",
    "lr_cumulant_bracket",
    "lr_cumulant_response",
    "harmonic_amplitude",
]


def temp_response(Omega, params: SystemParams):
    """Temperature change per unit frequency-modulation amplitude.

    [i*Omega / (gamma + i*Omega)] * T_e / omega_bar: vanishes for
    quasi-static drives and synchronizes with the drive at high Omega.
    """
    Omega = np.asarray(Omega, dtype=float)
    out = (1j * Omega / (params.gamma + 1j * Omega)) * (params.T_e / params.omega_bar)
    return complex(out) if out.ndim == 0 else out


def power_response(Omega, params: SystemParams):
    """Injected-power change per unit modulation amplitude: i*Omega*n_thermal."""
    Omega = np.asarray(Omega, dtype=float)
    out = 1j * Omega * params.n_thermal + 0.0
    return complex(out) if out.ndim == 0 else out


def heat_response(Omega, params: SystemParams):
    """Heat-current change per unit modulation amplitude.

    omega_bar * [i*gamma*Omega / (gamma + i*Omega)] * dn_B/domega, with the
    occupation derivative taken at omega_bar (negative).
    """
    Omega = np.asarray(Omega, dtype=float)
    nb_prime = bose_einstein_derivative(params.omega_bar, params.T_e)
    out = params.omega_bar * (1j * params.gamma * Omega / (params.gamma + 1j * Omega)) * nb_prime
    return complex(out) if out.ndim == 0 else out


def equilibrium_occupation_s(s, x):
    """Counting-field-shifted equilibrium occupation 1/(exp(x + s) - 1).

    x is the dimensionless hbar*omega_bar/(k_B T_e); s may be real or complex.
    Raises at the pole x + s = 0.
    """
    s = np.asarray(s)
    denom = np.expm1(np.asarray(x, dtype=float) + s)
    if np.any(denom == 0.0):
        raise ZeroDivisionError("equilibrium occupation has a pole at x + s = 0")
    out = 1.0 / denom
    return out[()] if out.ndim == 0 else out


def equilibrium_cgf(s, x):
    """Saturated cumulant generating function of net photon exchanges.

    log(nbar(s)/nbar(0)) + log(nbar(-s)/nbar(0)); even in s, zero at s = 0.
    Only defined on the window |Re s| < x where the stationary exchange
    distribution is normalizable; outside it a ValueError is raised.
    """
    s = np.asarray(s)
    if np.any(np.abs(np.real(s)) >= x):
        raise ValueError("counting field outside the normalizability window |Re s| < x")
    n0 = equilibrium_occupation_s(0.0, x)
    out = np.log(equilibrium_occupation_s(s, x) / n0) + np.log(
        equilibrium_occupation_s(-s, x) / n0
    )
    return out[()] if out.ndim == 0 else out


def equilibrium_cumulants(x, max_order: int) -> np.ndarray:
    """Cumulants of the saturated exchange distribution, orders 1..max_order.

    Odd orders vanish identically; the second and fourth have the closed
    forms 2*n*(1+n) and 2*n*(1+n)*(1 + 6n + 6n^2) with n the thermal
    occupation; higher even orders come from series-expanding the saturated
    generating function.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    out = np.zeros(max_order)
    n = equilibrium_occupation_s(0.0, x)
    if max_order >= 2:
        out[1] = 2.0 * n * (1.0 + n)
    if max_order >= 4:
        out[3] = out[1] * (1.0 + 6.0 * n + 6.0 * n * n)
    if max_order >= 6:
        jet = equilibrium_occupation_jet(x, max_order)
        jet_rev = np.array([(-1) ** k for k in range(max_order + 1)]) * jet
        cgf = jet_log(jet / jet[0]) + jet_log(jet_rev / jet_rev[0])
        for k in range(6, max_order + 1, 2):
            out[k - 1] = cgf[k] * math.factorial(k)
    return out


def lr_cumulant_bracket(order: int, x: float) -> float:
    """Ratio of the order-k response to the first-cumulant response.

    sum_{l=0}^{k-1} C(k,l) * nbar^(l)(0) / nbar(0), with the derivatives of
    the shifted occupation generated by series arithmetic (exact to rounding,
    unlike numeric differencing).
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    jet = equilibrium_occupation_jet(x, order - 1)
    total = 0.0
    for l in range(order):
        total += math.comb(order, l) * jet[l] * math.factorial(l)
    return total / jet[0]


def lr_cumulant_response(order: int, Omega, params: SystemParams):
    """Order-k cumulant modulation per unit frequency-modulation amplitude.

    The first cumulant responds as [gamma/(gamma + i*Omega)] * (1+n) * n / T_e
    (n the thermal occupation); order k scales that by the binomial bracket
    of shifted-occupation derivatives. Reduces to the first-cumulant formula
    identically at k = 1.
    """
    Omega = np.asarray(Omega, dtype=float)
    n = params.n_thermal
    first = (params.gamma / (params.gamma + 1j * Omega)) * (1.0 + n) * n / params.T_e
    out = lr_cumulant_bracket(order, params.x) * first
    return complex(out) if out.ndim == 0 else out


def harmonic_amplitude(t, series, Omega: float, phase: float = 0.0) -> complex:
    """Complex fundamental amplitude of a sampled periodic series.

    Returns A such that series(t) ~ Im(A * exp(i*(Omega*t + phase))) plus DC
    and higher harmonics, i.e. |A| is the sine amplitude and arg(A) the phase
    lead relative to sin(Omega*t + phase). The samples must span an integer
    number of periods; for smooth periodic data the trapezoid rule used here
    converges spectrally.
    """
    t = np.asarray(t, dtype=float)
    series = np.asarray(series)
    span = t[-1] - t[0]
    h = 2.0 / span * np.trapezoid(series * np.exp(-1j * (Omega * t + phase)), t)
    return 1j * h
