"""Full counting statistics of net photon exchanges with the reservoir.

The statistics of the net number m of photons emitted into the reservoir
during a counting window are encoded in a generating function whose
logarithm C(s, t) and companion counting-field-shifted occupation n(s, t)
obey a closed pair of ODEs:

    dC/dt = gamma*(e^s - 1)*n_s*(1 + n_B) + gamma*(e^-s - 1)*n_B*(1 + n_s)
    dn_s/dt = gamma*(e^s - 1)*n_s^2*(1 + n_B)
            + gamma*(e^-s - 1)*n_B*(1 + n_s)^2 + gamma*(n_B - n_s)

with n_B evaluated at the instantaneous drive frequency. Counting starts
with C = 0 and n_s equal to the physical occupation. At s = 0 the pair
degenerates to the plain occupancy equation.

Three consumers build on the pair:

* cumulants of any order, by propagating the pair as truncated power-series
  jets in s (the hierarchy of coupled ODEs is generated by series
  arithmetic, never derived by hand);
* the full distribution p(m, t), by evaluating the generating function on a
  uniform grid of purely imaginary counting fields and applying a discrete
  Fourier transform — for integer m the inversion integral is exactly a
  Fourier series, so the only error is aliasing of mass outside the window;
* the saturated equilibrium distribution in closed form, as an oracle.

For periodically driven figures, counting begins after the occupation has
relaxed to the certified periodic state, with the reset placed at cycle
phase zero (times congruent to 0 modulo the period).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import relax_to_periodic
from .model import DriveWaveform, SimulationGrid, SystemParams
from .series import exp_minus_one_jet, jet_mul
from .stepping import DEFAULT_ATOL, DEFAULT_RTOL, integrate_segmented

__all__ = [
    "CountingOverflowError",
    "DistributionError",
    "CountingSeries",
    "CumulantTrajectories",
    "PhotonDistribution",
    "evolve_counting",
    "cumulant_jet_rhs",
    "cumulant_trajectories",
    "theta_grid_size",
    "distribution",
    "equilibrium_distribution",
    "counting_epoch",
]

# e^C must stay representable in double precision
REAL_CGF_BOUND = 700.0

# highest cumulant order the jet propagation accepts by default
JET_CAPACITY = 8


class CountingOverflowError(RuntimeError):
    """Raised when Re C(s, t) exceeds the representable-exponent guard."""


class DistributionError(RuntimeError):
    """Raised when a reconstructed distribution fails its sanity checks."""


@dataclass(frozen=True)
class CountingSeries:
    """C(s, t) and n(s, t) sampled along a counting window, per s value."""

    t: np.ndarray        # absolute times
    s: np.ndarray        # counting-field values, shape (n_s,)
    cgf: np.ndarray      # shape (len(t), n_s), complex
    occupation: np.ndarray  # shape (len(t), n_s), complex


@dataclass(frozen=True)
class CumulantTrajectories:
    """Cumulants 1..K accumulated since the counting reset."""

    t: np.ndarray          # time since the reset
    epoch: float           # absolute time of the reset
    cumulants: np.ndarray  # shape (len(t), K)
    occupation_jet: np.ndarray  # shape (len(t), K+1), jet coefficients of n(s, t)

    @property
    def order(self) -> int:
        return self.cumulants.shape[1]


@dataclass(frozen=True)
class PhotonDistribution:
    """Probabilities of net photon transfers m in a symmetric window."""

    t: float
    m: np.ndarray
    p: np.ndarray

    @property
    def m_max(self) -> int:
        return int(self.m[-1])

    def mean(self) -> float:
        return float(np.dot(self.m, self.p))

    def central_moment(self, order: int) -> float:
        mu = self.mean()
        return float(np.dot((self.m - mu) ** order, self.p))

    def variance(self) -> float:
        return self.central_moment(2)


def counting_epoch(
    params: SystemParams,
    drive: DriveWaveform,
    grid: SimulationGrid,
    n_init: float | None = None,
):
    """(reset time, occupation at reset) for counting from the periodic state.

    When n_init is given, counting instead starts at grid.t_start from that
    occupation with no relaxation pre-run.
    """
    if n_init is not None:
        return float(grid.t_start), float(n_init)
    periodic = relax_to_periodic(params, drive, grid)
    return periodic.epoch, periodic.start_occupation


def evolve_counting(
    s,
    params: SystemParams,
    drive: DriveWaveform,
    t_span,
    n_init: float,
    t_eval=None,
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    max_step: float = np.inf,
) -> CountingSeries:
    """Propagate the counting pair for one or many counting-field values.

    Counting starts at t_span[0] with C = 0 and n_s = n_init (the physical
    occupation there). s may be a scalar or a 1-D array (real or complex);
    all values share the integrator's adaptive steps.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    ns = s_arr.size
    gamma, T_e = params.gamma, params.T_e
    ge = gamma * np.expm1(s_arr)    # gamma*(e^s - 1)
    ga = gamma * np.expm1(-s_arr)   # gamma*(e^-s - 1)

    t0, t1 = float(t_span[0]), float(t_span[1])
    if t_eval is None:
        t_eval = np.array([t0, t1])

    def rhs(t, y, side):
        # guard during stepping: divergence can kill the stepper before any
        # sample is collected, so the bound must be enforced on the fly
        if np.any(y[:ns].real > REAL_CGF_BOUND):
            raise CountingOverflowError(
                f"Re C exceeded {REAL_CGF_BOUND} at t = {t:.6g}; the "
                "generating function would overflow"
            )
        w = drive.omega(t, side)
        nb = 1.0 / math.expm1(w / T_e)
        n_s = y[ns:]
        one = 1.0 + n_s
        emit = ge * (1.0 + nb)
        absorb = ga * nb
        d_c = emit * n_s + absorb * one
        d_n = emit * n_s * n_s + absorb * one * one + gamma * (nb - n_s)
        return np.concatenate([d_c, d_n])

    y0 = np.concatenate([np.zeros(ns, dtype=complex), np.full(ns, n_init, dtype=complex)])
    res = integrate_segmented(
        rhs,
        (t0, t1),
        y0,
        breakpoints=drive.breakpoints(t0, t1),
        t_eval=np.asarray(t_eval, dtype=float),
        rtol=rtol,
        atol=atol,
        max_step=max_step,
    )
    cgf = res.y[:, :ns]
    if np.any(np.real(cgf) > REAL_CGF_BOUND):
        raise CountingOverflowError(
            f"Re C exceeded {REAL_CGF_BOUND}; the generating function would overflow"
        )
    return CountingSeries(t=res.t, s=s_arr, cgf=cgf, occupation=res.y[:, ns:])


def cumulant_jet_rhs(c_hat, nu, n_b: float, gamma: float, ep1, em1):
    """Time derivatives of the counting-pair jets.

    c_hat and nu are coefficient arrays of C(s, t) and n(s, t) in powers of
    s (coefficient k = cumulant_k / k! and n_k / k!). ep1/em1 are the jets
    of e^s - 1 and e^-s - 1 to the same order. The hand-derived low-order
    hierarchy equations are recovered exactly by these convolutions.
    """
    one_plus_nu = nu.copy()
    one_plus_nu[0] += 1.0
    emit = gamma * (1.0 + n_b)
    absorb = gamma * n_b
    d_c = emit * jet_mul(ep1, nu) + absorb * jet_mul(em1, one_plus_nu)
    d_nu = (
        emit * jet_mul(ep1, jet_mul(nu, nu))
        + absorb * jet_mul(em1, jet_mul(one_plus_nu, one_plus_nu))
        - gamma * nu
    )
    d_nu[0] += gamma * n_b
    return d_c, d_nu


def cumulant_trajectories(
    order: int,
    params: SystemParams,
    drive: DriveWaveform,
    grid: SimulationGrid,
    *,
    n_init: float | None = None,
    capacity: int = JET_CAPACITY,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> CumulantTrajectories:
    """First ``order`` cumulants versus time since the counting reset.

    The counting window has the grid's length; by default it starts at the
    certified periodic state (cycle phase zero), or at grid.t_start with the
    supplied occupation when n_init is given. Orders beyond the configured
    jet capacity are refused.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if order > capacity:
        raise ValueError(f"order {order} exceeds the jet capacity {capacity}")
    k1 = order + 1
    ep1 = exp_minus_one_jet(order, +1)
    em1 = exp_minus_one_jet(order, -1)
    gamma, T_e = params.gamma, params.T_e

    t0, n0 = counting_epoch(params, drive, grid, n_init)
    duration = grid.t_end - grid.t_start
    t1 = t0 + duration
    rel_times = grid.times() - grid.t_start

    def rhs(t, y, side):
        w = drive.omega(t, side)
        nb = 1.0 / math.expm1(w / T_e)
        d_c, d_nu = cumulant_jet_rhs(y[:k1], y[k1:], nb, gamma, ep1, em1)
        return np.concatenate([d_c, d_nu])

    y0 = np.zeros(2 * k1)
    y0[k1] = n0
    res = integrate_segmented(
        rhs,
        (t0, t1),
        y0,
        breakpoints=drive.breakpoints(t0, t1),
        t_eval=t0 + rel_times,
        rtol=rtol,
        atol=atol,
        max_step=grid.dt_max,
    )
    factorials = np.array([math.factorial(k) for k in range(1, k1)])
    return CumulantTrajectories(
        t=rel_times,
        epoch=t0,
        cumulants=res.y[:, 1:k1] * factorials,
        occupation_jet=res.y[:, k1:],
    )


def theta_grid_size(m_max: int) -> int:
    """Power-of-two grid comfortably oversampled against aliasing."""
    return 1 << max(1, int(math.ceil(math.log2(4 * (2 * m_max + 1)))))


def _invert_generating_function(m_values: np.ndarray, mgf: np.ndarray, t: float) -> PhotonDistribution:
    n_theta = mgf.size
    p_full = np.fft.fft(mgf) / n_theta
    p_raw = p_full[np.mod(m_values, n_theta)]

    if np.max(np.abs(p_raw.imag)) > 1e-10:
        raise DistributionError("inversion produced imaginary parts above 1e-10")
    p = p_raw.real.copy()
    total = float(p.sum())
    if abs(total - 1.0) > 1e-8:
        raise DistributionError(
            f"window probabilities sum to {total!r}; enlarge m_max so the "
            "window holds all the mass"
        )
    edge = max(abs(p[0]), abs(p[-1]))
    if edge > 1e-6:
        warnings.warn(
            f"probability {edge:.2e} at the window edge; aliasing likely, "
            "increase m_max",
            stacklevel=3,
        )
    if p.min() < -1e-10:
        raise DistributionError(f"negative probability {p.min():.3e} beyond quadrature noise")
    clipped = -float(p[p < 0.0].sum())
    if clipped > 0.0:
        if clipped >= 1e-8:
            raise DistributionError(
                f"total negative mass {clipped:.3e} too large to clip silently"
            )
        p = np.clip(p, 0.0, None)
        p /= p.sum()
    return PhotonDistribution(t=t, m=m_values, p=p)


def distribution(
    t_count: float,
    m_max: int,
    params: SystemParams,
    drive: DriveWaveform,
    grid: SimulationGrid,
    *,
    n_init: float | None = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> PhotonDistribution:
    """Distribution of net transfers after counting for t_count.

    One counting-pair integration per point of a uniform purely-imaginary
    counting-field grid, then a discrete Fourier transform. The grid runs
    are independent; here they are propagated as one vectorized state.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    if t_count < 0.0:
        raise ValueError("t_count must be non-negative")
    m_values = np.arange(-m_max, m_max + 1)
    if t_count == 0.0:
        p = np.zeros(m_values.size)
        p[m_max] = 1.0
        return PhotonDistribution(t=0.0, m=m_values, p=p)

    n_theta = theta_grid_size(m_max)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    t0, n0 = counting_epoch(params, drive, grid, n_init)
    run = evolve_counting(
        1j * theta,
        params,
        drive,
        (t0, t0 + t_count),
        n0,
        t_eval=[t0 + t_count],
        rtol=rtol,
        atol=atol,
    )
    mgf = np.exp(run.cgf[-1])
    return _invert_generating_function(m_values, mgf, t_count)


def equilibrium_distribution(x, m):
    """Saturated probability of m net transfers: exp(-|m|x) * tanh(x/2)."""
    if not x > 0.0:
        raise ValueError("equilibrium_distribution needs x > 0")
    m = np.asarray(m)
    out = np.exp(-np.abs(m) * x) * math.tanh(x / 2.0)
    return float(out) if out.ndim == 0 else out
