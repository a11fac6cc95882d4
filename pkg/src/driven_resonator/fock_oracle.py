"""Independent brute-force verification in a truncated Fock space.

Everything else in this package reduces the open-system dynamics to a few
scalar ODEs by exploiting the thermal form of the state. This module does
not: it evolves the full density matrix (vectorized over the truncated
number basis) under the complete generator

    L(s) rho = -i omega [N, rho]
             + gamma (1 + n_B) (e^s  a rho a+ - {a+ a, rho}/2)
             + gamma n_B       (e^-s a+ rho a - {a a+, rho}/2)

with the counting-field weights e^{+-s} attached to the emission and
absorption jump terms, and it also evolves the transfer-resolved ladder of
density matrices rho(m) coupled by those jumps. Agreement between the
scalar reduction and these two routes certifies the reduction.

The generator is exposed both as a dense matrix on vectorized states (for
small problems and structural tests) and as a matrix-free action used by
the integrators; the two are tied together by tests. Dense storage is
capped at a truncation of 80 levels - this is a desk-scale verification
engine, not a production solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import DriveWaveform, SystemParams, bose_einstein
from .stepping import integrate_segmented

__all__ = [
    "TruncationError",
    "LeakageError",
    "N_MAX_CAP",
    "thermal_state",
    "apply_tilted_generator",
    "build_tilted_generator",
    "evolve_fock",
    "m_resolved_evolve",
    "relax_fock_periodic",
    "total_variation",
    "FockTraceSeries",
    "MResolvedSeries",
]

N_MAX_CAP = 80
ORACLE_RTOL = 1e-10
ORACLE_ATOL = 1e-10
TOP_LEVEL_TOL = 1e-8


class TruncationError(RuntimeError):
    """Raised when probability reaches the highest retained Fock level."""


class LeakageError(RuntimeError):
    """Raised when probability reaches the edge of the transfer window."""


def _check_cap(n_max: int):
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    if n_max > N_MAX_CAP:
        raise ValueError(f"n_max capped at {N_MAX_CAP} for dense verification")


@lru_cache(maxsize=8)
def _tables(n_max: int):
    j = np.arange(n_max + 1)
    diff = (j[:, None] - j[None, :]).astype(float)
    ssum = (j[:, None] + j[None, :]).astype(float)
    # truncated a a+ is diag(1, ..., n_max, 0): the top level loses its
    # absorption loss term exactly as it has no absorption gain, which keeps
    # the truncated generator exactly trace-preserving
    q = (j + 1.0).astype(float)
    q[n_max] = 0.0
    qsum = q[:, None] + q[None, :]
    w = np.sqrt(np.outer(j[1:], j[1:]))  # sqrt(j*k) for j,k >= 1
    return diff, ssum, qsum, w


def thermal_state(n_occ: float, n_max: int) -> np.ndarray:
    """Thermal density matrix with mean occupation n_occ, truncated at n_max.

    Diagonal with geometric populations proportional to (n/(1+n))**k,
    renormalized over the retained levels. Rejected if the truncation would
    hold visible probability at the top level.
    """
    _check_cap(n_max)
    if n_occ < 0.0:
        raise ValueError("n_occ must be non-negative")
    q = n_occ / (1.0 + n_occ)
    if q > 0.0 and q**n_max > TOP_LEVEL_TOL:
        raise TruncationError(
            f"(n/(1+n))^n_max = {q**n_max:.2e} > {TOP_LEVEL_TOL}; raise n_max"
        )
    pops = q ** np.arange(n_max + 1)
    pops /= pops.sum()
    return np.diag(pops).astype(complex)


def apply_tilted_generator(rho: np.ndarray, omega: float, n_b: float, gamma: float,
                           tilt_emit=1.0, tilt_absorb=1.0) -> np.ndarray:
    """Action of the tilted generator on one or a stack of density matrices.

    rho has shape (..., n+1, n+1); tilt_emit/tilt_absorb are e^s and e^-s and
    may broadcast over the leading axes. tilt = 1 gives the plain generator.
    """
    n_max = rho.shape[-1] - 1
    diff, ssum, qsum, w = _tables(n_max)
    emit = gamma * (1.0 + n_b)
    absorb = gamma * n_b
    te = np.asarray(tilt_emit)
    ta = np.asarray(tilt_absorb)
    if te.ndim:
        te = te[..., None, None]
    if ta.ndim:
        ta = ta[..., None, None]
    out = (-1j * omega) * diff * rho
    out -= ((0.5 * emit) * ssum + (0.5 * absorb) * qsum) * rho
    out[..., :-1, :-1] += emit * te * (w * rho[..., 1:, 1:])   # a rho a+
    out[..., 1:, 1:] += absorb * ta * (w * rho[..., :-1, :-1])  # a+ rho a
    return out


def build_tilted_generator(s, omega: float, params: SystemParams, n_max: int) -> np.ndarray:
    """Dense tilted generator on row-major vectorized density matrices.

    At s = 0 this is the plain dissipative generator; the left trace
    functional annihilates it there (trace preservation).
    """
    _check_cap(n_max)
    dim = n_max + 1
    n_b = bose_einstein(omega, params.T_e)
    a = np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)
    a_dag = a.conj().T
    num = a_dag @ a        # diag(0..n_max), exact under truncation
    a_adag = a @ a_dag     # diag(1..n_max, 0): truncated product
    eye = np.eye(dim, dtype=complex)
    es, ems = np.exp(s), np.exp(-s)

    def left(A):
        return np.kron(A, eye)

    def right(B):  # rho @ B  ->  kron(I, B.T) on row-major vec
        return np.kron(eye, B.T)

    def sandwich(A, B):  # A rho B
        return np.kron(A, B.T)

    gen = -1j * omega * (left(num) - right(num))
    gen += params.gamma * (1.0 + n_b) * (
        es * sandwich(a, a_dag) - 0.5 * (left(num) + right(num))
    )
    gen += params.gamma * n_b * (
        ems * sandwich(a_dag, a) - 0.5 * (left(a_adag) + right(a_adag))
    )
    return gen


@dataclass(frozen=True)
class FockTraceSeries:
    """Generating-function traces tr rho(s, t) from the Fock evolution."""

    t: np.ndarray
    s: np.ndarray
    trace: np.ndarray         # shape (len(t), len(s)), complex
    occupation: np.ndarray    # number-weighted trace tr(a+ a rho), same shape
    final_states: np.ndarray  # shape (len(s), dim, dim)


@dataclass(frozen=True)
class MResolvedSeries:
    """Transfer-resolved probabilities p(m, t) = tr rho(m, t)."""

    t: np.ndarray
    m: np.ndarray
    p: np.ndarray             # shape (len(t), 2*m_window+1)
    final_states: np.ndarray  # shape (2*m_window+1, dim, dim)


def _drive_scalars(drive: DriveWaveform, T_e: float):
    def at(t, side):
        w = drive.omega(t, side)
        return w, 1.0 / math.expm1(w / T_e)

    return at


def evolve_fock(
    rho0: np.ndarray,
    params: SystemParams,
    drive: DriveWaveform,
    s,
    t_span,
    t_eval=None,
    *,
    rtol: float = ORACLE_RTOL,
    atol: float = ORACLE_ATOL,
    check_truncation: bool = True,
) -> FockTraceSeries:
    """Evolve vectorized density matrices under the tilted generator.

    s may be a scalar or 1-D array; one copy of rho0 is propagated per value,
    all sharing the integrator's adaptive steps (the runs are independent, so
    shared stepping cannot couple them). Truncation health is checked at all
    sample times: the top-level population must stay below TOP_LEVEL_TOL
    relative to the trace scale.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    dim = rho0.shape[-1]
    _check_cap(dim - 1)
    tilts_e = np.exp(s_arr)
    tilts_a = np.exp(-s_arr)
    gamma, T_e = params.gamma, params.T_e
    scalars = _drive_scalars(drive, T_e)
    shape = (s_arr.size, dim, dim)

    def rhs(t, y, side):
        w, n_b = scalars(t, side)
        rho = y.reshape(shape)
        return apply_tilted_generator(rho, w, n_b, gamma, tilts_e, tilts_a).ravel()

    y0 = np.broadcast_to(rho0.astype(complex), shape).ravel().copy()
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t_eval is None:
        t_eval = np.array([t0, t1])
    res = integrate_segmented(
        rhs,
        (t0, t1),
        y0,
        breakpoints=drive.breakpoints(t0, t1),
        t_eval=np.asarray(t_eval, dtype=float),
        rtol=rtol,
        atol=atol,
    )
    states = res.y.reshape(len(res.t), *shape)
    traces = np.einsum("tsii->ts", states)
    levels = np.arange(dim)
    occupation = np.einsum("tsii,i->ts", states, levels)
    if check_truncation:
        top = np.abs(states[:, :, dim - 1, dim - 1])
        scale = np.maximum(1.0, np.abs(traces))
        if np.any(top > TOP_LEVEL_TOL * scale):
            raise TruncationError(
                f"top Fock level reached {np.max(top / scale):.2e}; raise n_max"
            )
    return FockTraceSeries(
        t=res.t,
        s=s_arr,
        trace=traces,
        occupation=occupation,
        final_states=res.y_final.reshape(shape),
    )


def m_resolved_evolve(
    rho0: np.ndarray,
    params: SystemParams,
    drive: DriveWaveform,
    m_window: int,
    t_span,
    t_eval=None,
    *,
    rtol: float = ORACLE_RTOL,
    atol: float = ORACLE_ATOL,
) -> MResolvedSeries:
    """Evolve the transfer-resolved ladder rho(m), m in [-m_window, m_window].

    Counting starts at t_span[0] with all weight in m = 0. Emission feeds
    rho(m) from rho(m-1), absorption from rho(m+1); the ladder edges must
    stay unpopulated (leakage below TOP_LEVEL_TOL) or the run is rejected.
    """
    if m_window < 1:
        raise ValueError("m_window must be >= 1")
    dim = rho0.shape[-1]
    _check_cap(dim - 1)
    n_slots = 2 * m_window + 1
    diff, ssum, qsum, w = _tables(dim - 1)
    gamma, T_e = params.gamma, params.T_e
    scalars = _drive_scalars(drive, T_e)
    shape = (n_slots, dim, dim)

    def rhs(t, y, side):
        w0, n_b = scalars(t, side)
        emit = gamma * (1.0 + n_b)
        absorb = gamma * n_b
        rho = y.reshape(shape)
        out = (-1j * w0) * diff * rho
        out -= ((0.5 * emit) * ssum + (0.5 * absorb) * qsum) * rho
        out[1:, :-1, :-1] += emit * (w * rho[:-1, 1:, 1:])
        out[:-1, 1:, 1:] += absorb * (w * rho[1:, :-1, :-1])
        return out.ravel()

    y0 = np.zeros(shape, dtype=complex)
    y0[m_window] = rho0
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t_eval is None:
        t_eval = np.array([t0, t1])
    res = integrate_segmented(
        rhs,
        (t0, t1),
        y0.ravel(),
        breakpoints=drive.breakpoints(t0, t1),
        t_eval=np.asarray(t_eval, dtype=float),
        rtol=rtol,
        atol=atol,
    )
    states = res.y.reshape(len(res.t), *shape)
    p = np.einsum("tmii->tm", states).real
    if np.any(np.abs(p[:, 0]) > TOP_LEVEL_TOL) or np.any(np.abs(p[:, -1]) > TOP_LEVEL_TOL):
        raise LeakageError("probability reached the transfer-window edge; raise m_window")
    return MResolvedSeries(
        t=res.t,
        m=np.arange(-m_window, m_window + 1),
        p=p,
        final_states=res.y_final.reshape(shape),
    )


def relax_fock_periodic(
    params: SystemParams,
    drive: DriveWaveform,
    periods: int | None = None,
    n_max: int = 40,
    *,
    certificate_tol: float = 1e-7,
) -> tuple[float, np.ndarray]:
    """Fock-space route to the periodic state: (epoch, density matrix).

    Starts from reservoir equilibrium and evolves the plain (s = 0)
    generator for a whole number of periods; certified by comparing the
    state one further period later in the max norm.
    """
    tau = drive.period
    if periods is None:
        periods = max(2, math.ceil(30.0 / max(params.gamma, 1e-12) / tau))
    rho0 = thermal_state(params.n_thermal, n_max)
    epoch = periods * tau
    run = evolve_fock(rho0, params, drive, 0.0, (0.0, epoch), t_eval=[epoch])
    rho_epoch = run.final_states[0]
    again = evolve_fock(rho_epoch, params, drive, 0.0, (epoch, epoch + tau), t_eval=[epoch + tau])
    defect = float(np.max(np.abs(again.final_states[0] - rho_epoch)))
    if defect > certificate_tol:
        raise RuntimeError(
            f"Fock periodic-state certificate {defect:.2e} above {certificate_tol:.1e}"
        )
    return epoch, rho_epoch


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """Half the absolute difference mass between two distributions."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("total_variation requires a common transfer window")
    return 0.5 * float(np.abs(p - q).sum())
