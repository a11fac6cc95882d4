"""Segmented adaptive ODE integration shared by every time-evolution path.

The right-hand sides in this package are smooth except at drive
discontinuities, so the integrator is an explicit embedded Runge-Kutta 4(5)
pair (scipy's Dormand-Prince RK45) restarted exactly at every breakpoint.
Within a segment the drive is smooth; at a segment's right endpoint the
left limit of the drive must be used, which is what the ``side`` argument
of the RHS callback is for.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

__all__ = ["IntegrationError", "SegmentedResult", "integrate_segmented", "DEFAULT_RTOL", "DEFAULT_ATOL"]

# tight defaults: cheap for the scalar/jet systems and leaves headroom for
# the 1e-9-level periodicity certificates
DEFAULT_RTOL = 1e-12
DEFAULT_ATOL = 1e-12


class IntegrationError(RuntimeError):
    """Raised when the stepper cannot meet its local error target."""


@dataclass
class SegmentedResult:
    t: np.ndarray          # requested sample times
    y: np.ndarray          # states at sample times, shape (len(t), n)
    y_final: np.ndarray    # state at t_end
    breakpoint_times: np.ndarray
    breakpoint_states: np.ndarray  # states at each interior breakpoint
    nfev: int


def integrate_segmented(
    rhs,
    t_span,
    y0,
    *,
    breakpoints=(),
    t_eval=None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    max_step: float = np.inf,
) -> SegmentedResult:
    """Integrate dy/dt = rhs(t, y, side) over t_span with exact restarts.

    rhs        : callable (t, y, side) -> dy; side is -1 only when t is the
                 right endpoint of the current smooth segment, +1 otherwise
    breakpoints: times where rhs is discontinuous; only those strictly inside
                 t_span are used, each becomes a mandatory step boundary
    t_eval     : sorted sample times within t_span (may include endpoints)
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("integrate_segmented requires t_span[1] > t_span[0]")
    y0 = np.asarray(y0)

    bps = np.asarray(sorted(set(float(b) for b in np.atleast_1d(breakpoints))), dtype=float)
    bps = bps[(bps > t0) & (bps < t1)]
    boundaries = np.concatenate([[t0], bps, [t1]])

    if t_eval is None:
        t_eval = np.array([t0, t1])
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval.size and (t_eval[0] < t0 or t_eval[-1] > t1):
        raise ValueError("t_eval must lie within t_span")

    samples_t: list[float] = []
    samples_y: list[np.ndarray] = []
    bp_states: list[np.ndarray] = []
    nfev = 0

    y = y0
    for i in range(len(boundaries) - 1):
        a, b = boundaries[i], boundaries[i + 1]
        lo = np.searchsorted(t_eval, a, side="left" if i == 0 else "right")
        hi = np.searchsorted(t_eval, b, side="right")
        seg_eval = t_eval[lo:hi]
        want_b = seg_eval.size > 0 and seg_eval[-1] == b
        run_eval = seg_eval if want_b else np.concatenate([seg_eval, [b]])

        def seg_rhs(t, yy, _b=b):
            return rhs(t, yy, -1 if t == _b else +1)

        sol = solve_ivp(
            seg_rhs,
            (a, b),
            y,
            method="RK45",
            t_eval=run_eval,
            rtol=rtol,
            atol=atol,
            max_step=max_step,
            dense_output=False,
        )
        nfev += sol.nfev
        if not sol.success:
            raise IntegrationError(
                f"step-size failure in [{a}, {b}]: {sol.message}"
            )
        y = sol.y[:, -1].copy()
        keep = sol.y[:, : seg_eval.size] if not want_b else sol.y
        samples_t.extend(seg_eval.tolist())
        for col in range(seg_eval.size):
            samples_y.append(keep[:, col].copy())
        if i < len(boundaries) - 2:
            bp_states.append(y.copy())

    return SegmentedResult(
        t=np.asarray(samples_t),
        y=np.asarray(samples_y) if samples_y else np.empty((0, y0.size), dtype=y.dtype),
        y_final=y,
        breakpoint_times=bps,
        breakpoint_states=np.asarray(bp_states) if bp_states else np.empty((0, y0.size), dtype=y.dtype),
        nfev=nfev,
    )
