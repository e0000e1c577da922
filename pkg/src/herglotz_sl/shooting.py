"""Initial-value integration of ``-y'' + q y = lam y`` on each half interval.

The left solution starts at ``-a`` from ``(sin alpha, cos alpha)`` and is
carried to ``0-``; the right solution starts at ``b`` from
``(sin beta, cos beta)`` and is carried back to ``0+``.  Integration is split
at potential breakpoints so no step straddles a jump of ``q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegratorFailure

__all__ = [
    "RTOL",
    "ATOL",
    "EndpointState",
    "Trajectory",
    "integrate_left",
    "integrate_right",
    "integrate_from",
    "shoot",
    "ode_residual",
]

RTOL = 1e-12
ATOL = 1e-14


@dataclass(frozen=True)
class EndpointState:
    """Value and derivative of a solution at one point."""

    value: complex
    derivative: complex
    location: float

    def __post_init__(self):
        if not (np.isfinite(self.value) and np.isfinite(self.derivative)):
            raise IntegratorFailure(f"non-finite state at x={self.location}")

    def as_array(self):
        return np.array([self.value, self.derivative])


def _segments(breakpoints, start, stop):
    """Segment endpoints from `start` to `stop` (either direction)."""
    lo, hi = min(start, stop), max(start, stop)
    inner = sorted(x for x in breakpoints if lo + 1e-14 < x < hi - 1e-14)
    pts = [lo, *inner, hi]
    if start > stop:
        pts = pts[::-1]
    return list(zip(pts[:-1], pts[1:]))


def _vector_field(q, lam):
    lam = np.asarray(lam)
    k = lam.size

    def rhs(x, state):
        y = state[:k]
        return np.concatenate([state[k:], (q(x) - lam) * y])

    return rhs


class Trajectory:
    """Dense solution on one half interval.

    Calling the trajectory at abscissae ``x`` returns ``(y, y')``.  The
    underlying integrator interpolants are kept per segment, so evaluation is
    accurate to integrator tolerance anywhere in the half interval.
    """

    def __init__(self, pieces, start, stop, lam):
        self._pieces = pieces  # list of (lo, hi, OdeSolution)
        self.start = float(start)
        self.stop = float(stop)
        self.lam = lam
        ts = np.concatenate([sol.ts for _, _, sol in pieces])
        self.abscissae = np.unique(ts)

    @property
    def interval(self):
        return min(self.start, self.stop), max(self.start, self.stop)

    @property
    def states(self):
        y, dy = self(self.abscissae)
        return [EndpointState(complex(v), complex(d), float(x))
                for v, d, x in zip(y, dy, self.abscissae)]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1)
        lo, hi = self.interval
        if np.any(flat < lo - 1e-12) or np.any(flat > hi + 1e-12):
            raise ValueError(f"abscissae outside [{lo}, {hi}]")
        y = np.empty(flat.shape, dtype=complex)
        dy = np.empty(flat.shape, dtype=complex)
        done = np.zeros(flat.shape, dtype=bool)
        for a, b, sol in self._pieces:
            sel = ~done & (flat >= min(a, b) - 1e-12) & (flat <= max(a, b) + 1e-12)
            if np.any(sel):
                vals = sol(np.clip(flat[sel], min(a, b), max(a, b)))
                y[sel], dy[sel] = vals[0], vals[1]
                done |= sel
        return y.reshape(x.shape), dy.reshape(x.shape)


def _run(problem, lam, y0, start, stop, rtol, atol, dense):
    """Integrate a batch of initial states; returns final states and pieces."""
    lam = np.atleast_1d(np.asarray(lam))
    k = lam.size
    complex_mode = np.iscomplexobj(lam) or np.iscomplexobj(y0)
    dtype = complex if complex_mode else float
    state = np.asarray(y0, dtype=dtype).reshape(2 * k)
    # the integrator controls an RMS norm over all components
    scale = 1.0 / math.sqrt(2 * k) if k > 1 else 1.0
    pieces = []
    q = problem.potential
    for lo, hi in _segments(q.breakpoints, start, stop):
        rhs = _vector_field(q.on_segment(min(lo, hi), max(lo, hi)), lam)
        sol = solve_ivp(rhs, (lo, hi), state, method="DOP853", rtol=rtol * scale,
                        atol=atol * scale, dense_output=dense)
        if sol.status != 0:
            raise IntegratorFailure(f"integration on [{lo}, {hi}] failed: {sol.message}")
        state = sol.y[:, -1]
        if not np.all(np.isfinite(state)):
            raise IntegratorFailure(f"non-finite state after [{lo}, {hi}]")
        if dense:
            pieces.append((lo, hi, sol.sol))
    return state, pieces


def _initial(angle):
    return np.array([math.sin(angle), math.cos(angle)])


def integrate_from(problem, lam, side, value, derivative, rtol=RTOL, atol=ATOL):
    """Solve from the interface outwards with data ``(value, derivative)`` at ``0-`` or ``0+``.

    Used to continue solutions across the interface.
    """
    lam = complex(lam) if np.iscomplexobj(lam) else float(lam)
    y0 = np.array([value, derivative])
    stop = -problem.a if side == "left" else problem.b
    final, pieces = _run(problem, lam, y0, 0.0, stop, rtol, atol, True)
    traj = Trajectory(pieces, 0.0, stop, lam)
    return EndpointState(complex(final[0]), complex(final[1]), stop), traj


def integrate_left(problem, lam, rtol=RTOL, atol=ATOL):
    """Left solution at ``0-`` and its dense trajectory on ``[-a, 0]``."""
    y0 = _initial(problem.alpha)
    final, pieces = _run(problem, lam, y0, -problem.a, 0.0, rtol, atol, True)
    traj = Trajectory(pieces, -problem.a, 0.0, lam)
    return EndpointState(complex(final[0]), complex(final[1]), 0.0), traj


def integrate_right(problem, lam, rtol=RTOL, atol=ATOL):
    """Right solution at ``0+`` and its dense trajectory on ``[0, b]``."""
    y0 = _initial(problem.beta)
    final, pieces = _run(problem, lam, y0, problem.b, 0.0, rtol, atol, True)
    traj = Trajectory(pieces, problem.b, 0.0, lam)
    return EndpointState(complex(final[0]), complex(final[1]), 0.0), traj


def shoot(problem, lams, rtol=RTOL, atol=ATOL, chunk=512):
    """Interface traces for many spectral parameters at once.

    Returns
    -------
    U, dU, V, dV : ndarray
        ``u(0-)``, ``u'(0-)``, ``v(0+)``, ``v'(0+)`` for each entry of `lams`.
    """
    lams = np.asarray(lams)
    shape = lams.shape
    flat = lams.reshape(-1)
    dtype = complex if np.iscomplexobj(flat) else float
    out = np.empty((4, flat.size), dtype=dtype)
    for start in range(0, flat.size, chunk):
        part = flat[start:start + chunk]
        k = part.size
        left0 = np.repeat(_initial(problem.alpha)[:, None], k, axis=1)
        right0 = np.repeat(_initial(problem.beta)[:, None], k, axis=1)
        left, _ = _run(problem, part, left0, -problem.a, 0.0, rtol, atol, False)
        right, _ = _run(problem, part, right0, problem.b, 0.0, rtol, atol, False)
        out[0, start:start + k], out[1, start:start + k] = left[:k], left[k:]
        out[2, start:start + k], out[3, start:start + k] = right[:k], right[k:]
    return tuple(row.reshape(shape) for row in out)


def ode_residual(problem, lam, trajectory, checkpoints=20, step=1e-3):
    """Largest ``|-y'' + q y - lam y|`` over interior checkpoints.

    ``y''`` is estimated by a fourth-order central difference of the
    interpolated derivative.  Checkpoints keep a distance ``2*step`` from the
    ends and from potential breakpoints.
    """
    lo, hi = trajectory.interval
    margin = 2.5 * step
    xs = np.linspace(lo + margin, hi - margin, checkpoints)
    bps = np.asarray(problem.potential.breakpoints, dtype=float)
    if bps.size:
        keep = np.min(np.abs(xs[:, None] - bps[None, :]), axis=1) > margin
        xs = xs[keep]
    offsets = np.array([-2, -1, 1, 2]) * step
    _, d = trajectory(xs[:, None] + offsets[None, :])
    y2 = (d[:, 0] - 8 * d[:, 1] + 8 * d[:, 2] - d[:, 3]) / (12 * step)
    y, _ = trajectory(xs)
    res = -y2 + (problem.potential(xs) - lam) * y
    return float(np.max(np.abs(res))) if res.size else 0.0
