"""Green's function of the interface problem and its action on data.

Off the coupling poles the kernel is ``u(min(x,t)) v(max(x,t)) / psi`` with
the left and right solutions continued across the interface.  At a pole the
problem splits into two independent half-interval problems and the kernel
is block diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigenvalueLambda, NotAPole
from .grid import GridFunction, cumulative_integral
from .shooting import integrate_from, integrate_left, integrate_right
from .transmission import Variant, extended_solutions, pole_kind

__all__ = [
    "GUARD_RTOL",
    "greens_value",
    "greens_value_pole",
    "greens_matrix",
    "apply_greens",
    "DecoupledSolutions",
    "decoupled_solutions",
]

GUARD_RTOL = 1e-8


def _check_points(x, t):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(x == 0) or np.any(t == 0):
        raise ValueError("the kernel is not defined at the interface point 0")
    return np.broadcast_arrays(x, t)


def _regular_solutions(problem, lam):
    sol = extended_solutions(problem, lam)
    U, dU, V, dV = sol.traces
    scale = (abs(U) + abs(dU)) * (abs(V) + abs(dV)) * (1 + abs(sol.mu)) * (1 + abs(sol.nu))
    if abs(sol.psi) < GUARD_RTOL * max(scale, 1e-300):
        raise EigenvalueLambda(lam, abs(sol.psi))
    return sol


def greens_value(problem, lam, x, t):
    """Kernel value(s) at points off the interface; `x`, `t` broadcast."""
    x, t = _check_points(x, t)
    sol = _regular_solutions(problem, lam)
    lo, hi = np.minimum(x, t), np.maximum(x, t)
    u, _ = sol.u(lo)
    v, _ = sol.v(hi)
    out = u * v / sol.psi
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class DecoupledSolutions:
    """Solution pairs for the two half problems at a coupling pole.

    On the left, ``u`` meets the outer boundary condition and ``w`` the
    decoupled interface condition at ``0-``; on the right ``z`` meets the
    interface condition at ``0+`` and ``v`` the outer one.
    """

    lam: float
    variant: Variant
    u: object
    w: object
    z: object
    v: object
    w_left: complex
    w_right: complex


def decoupled_solutions(problem, lam):
    variant, i, j, _ = pole_kind(problem, lam)
    if variant is Variant.REGULAR:
        raise NotAPole(f"lambda={lam!r} is not a pole of mu or nu")
    lam = float(problem.mu.poles[i]) if i is not None else float(problem.nu.poles[j])
    ul, u = integrate_left(problem, lam)
    vr, v = integrate_right(problem, lam)
    U, dU, V, dV = ul.value, ul.derivative, vr.value, vr.derivative
    if variant is Variant.POLE_OF_MU:
        nu0 = problem.nu(lam)
        w0, left_char = (nu0, -1.0), U + nu0 * dU
    else:
        w0, left_char = (1.0, 0.0), dU
    if variant is Variant.POLE_OF_NU:
        mu0 = problem.mu(lam)
        z0, w_right = (1.0, mu0), dV - mu0 * V
    else:
        z0, w_right = (0.0, 1.0), -V
    # Wronskian u w' - u' w at 0-
    w_left = -left_char
    sl, sr = abs(U) + abs(dU), abs(V) + abs(dV)
    if abs(w_left) < GUARD_RTOL * max(1.0, sl):
        raise EigenvalueLambda(lam, abs(w_left), "left decoupled characteristic")
    if abs(w_right) < GUARD_RTOL * max(1.0, sr):
        raise EigenvalueLambda(lam, abs(w_right), "right decoupled characteristic")
    _, w = integrate_from(problem, lam, "left", *w0)
    _, z = integrate_from(problem, lam, "right", *z0)
    return DecoupledSolutions(lam, variant, u, w, z, v, complex(w_left), complex(w_right))


def greens_value_pole(problem, lam0, x, t):
    """Block-diagonal kernel at a coupling pole; exactly zero on the cross blocks."""
    x, t = _check_points(x, t)
    ds = decoupled_solutions(problem, lam0)
    lo, hi = np.minimum(x, t), np.maximum(x, t)
    out = np.zeros(lo.shape, dtype=complex)
    left = hi < 0
    right = lo > 0
    if np.any(left):
        out[left] = ds.u(lo[left])[0] * ds.w(hi[left])[0] / ds.w_left
    if np.any(right):
        out[right] = ds.z(lo[right])[0] * ds.v(hi[right])[0] / ds.w_right
    return out[()] if out.ndim == 0 else out


def greens_matrix(problem, lam, xs, ts):
    """Kernel on the product grid ``xs x ts``; the pole kernel is used at poles."""
    X, T = np.meshgrid(np.asarray(xs, float), np.asarray(ts, float), indexing="ij")
    if pole_kind(problem, lam)[0] is Variant.REGULAR:
        return greens_value(problem, lam, X, T)
    return greens_value_pole(problem, lam, X, T)


def _pair_apply(x, h, first, second, wr):
    """``(first(x) int_x^end second h + second(x) int_start^x first h) / wr`` on one side."""
    p, dp = first(x)
    s, ds = second(x)
    ip = cumulative_integral(p * h, x)
    is_ = cumulative_integral(s * h, x)
    tail = is_[-1] - is_
    g = (p * tail + s * ip) / wr
    dg = (dp * tail + ds * ip) / wr
    return g, dg


def apply_greens(problem, lam, h):
    """Solve ``(lam - ell) g = h`` with all boundary and interface conditions.

    Parameters
    ----------
    h : GridFunction
        Right-hand side sampled on a uniform mesh.

    Returns
    -------
    GridFunction
        ``g`` with its derivative carried exactly from the integral
        representation, so interface traces involve no differencing.
    """
    mesh = h.mesh
    xl, xr = mesh.left, mesh.right
    if pole_kind(problem, lam)[0] is not Variant.REGULAR:
        ds = decoupled_solutions(problem, lam)
        gl, dgl = _pair_apply(xl, h.left, ds.u, ds.w, ds.w_left)
        gr, dgr = _pair_apply(xr, h.right, ds.z, ds.v, ds.w_right)
        return GridFunction(mesh, gl, gr, dgl, dgr)

    sol = _regular_solutions(problem, lam)
    psi = sol.psi
    ul, dul = sol.u_left(xl)
    vl, dvl = sol.v_left(xl)
    ur, dur = sol.u_right(xr)
    vr, dvr = sol.v_right(xr)
    iu_l = cumulative_integral(ul * h.left, xl)
    iv_l = cumulative_integral(vl * h.left, xl)
    iu_r = cumulative_integral(ur * h.right, xr)
    iv_r = cumulative_integral(vr * h.right, xr)
    # int_{-a}^x u h  and  int_x^b v h  over the whole split interval
    total_v = iv_l[-1] + iv_r[-1]
    Iu_l, Iv_l = iu_l, total_v - iv_l
    Iu_r, Iv_r = iu_l[-1] + iu_r, iv_r[-1] - iv_r
    gl = (ul * Iv_l + vl * Iu_l) / psi
    dgl = (dul * Iv_l + dvl * Iu_l) / psi
    gr = (ur * Iv_r + vr * Iu_r) / psi
    dgr = (dur * Iv_r + dvr * Iu_r) / psi
    return GridFunction(mesh, gl, gr, dgl, dgr)
