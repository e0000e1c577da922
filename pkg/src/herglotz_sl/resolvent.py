r"""Block operator on ``L2 + C^N* + C^M*`` and its resolvent.

Each coupling contributes a finite block.  For a coupling with positive
slope the block is built from the partial fractions of its reciprocal,
otherwise from the coupling itself:

==========================  ===============================  ==========================================
block                       vector row                       domain condition
==========================  ===============================  ==========================================
mu, slope > 0               ``beta*D'y + [gamma] y1``        ``-y(0+) + sigma*D'y - <y1, beta> = 0``
mu, slope = 0               ``b*y(0+) + [c] y1``             ``D'y - xi*y(0+) - <y1, b> = 0``
nu, slope > 0               ``alpha*Dy + [delta] y2``        ``y'(0-) - tau*Dy - <y2, alpha> = 0``
nu, slope = 0               ``a*y'(0-) + [d] y2``            ``-Dy + zeta*y'(0-) - <y2, a> = 0``
==========================  ===============================  ==========================================

Here ``Dy = y(0+) - y(0-)`` and ``D'y = y'(0+) - y'(0-)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation, EigenvalueLambda
from .greens import GUARD_RTOL, apply_greens
from .grid import BlockVector, GridFunction
from .shooting import integrate_left, integrate_right
from .transmission import Variant, extended_solutions, pole_kind

__all__ = [
    "DOMAIN_RTOL",
    "ResolventCoefficients",
    "domain_residuals",
    "check_domain",
    "apply_L",
    "lift_eigenfunction",
    "eigenfunctions",
    "resolvent_coefficients",
    "resolvent_apply",
    "round_trip_defect",
]

DOMAIN_RTOL = 1e-8


def _traces(f):
    return f.value_minus, f.value_plus, f.deriv_minus, f.deriv_plus


def _trace_scale(Y):
    fm, fp, dm, dp = _traces(Y.f)
    parts = [1.0, abs(fm), abs(fp), abs(dm), abs(dp)]
    parts += [float(np.max(np.abs(Y.f1)))] if Y.f1.size else []
    parts += [float(np.max(np.abs(Y.f2)))] if Y.f2.size else []
    return max(parts)


def _check_sizes(problem, Y):
    n1, n2 = problem.mu_block.size, problem.nu_block.size
    if Y.f1.size != n1 or Y.f2.size != n2:
        raise ValueError(f"vector parts must have sizes ({n1}, {n2}), got ({Y.f1.size}, {Y.f2.size})")


def domain_residuals(problem, Y):
    """Residuals of the two interface domain conditions, as ``{name: value}``."""
    _check_sizes(problem, Y)
    fm, fp, dm, dp = _traces(Y.f)
    jump, jump_d = fp - fm, dp - dm
    mb, nb = problem.mu_block, problem.nu_block
    if mb.reciprocal:
        r1 = -fp + mb.constant * jump_d - np.sum(Y.f1 * mb.weights)
        n1 = "-y(0+) + sigma*D'y - <y1,beta> = 0"
    else:
        r1 = jump_d - mb.constant * fp - np.sum(Y.f1 * mb.weights)
        n1 = "D'y - xi*y(0+) - <y1,b> = 0"
    if nb.reciprocal:
        r2 = dm - nb.constant * jump - np.sum(Y.f2 * nb.weights)
        n2 = "y'(0-) - tau*Dy - <y2,alpha> = 0"
    else:
        r2 = -jump + nb.constant * dm - np.sum(Y.f2 * nb.weights)
        n2 = "-Dy + zeta*y'(0-) - <y2,a> = 0"
    return {n1: complex(r1), n2: complex(r2)}


def check_domain(problem, Y, rtol=DOMAIN_RTOL):
    """Raise :class:`DomainViolation` unless `Y` satisfies both domain conditions."""
    tol = rtol * _trace_scale(Y)
    for name, r in domain_residuals(problem, Y).items():
        if abs(r) > tol:
            raise DomainViolation(name, abs(r), tol)


def _vector_rows(problem, f, y1, y2):
    fm, fp, dm, dp = _traces(f)
    mb, nb = problem.mu_block, problem.nu_block
    src1 = (dp - dm) if mb.reciprocal else fp
    src2 = (fp - fm) if nb.reciprocal else dm
    return mb.weights * src1 + mb.poles * y1, nb.weights * src2 + nb.poles * y2


def apply_L(problem, Y, rtol=DOMAIN_RTOL):
    """Apply the block operator; the differential part by fourth-order differences."""
    check_domain(problem, Y, rtol)
    ell = Y.f.apply_ell(problem.potential)
    r1, r2 = _vector_rows(problem, Y.f, Y.f1, Y.f2)
    return BlockVector(ell, r1, r2)


def _lift(problem, lam, fm, fp, dm, dp):
    """Vector parts of an eigenvector from its interface traces."""
    mb, nb = problem.mu_block, problem.nu_block
    n1, n2 = mb.size, nb.size
    y1 = np.zeros(n1, dtype=complex)
    y2 = np.zeros(n2, dtype=complex)
    I, J = mb.pole_index(lam), nb.pole_index(lam)
    if mb.reciprocal:
        if I is None:
            y1 = mb.weights * (dp - dm) / (lam - mb.poles)
        else:
            y1[I] = -fp / mb.weights[I]
    else:
        if I is None:
            y1 = mb.weights * fp / (lam - mb.poles)
        else:
            y1[I] = (dp - dm) / mb.weights[I]
    if nb.reciprocal:
        if J is None:
            y2 = nb.weights * (fp - fm) / (lam - nb.poles)
        else:
            y2[J] = dm / nb.weights[J]
    else:
        if J is None:
            y2 = nb.weights * dm / (lam - nb.poles)
        else:
            y2[J] = -(fp - fm) / nb.weights[J]
    return y1, y2


def lift_eigenfunction(problem, lam, f):
    """Eigenvector of the block operator belonging to an eigenfunction `f`."""
    y1, y2 = _lift(problem, lam, *_traces(f))
    return BlockVector(f, y1, y2)


def _sample(mesh, left_traj=None, right_traj=None, cl=1.0, cr=1.0):
    nl, nr = mesh.left.size, mesh.right.size
    if left_traj is None:
        yl = dyl = np.zeros(nl, dtype=complex)
    else:
        yl, dyl = left_traj(mesh.left)
    if right_traj is None:
        yr = dyr = np.zeros(nr, dtype=complex)
    else:
        yr, dyr = right_traj(mesh.right)
    return GridFunction(mesh, cl * yl, cr * yr, cl * dyl, cr * dyr)


def eigenfunctions(problem, record, mesh):
    """Basis of the eigenspace of `record` sampled on `mesh` (one or two functions)."""
    lam = record.lam
    if record.classification is Variant.REGULAR:
        sol = extended_solutions(problem, lam)
        return [_sample(mesh, sol.u_left, sol.u_right)]
    cls = record.details
    out = []
    if cls.left_vanishes:
        out.append(_sample(mesh, integrate_left(problem, lam)[1], None))
    if cls.right_vanishes:
        out.append(_sample(mesh, None, integrate_right(problem, lam)[1]))
    return out


@dataclass(frozen=True)
class ResolventCoefficients:
    """Coefficients of the vector-data part ``A*u (left) + B*v (right)`` of the resolvent.

    ``p`` and ``q`` are the weight vectors contracted with the vector data;
    at coupling poles ``P`` / ``Q`` hold the finite limits actually used.
    """

    A: complex
    B: complex
    D: complex
    p: np.ndarray
    q: np.ndarray
    P: complex
    Q: complex
    variant: Variant
    traces: tuple


def _weights_p(problem, lam, mu_val):
    """``p`` and ``P``-contraction weights off mu-poles; handles lam at a zero of mu."""
    mb = problem.mu_block
    if mb.reciprocal:
        I = mb.pole_index(lam)
        if I is not None:
            p = np.zeros(mb.size, dtype=complex)
            p[I] = -1.0 / mb.weights[I]
            return p
        return mu_val * mb.weights / (lam - mb.poles)
    return mb.weights / (lam - mb.poles) + 0j


def _weights_q(problem, lam, nu_val):
    nb = problem.nu_block
    if nb.reciprocal:
        J = nb.pole_index(lam)
        if J is not None:
            q = np.zeros(nb.size, dtype=complex)
            q[J] = 1.0 / nb.weights[J]
            return q
        return nu_val * nb.weights / (lam - nb.poles)
    return nb.weights / (lam - nb.poles) + 0j


def _reduced_p(problem, lam, I):
    """Weights of ``lim P/mu`` at the mu-pole with index `I`."""
    mb = problem.mu_block
    if mb.reciprocal:
        return mb.weights / (lam - mb.poles) + 0j
    p = np.zeros(mb.size, dtype=complex)
    p[I] = 1.0 / mb.weights[I]
    return p


def _reduced_q(problem, lam, J):
    """Weights of ``lim Q/nu`` at the nu-pole with index `J`."""
    nb = problem.nu_block
    if nb.reciprocal:
        return nb.weights / (lam - nb.poles) + 0j
    q = np.zeros(nb.size, dtype=complex)
    q[J] = -1.0 / nb.weights[J]
    return q


def _guard(value, scale, lam, what):
    if abs(value) < GUARD_RTOL * max(scale, 1e-300):
        raise EigenvalueLambda(lam, abs(value), what)


def resolvent_coefficients(problem, lam, h1, h2):
    """Solve for ``A`` and ``B`` given vector data ``(h1, h2)``.

    Contractions are bilinear (no conjugation), so complex `lam` is
    handled by the same formulas.
    """
    h1 = np.asarray(h1, dtype=complex).reshape(-1)
    h2 = np.asarray(h2, dtype=complex).reshape(-1)
    if h1.size != problem.mu_block.size or h2.size != problem.nu_block.size:
        raise ValueError("vector data has the wrong size")
    variant, i, j, _ = pole_kind(problem, lam)
    if i is not None:
        lam = problem.mu.poles[i]
    elif j is not None:
        lam = problem.nu.poles[j]
    ul, _ = integrate_left(problem, lam)
    vr, _ = integrate_right(problem, lam)
    U, dU, V, dV = ul.value, ul.derivative, vr.value, vr.derivative
    sU, sV = abs(U) + abs(dU), abs(V) + abs(dV)
    traces = (U, dU, V, dV)

    if variant is Variant.REGULAR:
        mu, nu = problem.mu(lam), problem.nu(lam)
        p, q = _weights_p(problem, lam, mu), _weights_q(problem, lam, nu)
        P, Q = complex(np.sum(h1 * p)), complex(np.sum(h2 * q))
        D = dU * V - (dV - mu * V) * (U + nu * dU)
        _guard(D, sU * sV * (1 + abs(mu)) * (1 + abs(nu)), lam, "D")
        # [[-U', V' - mu V], [U + nu U', -V]] [A, B]^T = [P, Q]^T
        A = (-V * P - (dV - mu * V) * Q) / D
        B = (-(U + nu * dU) * P - dU * Q) / D
        return ResolventCoefficients(A, B, D, p, q, P, Q, variant, traces)

    if variant is Variant.POLE_OF_MU:
        nu = problem.nu(lam)
        p, q = _reduced_p(problem, lam, i), _weights_q(problem, lam, nu)
        P, Q = complex(np.sum(h1 * p)), complex(np.sum(h2 * q))
        den = (U + nu * dU) * V
        _guard(den, sU * sV * (1 + abs(nu)), lam, "(u + nu u')(0-) * v(0+)")
        B = -P / V
        A = (Q - P) / (U + nu * dU)
        return ResolventCoefficients(A, B, den, p, q, P, Q, variant, traces)

    if variant is Variant.POLE_OF_NU:
        mu = problem.mu(lam)
        p, q = _weights_p(problem, lam, mu), _reduced_q(problem, lam, j)
        P, Q = complex(np.sum(h1 * p)), complex(np.sum(h2 * q))
        den = dU * (dV - mu * V)
        _guard(den, sU * sV * (1 + abs(mu)), lam, "u'(0-) * (v' - mu v)(0+)")
        A = Q / dU
        B = (P + Q) / (dV - mu * V)
        return ResolventCoefficients(A, B, den, p, q, P, Q, variant, traces)

    p, q = _reduced_p(problem, lam, i), _reduced_q(problem, lam, j)
    P, Q = complex(np.sum(h1 * p)), complex(np.sum(h2 * q))
    den = dU * V
    _guard(den, sU * sV, lam, "u'(0-) * v(0+)")
    A = Q / dU
    B = -P / V
    return ResolventCoefficients(A, B, den, p, q, P, Q, variant, traces)


def _recover_vectors(problem, lam, f, h1, h2):
    """Vector parts of the resolvent from the derivative-free operator rows.

    Where a row degenerates (``lam`` equal to a block pole) the row fixes an
    interface trace instead and the matching component comes from the
    domain condition.
    """
    fm, fp, dm, dp = _traces(f)
    mb, nb = problem.mu_block, problem.nu_block
    I, J = mb.pole_index(lam), nb.pole_index(lam)

    if mb.reciprocal:
        if I is None:
            f1 = (h1 + mb.weights * (dp - dm)) / (lam - mb.poles)
        else:
            jd = -h1[I] / mb.weights[I]
            f1 = np.empty(mb.size, dtype=complex)
            others = np.arange(mb.size) != I
            f1[others] = (h1[others] + mb.weights[others] * jd) / (mb.poles[I] - mb.poles[others])
            f1[I] = (-fp + mb.constant * jd - np.sum(mb.weights[others] * f1[others])) / mb.weights[I]
    else:
        if I is None:
            f1 = (h1 + mb.weights * fp) / (lam - mb.poles)
        else:
            vp = -h1[I] / mb.weights[I]
            f1 = np.empty(mb.size, dtype=complex)
            others = np.arange(mb.size) != I
            f1[others] = (h1[others] + mb.weights[others] * vp) / (mb.poles[I] - mb.poles[others])
            f1[I] = ((dp - dm) - mb.constant * vp
                     - np.sum(mb.weights[others] * f1[others])) / mb.weights[I]

    if nb.reciprocal:
        if J is None:
            f2 = (h2 + nb.weights * (fp - fm)) / (lam - nb.poles)
        else:
            jv = -h2[J] / nb.weights[J]
            f2 = np.empty(nb.size, dtype=complex)
            others = np.arange(nb.size) != J
            f2[others] = (h2[others] + nb.weights[others] * jv) / (nb.poles[J] - nb.poles[others])
            f2[J] = (dm - nb.constant * jv - np.sum(nb.weights[others] * f2[others])) / nb.weights[J]
    else:
        if J is None:
            f2 = (h2 + nb.weights * dm) / (lam - nb.poles)
        else:
            dmv = -h2[J] / nb.weights[J]
            f2 = np.empty(nb.size, dtype=complex)
            others = np.arange(nb.size) != J
            f2[others] = (h2[others] + nb.weights[others] * dmv) / (nb.poles[J] - nb.poles[others])
            f2[J] = (-(fp - fm) + nb.constant * dmv
                     - np.sum(nb.weights[others] * f2[others])) / nb.weights[J]
    return f1, f2


def resolvent_apply(problem, lam, H):
    """``(lam - L)^{-1} H`` for a block vector ``H = (h, h1, h2)``."""
    _check_sizes(problem, H)
    mesh = H.mesh
    variant, i, j, _ = pole_kind(problem, lam)
    if i is not None:
        lam = float(problem.mu.poles[i])
    elif j is not None:
        lam = float(problem.nu.poles[j])
    f = apply_greens(problem, lam, H.f)
    if np.any(H.f1) or np.any(H.f2):
        co = resolvent_coefficients(problem, lam, H.f1, H.f2)
        _, ul = integrate_left(problem, lam)
        _, vr = integrate_right(problem, lam)
        f = f + _sample(mesh, ul, vr, co.A, co.B)
    f1, f2 = _recover_vectors(problem, lam, f, H.f1, H.f2)
    return BlockVector(f, f1, f2)


def round_trip_defect(problem, lam, H, F):
    """``||(lam - L) F - H|| / ||H||`` in the block inner product."""
    LF = apply_L(problem, F)
    R = F * lam - LF - H
    return R.norm() / max(H.norm(), 1e-300)
