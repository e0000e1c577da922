"""Interface algebra: transfer matrix, characteristic function, pole classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NotAPole, PoleEvaluation
from .rational import pole_tolerance
from .shooting import EndpointState, integrate_from, integrate_left, integrate_right, shoot

__all__ = [
    "CHAR_RTOL",
    "TransferMatrix",
    "JumpData",
    "Variant",
    "MultiplicityClassification",
    "transfer_matrix",
    "jump_data",
    "extend_u",
    "extend_v",
    "interface_traces",
    "characteristic",
    "wronskian",
    "determinant_D",
    "pole_kind",
    "pole_characteristics",
    "ExtendedSolutions",
    "extended_solutions",
]

CHAR_RTOL = 1e-7


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """``[[1, nu], [mu, 1 + mu*nu]]``, mapping ``(y, y')(0-)`` to ``(y, y')(0+)``."""

    mu: complex
    nu: complex

    @property
    def entries(self):
        return np.array([[1.0, self.nu], [self.mu, 1.0 + self.mu * self.nu]])

    @property
    def det(self):
        m = self.entries
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]

    def inverse_entries(self):
        """Adjugate, equal to the inverse because the determinant is one."""
        return np.array([[1.0 + self.mu * self.nu, -self.nu], [-self.mu, 1.0]])

    def apply(self, state):
        return self.entries @ np.asarray(state)

    def apply_inverse(self, state):
        return self.inverse_entries() @ np.asarray(state)


@dataclass(frozen=True)
class JumpData:
    delta: complex
    delta_prime: complex


def jump_data(left, right):
    """Jumps ``y(0+) - y(0-)`` and ``y'(0+) - y'(0-)`` from one-sided states."""
    return JumpData(complex(right.value - left.value), complex(right.derivative - left.derivative))


class Variant(enum.Enum):
    REGULAR = "RegularSimple"
    POLE_OF_MU = "CaseI_PoleOfMu"
    POLE_OF_NU = "CaseII_PoleOfNu"
    POLE_OF_BOTH = "CaseIII_PoleOfBoth"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class MultiplicityClassification:
    """Outcome of the decoupled test at a coupling pole.

    ``left_char`` and ``right_char`` are the quantities whose vanishing
    means the decoupled left / right half-problem has a nontrivial solution.
    """

    variant: Variant
    left_char: complex
    right_char: complex
    left_scale: float = 1.0
    right_scale: float = 1.0
    lam: float = float("nan")
    ambiguous: bool = False

    @property
    def left_vanishes(self):
        return abs(self.left_char) < CHAR_RTOL * self.left_scale

    @property
    def right_vanishes(self):
        return abs(self.right_char) < CHAR_RTOL * self.right_scale

    @property
    def is_eigenvalue(self):
        return self.left_vanishes or self.right_vanishes

    @property
    def multiplicity(self):
        if self.variant is Variant.REGULAR:
            return 1
        return int(self.left_vanishes) + int(self.right_vanishes)


def transfer_matrix(mu, nu, lam):
    """Transfer matrix at `lam`; raises :class:`PoleEvaluation` on a pole of either coupling."""
    return TransferMatrix(mu(lam), nu(lam))


def extend_u(problem, lam, state):
    """Continue the left solution from ``0-`` to ``0+``."""
    y = transfer_matrix(problem.mu, problem.nu, lam).apply(state.as_array())
    return EndpointState(complex(y[0]), complex(y[1]), 0.0)


def extend_v(problem, lam, state):
    """Continue the right solution from ``0+`` to ``0-``."""
    y = transfer_matrix(problem.mu, problem.nu, lam).apply_inverse(state.as_array())
    return EndpointState(complex(y[0]), complex(y[1]), 0.0)


def interface_traces(problem, lam):
    """``(U, U', V, V')`` at a single spectral parameter."""
    U, dU, V, dV = shoot(problem, np.array([lam]))
    return complex(U[0]), complex(dU[0]), complex(V[0]), complex(dV[0])


def _psi_left(U, dU, V, dV, mu, nu):
    vl = (1.0 + mu * nu) * V - nu * dV
    dvl = -mu * V + dV
    return U * dvl - dU * vl


def _psi_right(U, dU, V, dV, mu, nu):
    ur = U + nu * dU
    dur = mu * U + (1.0 + mu * nu) * dU
    return ur * dV - dur * V


def characteristic(problem, lams, side="left"):
    """Characteristic function ``u v' - u' v`` for an array of spectral parameters."""
    lams = np.asarray(lams)
    mu, nu = problem.mu(lams), problem.nu(lams)
    U, dU, V, dV = shoot(problem, lams)
    f = _psi_left if side == "left" else _psi_right
    return f(U, dU, V, dV, mu, nu)


def wronskian(problem, lam, side="left"):
    """Characteristic function at one spectral parameter, evaluated at ``0-`` or ``0+``."""
    mu, nu = problem.mu(lam), problem.nu(lam)
    U, dU, V, dV = interface_traces(problem, lam)
    f = _psi_left if side == "left" else _psi_right
    val = f(U, dU, V, dV, mu, nu)
    return val.real if np.isrealobj(lam) and abs(val.imag) == 0 else val


def determinant_D(U, dU, V, dV, mu, nu):
    """Determinant of the 2x2 system for the vector part of the resolvent."""
    return dU * V - (dV - mu * V) * (U + nu * dU)


def pole_kind(problem, lam):
    """Which couplings have a pole at `lam`.

    Returns ``(variant, mu_index, nu_index, ambiguous)``; ``variant`` is
    ``Variant.REGULAR`` off all poles.  When `lam` is within tolerance of a
    pole of each coupling but the two poles are distinct numbers, the
    nearer one wins and ``ambiguous`` is set.
    """
    i = problem.mu.pole_at(lam)
    j = problem.nu.pole_at(lam)
    if i is None and j is None:
        return Variant.REGULAR, None, None, False
    if i is not None and j is None:
        return Variant.POLE_OF_MU, i, None, False
    if j is not None and i is None:
        return Variant.POLE_OF_NU, None, j, False
    c, d = problem.mu.poles[i], problem.nu.poles[j]
    if abs(c - d) <= 4 * np.finfo(float).eps * max(1.0, abs(c)):
        return Variant.POLE_OF_BOTH, i, j, False
    if abs(lam - c) <= abs(lam - d):
        return Variant.POLE_OF_MU, i, None, True
    return Variant.POLE_OF_NU, None, j, True


def _pole_chars(variant, U, dU, V, dV, mu0, nu0):
    if variant is Variant.POLE_OF_MU:
        return U + nu0 * dU, V
    if variant is Variant.POLE_OF_NU:
        return dU, dV - mu0 * V
    return dU, V


def pole_characteristics(problem, lam0):
    """Decoupled characteristics at a coupling pole.

    Raises
    ------
    NotAPole
        If `lam0` is not within tolerance of a pole of either coupling.
    """
    variant, i, j, ambiguous = pole_kind(problem, lam0)
    if variant is Variant.REGULAR:
        raise NotAPole(f"lambda={lam0!r} is not a pole of mu or nu")
    lam = float(problem.mu.poles[i]) if i is not None else float(problem.nu.poles[j])
    U, dU, V, dV = interface_traces(problem, lam)
    mu0 = problem.mu(lam) if variant is Variant.POLE_OF_NU else np.nan
    nu0 = problem.nu(lam) if variant is Variant.POLE_OF_MU else np.nan
    left, right = _pole_chars(variant, U, dU, V, dV, mu0, nu0)
    return MultiplicityClassification(
        variant=variant,
        left_char=left,
        right_char=right,
        left_scale=max(1.0, abs(U) + abs(dU)),
        right_scale=max(1.0, abs(V) + abs(dV)),
        lam=lam,
        ambiguous=ambiguous,
    )


@dataclass(frozen=True, eq=False)
class ExtendedSolutions:
    """The left and right solutions, each continued across the interface.

    ``u_left``/``v_right`` are the shooting trajectories; ``u_right`` and
    ``v_left`` continue them through the transfer matrix.
    """

    lam: complex
    u_left: object
    u_right: object
    v_left: object
    v_right: object
    traces: tuple
    mu: complex
    nu: complex

    def u(self, x):
        return _piecewise(x, self.u_left, self.u_right)

    def v(self, x):
        return _piecewise(x, self.v_left, self.v_right)

    @property
    def psi(self):
        U, dU, V, dV = self.traces
        return _psi_left(U, dU, V, dV, self.mu, self.nu)


def _piecewise(x, left, right):
    x = np.asarray(x, dtype=float)
    y = np.empty(x.shape, dtype=complex)
    dy = np.empty(x.shape, dtype=complex)
    neg = x < 0
    if np.any(neg):
        y[neg], dy[neg] = left(x[neg])
    if np.any(~neg):
        y[~neg], dy[~neg] = right(x[~neg])
    return y, dy


def extended_solutions(problem, lam):
    """Dense left and right solutions continued across the interface (off poles)."""
    mu, nu = problem.mu(lam), problem.nu(lam)
    T = TransferMatrix(mu, nu)
    ul_state, u_left = integrate_left(problem, lam)
    vr_state, v_right = integrate_right(problem, lam)
    ur0 = T.apply(ul_state.as_array())
    vl0 = T.apply_inverse(vr_state.as_array())
    _, u_right = integrate_from(problem, lam, "right", ur0[0], ur0[1])
    _, v_left = integrate_from(problem, lam, "left", vl0[0], vl0[1])
    traces = (ul_state.value, ul_state.derivative, vr_state.value, vr_state.derivative)
    return ExtendedSolutions(lam, u_left, u_right, v_left, v_right, traces, mu, nu)
