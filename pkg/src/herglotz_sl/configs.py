"""Ready-made test problems used by the tests, demos and problem files."""

from __future__ import annotations

import math

import numpy as np

from .problem import ClosedFormPotential, ProblemSpec, ZeroPotential
from .rational import EigenparameterCoupling, Kind, coupling_from_interlacing

__all__ = [
    "continuous",
    "double_eigenvalue",
    "no_double_slice",
    "no_double_configuration",
    "full_herglotz",
    "coincident_poles",
    "step_potential",
    "SHIPPED",
]

PI = math.pi


def continuous():
    """Constant couplings ``mu = nu = 0``: a Dirichlet problem on ``[-pi, pi]``."""
    return ProblemSpec(PI, PI, 0.0, PI, ZeroPotential(), EigenparameterCoupling.mu(),
                       EigenparameterCoupling.nu(), name="continuous")


def double_eigenvalue():
    """``mu = 1/(lam-1)``, ``nu = (lam-1)/lam``; lam = 1 has a two-dimensional eigenspace."""
    return ProblemSpec(
        PI, PI, 0.0, PI, ZeroPotential(),
        EigenparameterCoupling.mu(0.0, 0.0, [1.0], [1.0]),
        EigenparameterCoupling.nu(0.0, 1.0, [0.0], [1.0]),
        name="double_eigenvalue",
    )


def no_double_configuration(mu_zeros, mu_poles, nu_poles, nu_zeros, a=PI, b=PI,
                            alpha=0.0, beta=PI, potential=None, name="no_double"):
    """Couplings built from interlacing zero/pole sets.

    ``mu = prod(s - lam)/prod(r - lam)`` with zeros below poles and
    ``nu`` the same with poles below zeros.
    """
    mu = coupling_from_interlacing(Kind.MU, mu_zeros, mu_poles)
    nu = coupling_from_interlacing(Kind.NU, nu_zeros, nu_poles)
    return ProblemSpec(a, b, alpha, beta, potential or ZeroPotential(), mu, nu, name=name)


def no_double_slice():
    """``mu = (1-lam)/(9/4-lam)``, ``nu = (9/4-lam)/(1-lam)``."""
    return no_double_configuration([1.0], [2.25], [1.0], [2.25], name="no_double_slice")


def full_herglotz():
    """Both slopes positive, Robin ends and a smooth potential."""
    return ProblemSpec(
        2.0, 2.5, 0.3, 2.5,
        ClosedFormPotential.from_expression("0.5*cos(x)"),
        EigenparameterCoupling.mu(1.0, 0.5, [0.5, 3.0], [0.7, 1.3]),
        EigenparameterCoupling.nu(0.5, -0.2, [1.5], [0.8]),
        name="full_herglotz",
    )


def coincident_poles():
    """Zero mu-slope with a mu pole at 2, and nu with positive slope vanishing at 2.

    ``nu(lam) = lam - 1.5 - 1/lam`` has ``nu(2) = 0``, so 2 is simultaneously
    a pole of mu and a pole of ``1/nu``.
    """
    return ProblemSpec(
        PI, PI, 0.0, PI, ZeroPotential(),
        EigenparameterCoupling.mu(0.0, 0.3, [2.0], [0.6]),
        EigenparameterCoupling.nu(1.0, -1.5, [0.0], [1.0]),
        name="coincident_poles",
    )


def step_potential():
    """Piecewise-constant potential with a jump inside each half interval."""
    from .problem import PiecewiseConstantPotential

    return ProblemSpec(
        1.5, 2.0, 0.7, 2.0,
        PiecewiseConstantPotential([-0.6, 0.9], [1.0, -0.5, 2.0]),
        EigenparameterCoupling.mu(0.0, -0.4, [1.2], [0.5]),
        EigenparameterCoupling.nu(0.0, 0.8, [3.5], [0.9]),
        name="step_potential",
    )


SHIPPED = {
    "continuous": continuous,
    "double_eigenvalue": double_eigenvalue,
    "no_double_slice": no_double_slice,
    "full_herglotz": full_herglotz,
    "coincident_poles": coincident_poles,
    "step_potential": step_potential,
}
