import math

import numpy as np
import pytest
from scipy.integrate import simpson

from herglotz_sl.errors import EigenvalueLambda
from herglotz_sl.greens import apply_greens, greens_matrix, greens_value, greens_value_pole
from herglotz_sl.grid import GridFunction, Mesh

from conftest import cos_rhs

PI = math.pi


def residual(problem, lam, g, h):
    r = g * lam - g.apply_ell(problem.potential) - h
    return r.norm() / h.norm()


def boundary_residuals(problem, g):
    """Left/right boundary conditions of the output, using the exact derivative arrays."""
    ca, sa = math.cos(problem.alpha), math.sin(problem.alpha)
    cb, sb = math.cos(problem.beta), math.sin(problem.beta)
    left = g.left[0] * ca - g.dleft[0] * sa
    right = g.right[-1] * cb - g.dright[-1] * sb
    return abs(left), abs(right)


def transmission_residuals(problem, lam, g):
    mu, nu = problem.mu(lam), problem.nu(lam)
    r1 = g.value_plus * mu - g.jump_deriv
    r2 = g.deriv_minus * nu - g.jump
    scale = max(1.0, abs(g.value_plus), abs(g.value_minus), abs(g.deriv_plus), abs(g.deriv_minus))
    return abs(r1) / scale, abs(r2) / scale


def test_spot_value_closed_form(continuous):
    expected = -2 * math.sin(PI / (2 * math.sqrt(2))) ** 2 / (math.sqrt(2) * math.sin(math.sqrt(2) * PI))
    assert greens_value(continuous, 0.5, -PI / 2, PI / 2) == pytest.approx(expected, abs=1e-8)


def test_kernel_symmetric(full, rng):
    x = rng.uniform(-full.a, full.b, 30)
    t = rng.uniform(-full.a, full.b, 30)
    g1 = greens_value(full, 0.37, x, t)
    g2 = greens_value(full, 0.37, t, x)
    np.testing.assert_allclose(g1, g2, atol=1e-12)


def test_eigenvalue_rejected(continuous):
    with pytest.raises(EigenvalueLambda):
        greens_value(continuous, 0.25, -1.0, 1.0)


def test_interface_point_rejected(continuous):
    with pytest.raises(ValueError):
        greens_value(continuous, 0.5, 0.0, 1.0)


def test_zero_data_gives_zero(continuous):
    mesh = Mesh.for_problem(continuous, h=1e-2)
    g = apply_greens(continuous, 0.37, GridFunction.zeros(mesh))
    assert g.sup() == 0.0


@pytest.mark.parametrize("fixture, lam", [("continuous", 0.37), ("double", 2.0), ("full", 0.37),
                                          ("step", 1.1), ("full", 1 + 1j), ("coincident", -0.3)])
def test_residual_and_conditions(request, fixture, lam):
    p = request.getfixturevalue(fixture)
    h = cos_rhs(p)
    g = apply_greens(p, lam, h)
    assert residual(p, lam, g, h) < 1e-6
    assert max(transmission_residuals(p, lam, g)) < 1e-7
    assert max(boundary_residuals(p, g)) < 1e-9


def test_cross_blocks_vanish_at_pole(double):
    x = np.array([-2.0, -0.5])
    t = np.array([0.5, 2.0])
    assert np.all(greens_value_pole(double, 0.0, x[:, None], t[None, :]) == 0)
    assert np.all(greens_value_pole(double, 0.0, t[:, None], x[None, :]) == 0)


def test_left_pole_kernel_closed_form(double):
    """At the nu-pole 0 the left block solves g'' = h, g(-pi) = 0, g'(0-) = 0."""
    assert greens_value_pole(double, 0.0, -PI / 2, -PI / 2) == pytest.approx(-PI / 2, abs=1e-9)
    x, t = -2.5, -0.7
    assert greens_value_pole(double, 0.0, x, t) == pytest.approx(-(x + PI), abs=1e-9)


def test_pole_kernel_residuals(double):
    h = cos_rhs(double)
    g = apply_greens(double, 0.0, h)
    assert residual(double, 0.0, g, h) < 1e-6
    scale = max(1.0, abs(g.value_minus), abs(g.value_plus))
    assert abs(g.deriv_minus) < 1e-7 * scale
    mu0 = double.mu(0.0)
    assert mu0 == pytest.approx(-1.0)
    assert abs(g.value_plus * mu0 - g.deriv_plus) < 1e-7 * scale
    assert max(boundary_residuals(double, g)) < 1e-9


def test_matrix_auto_selects_pole_kernel(double):
    xs = np.array([-1.0, 1.0])
    G = greens_matrix(double, 0.0, xs, xs)
    assert G[0, 1] == 0 and G[1, 0] == 0 and G[0, 0] != 0


def test_quadrature_matches_matrix(full):
    """apply_greens agrees with explicit quadrature of the kernel."""
    mesh = Mesh.for_problem(full, h=2e-3)
    h = GridFunction.from_callable(mesh, lambda x: np.exp(-x ** 2))
    g = apply_greens(full, 0.77, h)
    for x in (-1.3, 0.4, 2.1):
        xl, xr = mesh.left, mesh.right
        kl = greens_value(full, 0.77, x, np.where(xl == 0, -1e-15, xl))
        kr = greens_value(full, 0.77, x, np.where(xr == 0, 1e-15, xr))
        val = simpson(kl * h.left, x=xl) + simpson(kr * h.right, x=xr)
        side = xl if x < 0 else xr
        arr = g.left if x < 0 else g.right
        assert abs(np.interp(x, side, arr.real) - val.real) < 1e-6
