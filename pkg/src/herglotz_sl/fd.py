"""Discretised block operator, used as an independent oracle.

The differential part uses linear elements with lumped (trapezoid) mass,
which on a uniform mesh reproduces the three-point central difference in
the interior.  Boundary and interface conditions enter through the
quadratic form of the operator; conditions that fix a trace outright are
eliminated exactly before the eigensolve.  The resulting stiffness matrix
is exactly symmetric and the mass matrix is positive definite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import EigensolverFailure, MeshTooCoarse
from .grid import BlockVector, GridFunction, Mesh

__all__ = [
    "DiscretizedOperator",
    "assemble_fd",
    "fd_spectrum",
    "fd_spectrum_general",
    "fd_eigenpairs",
    "verify_symmetry",
    "admissible_block_vector",
    "interface_derivatives",
]

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(3)


@dataclass(frozen=True, eq=False)
class DiscretizedOperator:
    """Generalised eigenproblem ``K x = lam M x`` on the reduced unknowns.

    ``expand`` maps reduced unknowns to the full vector of nodal values
    (left nodes, right nodes, first block, second block).
    """

    mesh: Mesh
    stiffness: np.ndarray
    mass: np.ndarray
    expand: np.ndarray
    n_left: int
    n_right: int
    n1: int
    n2: int

    @property
    def size(self):
        return self.stiffness.shape[0]

    @property
    def matrix(self):
        """``M^{-1} K``, self-adjoint in the inner product defined by :attr:`weight`."""
        return sla.solve(self.mass, self.stiffness, assume_a="pos")

    @property
    def weight(self):
        return self.mass

    def symmetry_defect(self):
        """``max |W A - A^T W|`` for ``A = M^{-1} K`` and ``W = M``."""
        A, W = self.matrix, self.weight
        return float(np.max(np.abs(W @ A - A.T @ W)))

    def split(self, full):
        """Split a full nodal vector into a :class:`BlockVector`."""
        nl, nr = self.mesh.left.size, self.mesh.right.size
        f = GridFunction(self.mesh, full[:nl], full[nl:nl + nr])
        return BlockVector(f, full[nl + nr:nl + nr + self.n1], full[nl + nr + self.n1:])


def _element_potential(q, x0, x1, breaks):
    """``int q*phi_0`` and ``int q*phi_1`` over one element (hat functions)."""
    cuts = [x0, *[b for b in breaks if x0 < b < x1], x1]
    i0 = i1 = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        xs = 0.5 * (hi + lo) + 0.5 * (hi - lo) * _GAUSS_X
        w = 0.5 * (hi - lo) * _GAUSS_W
        qv = q.on_segment(lo, hi)(xs)
        phi1 = (xs - x0) / (x1 - x0)
        i0 += np.sum(w * qv * (1 - phi1))
        i1 += np.sum(w * qv * phi1)
    return i0, i1


def _side_matrices(q, x):
    n = x.size
    K = np.zeros((n, n))
    m = np.zeros(n)
    breaks = q.breakpoints
    for e in range(n - 1):
        x0, x1 = x[e], x[e + 1]
        h = x1 - x0
        K[e, e] += 1 / h
        K[e + 1, e + 1] += 1 / h
        K[e, e + 1] -= 1 / h
        K[e + 1, e] -= 1 / h
        i0, i1 = _element_potential(q, x0, x1, breaks)
        K[e, e] += i0
        K[e + 1, e + 1] += i1
        m[e] += h / 2
        m[e + 1] += h / 2
    return K, m


def _elimination_basis(n, constraints, pivots):
    """Basis ``Z`` of ``{x : C x = 0}`` obtained by solving for the pivot unknowns."""
    if not constraints:
        return np.eye(n)
    C = np.array(constraints, dtype=float)
    piv = list(pivots)
    free = [k for k in range(n) if k not in piv]
    Cp, Cf = C[:, piv], C[:, free]
    Z = np.zeros((n, len(free)))
    Z[free, np.arange(len(free))] = 1.0
    Z[piv, :] = -np.linalg.solve(Cp, Cf)
    return Z


def assemble_fd(problem, h):
    """Assemble the discrete operator with mesh step close to `h`.

    Raises
    ------
    MeshTooCoarse
        If a side has fewer than 8 interior nodes.
    """
    mesh = Mesh.uniform(problem.a, problem.b, h=h)
    nl, nr = mesh.left.size, mesh.right.size
    if nl - 2 < 8 or nr - 2 < 8:
        raise MeshTooCoarse(f"need >= 8 interior nodes per side, got {nl - 2} and {nr - 2}")
    mb, nb = problem.mu_block, problem.nu_block
    n1, n2 = mb.size, nb.size
    n = nl + nr + n1 + n2
    iL, iR = nl - 1, nl  # y(0-), y(0+)
    o1, o2 = nl + nr, nl + nr + n1

    K = np.zeros((n, n))
    mass = np.ones(n)
    Kl, ml = _side_matrices(problem.potential, mesh.left)
    Kr, mr = _side_matrices(problem.potential, mesh.right)
    K[:nl, :nl] = Kl
    K[nl:nl + nr, nl:nl + nr] = Kr
    mass[:nl], mass[nl:nl + nr] = ml, mr

    constraints, pivots = [], []

    def unit(k):
        row = np.zeros(n)
        row[k] = 1.0
        return row

    # outer boundary conditions
    if problem.dirichlet_left:
        constraints.append(unit(0))
        pivots.append(0)
    else:
        K[0, 0] += math.cos(problem.alpha) / math.sin(problem.alpha)
    if problem.dirichlet_right:
        constraints.append(unit(nl + nr - 1))
        pivots.append(nl + nr - 1)
    else:
        K[nl + nr - 1, nl + nr - 1] -= math.cos(problem.beta) / math.sin(problem.beta)

    # first coupling block
    idx1 = o1 + np.arange(n1)
    K[idx1, idx1] += mb.poles
    if mb.reciprocal:
        # y(0+) = -<y1, beta>  (reciprocal constant is zero for positive slope)
        row = unit(iR)
        row[idx1] += mb.weights
        constraints.append(row)
        pivots.append(iR)
    else:
        K[iR, iR] += mb.constant
        K[iR, idx1] += mb.weights
        K[idx1, iR] += mb.weights

    # second coupling block
    idx2 = o2 + np.arange(n2)
    K[idx2, idx2] += nb.poles
    if nb.reciprocal:
        K[idx2, iR] += nb.weights
        K[idx2, iL] -= nb.weights
        K[iR, idx2] += nb.weights
        K[iL, idx2] -= nb.weights
    else:
        g = np.zeros(n)
        g[iR], g[iL] = 1.0, -1.0
        g[idx2] = nb.weights
        if nb.constant != 0.0:
            K += np.outer(g, g) / nb.constant
        else:
            constraints.append(g)
            pivots.append(iL)

    Z = _elimination_basis(n, constraints, pivots)
    Kr_ = Z.T @ K @ Z
    Mr_ = Z.T @ (mass[:, None] * Z)
    grid_piv = sum(1 for p in pivots if p < nl)
    grid_piv_r = sum(1 for p in pivots if nl <= p < nl + nr)
    return DiscretizedOperator(mesh, Kr_, Mr_, Z, nl - grid_piv, nr - grid_piv_r, n1, n2)


def _symmetric_form(op):
    try:
        L = np.linalg.cholesky(op.mass)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure("mass matrix is not positive definite") from exc
    T = sla.solve_triangular(L, op.stiffness, lower=True)
    S = sla.solve_triangular(L, T.T, lower=True)
    return 0.5 * (S + S.T), L


def fd_spectrum(op, k=None):
    """The `k` smallest eigenvalues (all if ``k is None``), ascending."""
    S, _ = _symmetric_form(op)
    try:
        if k is None or k >= S.shape[0]:
            vals = sla.eigh(S, eigvals_only=True)
        else:
            vals = sla.eigh(S, eigvals_only=True, subset_by_index=[0, k - 1])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(vals)):
        raise EigensolverFailure("non-finite eigenvalues")
    return np.sort(vals)


def fd_spectrum_general(op):
    """Eigenvalues of ``M^{-1} K`` from the nonsymmetric solver, for reality checks."""
    try:
        return sla.eigvals(op.matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc


def fd_eigenpairs(op, k):
    """Smallest `k` eigenpairs; vectors are expanded to full nodal block vectors."""
    S, L = _symmetric_form(op)
    vals, vecs = sla.eigh(S, subset_by_index=[0, k - 1])
    reduced = sla.solve_triangular(L.T, vecs, lower=False)
    full = op.expand @ reduced
    return vals, [op.split(full[:, i]) for i in range(k)]


def interface_derivatives(f):
    """Second-order one-sided derivatives ``y'(0-)`` and ``y'(0+)`` of nodal data."""
    hl, hr = f.mesh.h_left, f.mesh.h_right
    yl, yr = f.left, f.right
    dm = (3 * yl[-1] - 4 * yl[-2] + yl[-3]) / (2 * hl)
    dp = (-3 * yr[0] + 4 * yr[1] - yr[2]) / (2 * hr)
    return complex(dm), complex(dp)


def _gauss_bumps(center, width, side_x, sign):
    """Value-type and slope-type Gaussian bumps at `center` with exact derivatives."""
    s = (side_x - center) / width
    g = np.exp(-s**2)
    dg = -2 * s / width * g
    return [(g, dg), ((side_x - center) * g, g + (side_x - center) * dg)]


def admissible_block_vector(problem, mesh, rng, modes=3):
    """Random smooth element of the operator domain.

    Random trigonometric pieces on each side plus random vector parts are
    corrected by Gaussian bumps at the four special points (both ends and
    both sides of the interface) so that the outer boundary conditions and
    both interface domain conditions hold exactly.
    """
    from .resolvent import domain_residuals

    def trig(x, c, k, ph):
        y = np.zeros(x.shape, dtype=complex)
        dy = np.zeros(x.shape, dtype=complex)
        for cj, kj, pj in zip(c, k, ph):
            y += cj * np.cos(kj * x + pj)
            dy -= cj * kj * np.sin(kj * x + pj)
        return y, dy

    def rand_c():
        return rng.normal(size=modes) + 1j * rng.normal(size=modes)

    xl, xr = mesh.left, mesh.right
    yl, dyl = trig(xl, rand_c(), rng.uniform(0.2, 2.0, modes), rng.uniform(0, 2 * np.pi, modes))
    yr, dyr = trig(xr, rand_c(), rng.uniform(0.2, 2.0, modes), rng.uniform(0, 2 * np.pi, modes))
    n1, n2 = problem.mu_block.size, problem.nu_block.size
    f1 = rng.normal(size=n1) + 1j * rng.normal(size=n1)
    f2 = rng.normal(size=n2) + 1j * rng.normal(size=n2)

    width_l, width_r = 0.15 * problem.a, 0.15 * problem.b
    bumps = []  # (side, y, dy)
    for c in (-problem.a, 0.0):
        bumps += [("L", *b) for b in _gauss_bumps(c, width_l, xl, 1)]
    for c in (0.0, problem.b):
        bumps += [("R", *b) for b in _gauss_bumps(c, width_r, xr, 1)]

    def build(coeffs):
        l, dl = yl.copy(), dyl.copy()
        r, dr = yr.copy(), dyr.copy()
        for cf, (side, y, dy) in zip(coeffs, bumps):
            if side == "L":
                l, dl = l + cf * y, dl + cf * dy
            else:
                r, dr = r + cf * y, dr + cf * dy
        return BlockVector(GridFunction(mesh, l, r, dl, dr), f1, f2)

    def residuals(Y):
        f = Y.f
        ca, sa = math.cos(problem.alpha), math.sin(problem.alpha)
        cb, sb = math.cos(problem.beta), math.sin(problem.beta)
        r_left = f.left[0] * ca - f.dleft[0] * sa
        r_right = f.right[-1] * cb - f.dright[-1] * sb
        return np.array([r_left, r_right, *domain_residuals(problem, Y).values()])

    base = residuals(build(np.zeros(len(bumps))))
    cols = []
    for k in range(len(bumps)):
        e = np.zeros(len(bumps))
        e[k] = 1.0
        cols.append(residuals(build(e)) - base)
    C = np.array(cols).T
    coeffs, *_ = np.linalg.lstsq(C, -base, rcond=None)
    return build(coeffs)


def verify_symmetry(problem, F, G):
    """``|<LF, G> - <F, LG>|`` in the block inner product (quadrature)."""
    from .resolvent import apply_L

    LF, LG = apply_L(problem, F), apply_L(problem, G)
    return abs(LF.inner(G) - F.inner(LG))
