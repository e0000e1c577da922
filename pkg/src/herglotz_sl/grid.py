"""Grid functions on the split interval and elements of the block Hilbert space."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

__all__ = [
    "Mesh",
    "GridFunction",
    "BlockVector",
    "diff1",
    "diff2",
    "diff1_piecewise",
    "diff2_piecewise",
    "cumulative_integral",
]


# fourth-order first-derivative stencils
_D1_START = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_D1_NEXT = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0
# fourth-order second-derivative stencils
_D2_START = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0
_D2_NEXT = np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]) / 12.0


def diff1(y, h):
    """Fourth-order accurate first derivative on a uniform grid (needs >= 5 points)."""
    y = np.asarray(y)
    if y.size < 5:
        raise ValueError("need at least 5 samples")
    d = np.empty_like(y)
    d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / 12.0
    d[0] = _D1_START @ y[:5]
    d[1] = _D1_NEXT @ y[:5]
    d[-1] = -(_D1_START @ y[::-1][:5])
    d[-2] = -(_D1_NEXT @ y[::-1][:5])
    return d / h


def diff2(y, h):
    """Fourth-order accurate second derivative on a uniform grid (needs >= 6 points)."""
    y = np.asarray(y)
    if y.size < 6:
        raise ValueError("need at least 6 samples")
    d = np.empty_like(y)
    d[2:-2] = (-y[:-4] + 16 * y[1:-3] - 30 * y[2:-2] + 16 * y[3:-1] - y[4:]) / 12.0
    d[0] = _D2_START @ y[:6]
    d[1] = _D2_NEXT @ y[:6]
    d[-1] = _D2_START @ y[::-1][:6]
    d[-2] = _D2_NEXT @ y[::-1][:6]
    return d / h**2


def cumulative_integral(y, x):
    """Running integral from ``x[0]`` by composite Simpson."""
    y = np.asarray(y)
    if np.iscomplexobj(y):
        # cumulative_simpson drops imaginary parts
        return (cumulative_simpson(y.real, x=x, initial=0.0)
                + 1j * cumulative_simpson(y.imag, x=x, initial=0.0))
    return cumulative_simpson(y, x=x, initial=0.0)


def _piece_bounds(x, breaks):
    """Index ranges of `x` between breakpoints; a node on a break starts the next piece."""
    cuts = [0]
    for bp in sorted(breaks):
        if x[0] < bp <= x[-1]:
            k = int(np.searchsorted(x, bp, side="left"))
            if cuts[-1] < k < x.size:
                cuts.append(k)
    cuts.append(x.size)
    return list(zip(cuts[:-1], cuts[1:]))


def diff1_piecewise(y, x, breaks=()):
    """:func:`diff1` applied separately on each breakpoint-free piece."""
    h = x[1] - x[0]
    out = np.empty_like(np.asarray(y))
    for i, j in _piece_bounds(x, breaks):
        seg = y[i:j]
        if seg.size >= 5:
            out[i:j] = diff1(seg, h)
        elif seg.size >= 2:
            out[i:j] = np.gradient(seg, h)
        else:
            out[i:j] = np.nan
    return out


def diff2_piecewise(y, x, breaks=()):
    h = x[1] - x[0]
    out = np.empty_like(np.asarray(y))
    for i, j in _piece_bounds(x, breaks):
        seg = y[i:j]
        if seg.size >= 6:
            out[i:j] = diff2(seg, h)
        elif seg.size >= 3:
            out[i:j] = np.gradient(np.gradient(seg, h), h)
        else:
            out[i:j] = np.nan
    return out


@dataclass(frozen=True, eq=False)
class Mesh:
    """Uniform nodes on ``[-a, 0]`` and ``[0, b]``; the node 0 appears on both sides."""

    left: np.ndarray
    right: np.ndarray

    @classmethod
    def uniform(cls, a, b, h=None, n=None):
        """Mesh with step close to `h` (adjusted per side to divide ``a`` and ``b``) or `n` cells per side."""
        if (h is None) == (n is None):
            raise ValueError("give exactly one of h or n")
        if h is not None:
            nl, nr = max(1, round(a / h)), max(1, round(b / h))
        else:
            nl = nr = int(n)
        return cls(np.linspace(-a, 0.0, nl + 1), np.linspace(0.0, b, nr + 1))

    @classmethod
    def for_problem(cls, problem, h=None, n=None):
        return cls.uniform(problem.a, problem.b, h=h, n=n)

    @property
    def h_left(self):
        return float(self.left[1] - self.left[0])

    @property
    def h_right(self):
        return float(self.right[1] - self.right[0])

    @property
    def size(self):
        return self.left.size + self.right.size


class GridFunction:
    """Samples of a function on each side of the interface.

    The two sides are stored separately, so ``f(0-)`` and ``f(0+)`` are
    independent.  Derivative samples may be supplied; otherwise they are
    obtained by fourth-order differencing when needed.
    """

    def __init__(self, mesh, left, right, dleft=None, dright=None):
        self.mesh = mesh
        self.left = np.asarray(left, dtype=complex)
        self.right = np.asarray(right, dtype=complex)
        if self.left.shape != mesh.left.shape or self.right.shape != mesh.right.shape:
            raise ValueError("sample arrays do not match the mesh")
        self._dleft = None if dleft is None else np.asarray(dleft, dtype=complex)
        self._dright = None if dright is None else np.asarray(dright, dtype=complex)

    @classmethod
    def zeros(cls, mesh):
        return cls(mesh, np.zeros(mesh.left.size), np.zeros(mesh.right.size),
                   np.zeros(mesh.left.size), np.zeros(mesh.right.size))

    @classmethod
    def from_callable(cls, mesh, func, dfunc=None):
        """Sample a function continuous across the interface."""
        d = (None, None) if dfunc is None else (dfunc(mesh.left), dfunc(mesh.right))
        return cls(mesh, func(mesh.left), func(mesh.right), *d)

    @classmethod
    def from_pieces(cls, mesh, left_fn, right_fn, dleft_fn=None, dright_fn=None):
        dl = None if dleft_fn is None else dleft_fn(mesh.left)
        dr = None if dright_fn is None else dright_fn(mesh.right)
        return cls(mesh, left_fn(mesh.left), right_fn(mesh.right), dl, dr)

    @property
    def has_derivative(self):
        return self._dleft is not None and self._dright is not None

    @property
    def dleft(self):
        if self._dleft is None:
            return diff1(self.left, self.mesh.h_left)
        return self._dleft

    @property
    def dright(self):
        if self._dright is None:
            return diff1(self.right, self.mesh.h_right)
        return self._dright

    # one-sided traces at the interface
    @property
    def value_minus(self):
        return complex(self.left[-1])

    @property
    def value_plus(self):
        return complex(self.right[0])

    @property
    def deriv_minus(self):
        return complex(self.dleft[-1])

    @property
    def deriv_plus(self):
        return complex(self.dright[0])

    @property
    def jump(self):
        return self.value_plus - self.value_minus

    @property
    def jump_deriv(self):
        return self.deriv_plus - self.deriv_minus

    def second_derivative(self, breaks=()):
        """``(y''_left, y''_right)``, differencing ``y'`` when it is carried.

        Stencils never reach across the abscissae in `breaks`.
        """
        m = self.mesh
        if self.has_derivative:
            return (diff1_piecewise(self._dleft, m.left, breaks),
                    diff1_piecewise(self._dright, m.right, breaks))
        return diff2_piecewise(self.left, m.left, breaks), diff2_piecewise(self.right, m.right, breaks)

    def apply_ell(self, potential):
        """Samples of ``-y'' + q y`` on each side."""
        d2l, d2r = self.second_derivative(potential.breakpoints)
        return GridFunction(
            self.mesh,
            -d2l + potential(self.mesh.left) * self.left,
            -d2r + potential(self.mesh.right) * self.right,
        )

    def inner(self, other):
        """``integral f * conj(g)`` by Simpson's rule on each side."""
        m = self.mesh
        return complex(simpson(self.left * np.conj(other.left), x=m.left)
                       + simpson(self.right * np.conj(other.right), x=m.right))

    def norm(self):
        return math.sqrt(max(self.inner(self).real, 0.0))

    def sup(self):
        return float(max(np.max(np.abs(self.left)), np.max(np.abs(self.right))))

    def _combine(self, other, op):
        if self.mesh is not other.mesh and not (
            np.array_equal(self.mesh.left, other.mesh.left)
            and np.array_equal(self.mesh.right, other.mesh.right)
        ):
            raise ValueError("grid functions live on different meshes")
        dl = dr = None
        if self.has_derivative and other.has_derivative:
            dl, dr = op(self._dleft, other._dleft), op(self._dright, other._dright)
        return GridFunction(self.mesh, op(self.left, other.left), op(self.right, other.right), dl, dr)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, scalar):
        dl = None if self._dleft is None else scalar * self._dleft
        dr = None if self._dright is None else scalar * self._dright
        return GridFunction(self.mesh, scalar * self.left, scalar * self.right, dl, dr)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def values(self):
        """Concatenated abscissae and samples (the node 0 appears twice)."""
        return (np.concatenate([self.mesh.left, self.mesh.right]),
                np.concatenate([self.left, self.right]))


class BlockVector:
    """Element ``(f, f1, f2)`` of ``L2 + C^N* + C^M*``."""

    def __init__(self, f, f1=(), f2=()):
        self.f = f
        self.f1 = np.asarray(f1, dtype=complex).reshape(-1)
        self.f2 = np.asarray(f2, dtype=complex).reshape(-1)

    @classmethod
    def zeros(cls, mesh, n1, n2):
        return cls(GridFunction.zeros(mesh), np.zeros(n1), np.zeros(n2))

    @property
    def mesh(self):
        return self.f.mesh

    def inner(self, other):
        return (self.f.inner(other.f)
                + complex(np.sum(self.f1 * np.conj(other.f1)))
                + complex(np.sum(self.f2 * np.conj(other.f2))))

    def norm(self):
        return math.sqrt(max(self.inner(self).real, 0.0))

    def __add__(self, other):
        return BlockVector(self.f + other.f, self.f1 + other.f1, self.f2 + other.f2)

    def __sub__(self, other):
        return BlockVector(self.f - other.f, self.f1 - other.f1, self.f2 - other.f2)

    def __mul__(self, scalar):
        return BlockVector(self.f * scalar, scalar * self.f1, scalar * self.f2)

    __rmul__ = __mul__

    def __repr__(self):
        return (f"BlockVector(f on {self.mesh.size} nodes, f1={self.f1.tolist()}, "
                f"f2={self.f2.tolist()})")
