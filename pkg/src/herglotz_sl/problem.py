"""Problem description: geometry, boundary angles, potential and couplings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ProblemValidationError
from .rational import EigenparameterCoupling, Kind, reciprocal_expansion

__all__ = [
    "Potential",
    "ZeroPotential",
    "PiecewiseConstantPotential",
    "SampledPotential",
    "ClosedFormPotential",
    "CouplingBlock",
    "ProblemSpec",
]


class Potential:
    """Real potential on ``[-a, b]``.

    Subclasses implement ``__call__`` (vectorised) and list the abscissae
    where the potential or its derivative jumps in :attr:`breakpoints`;
    the integrators never step across those.
    """

    kind = "abstract"
    breakpoints: tuple = ()

    def __call__(self, x):
        raise NotImplementedError

    def on_segment(self, lo, hi):
        """Callable equal to the potential on the open segment ``(lo, hi)``."""
        return self

    @property
    def smooth(self):
        return not self.breakpoints

    def to_dict(self):
        raise NotImplementedError


class ZeroPotential(Potential):
    kind = "zero"

    def __call__(self, x):
        if np.ndim(x) == 0:
            return 0.0
        return np.zeros(np.shape(x))

    def to_dict(self):
        return {"kind": "zero"}

    def __repr__(self):
        return "ZeroPotential()"


class _Constant:
    def __init__(self, value):
        self.value = float(value)

    def __call__(self, x):
        if np.ndim(x) == 0:
            return self.value
        return np.full(np.shape(x), self.value)


class PiecewiseConstantPotential(Potential):
    """Step potential; ``values[k]`` holds between ``breakpoints[k-1]`` and ``breakpoints[k]``."""

    kind = "piecewise_constant"

    def __init__(self, breakpoints, values):
        bp = np.asarray(breakpoints, dtype=float).reshape(-1)
        vals = np.asarray(values, dtype=float).reshape(-1)
        if vals.size != bp.size + 1:
            raise ValueError("need len(values) == len(breakpoints) + 1")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        self._bp = bp
        self._values = vals
        self.breakpoints = tuple(bp)

    def __call__(self, x):
        idx = np.searchsorted(self._bp, x, side="right")
        out = self._values[idx]
        return float(out) if np.ndim(x) == 0 else out

    def on_segment(self, lo, hi):
        return _Constant(self(0.5 * (lo + hi)))

    def to_dict(self):
        return {
            "kind": self.kind,
            "breakpoints": self._bp.tolist(),
            "values": self._values.tolist(),
        }

    def __repr__(self):
        return f"PiecewiseConstantPotential({self._bp.tolist()}, {self._values.tolist()})"


class SampledPotential(Potential):
    """Linear interpolation of samples; knots act as breakpoints."""

    kind = "sampled"

    def __init__(self, grid, values):
        grid = np.asarray(grid, dtype=float).reshape(-1)
        values = np.asarray(values, dtype=float).reshape(-1)
        if grid.size != values.size or grid.size < 2:
            raise ValueError("grid and values need equal length >= 2")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        self._grid = grid
        self._values = values
        self.breakpoints = tuple(grid[1:-1])

    def __call__(self, x):
        out = np.interp(x, self._grid, self._values)
        return float(out) if np.ndim(x) == 0 else out

    @property
    def support(self):
        return float(self._grid[0]), float(self._grid[-1])

    def to_dict(self):
        return {"kind": self.kind, "grid": self._grid.tolist(), "values": self._values.tolist()}


class ClosedFormPotential(Potential):
    """Potential given by a Python callable (optionally with its source expression).

    Use :meth:`from_expression` to build one from a string such as
    ``"0.5*cos(x)"``; such potentials survive pickling.
    """

    kind = "expression"

    def __init__(self, func, expression=None):
        self._func = func
        self.expression = expression

    @classmethod
    def from_expression(cls, expression):
        import sympy

        x = sympy.Symbol("x", real=True)
        expr = sympy.sympify(expression, locals={"x": x})
        extra = expr.free_symbols - {x}
        if extra:
            raise ValueError(f"unknown symbols in potential: {sorted(map(str, extra))}")
        func = sympy.lambdify(x, expr, modules="numpy")
        return cls(func, expression)

    def __call__(self, x):
        out = self._func(x)
        if np.ndim(x) == 0:
            return float(np.real(out))
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(x)).copy()

    def __getstate__(self):
        if self.expression is None:
            return {"func": self._func, "expression": None}
        return {"expression": self.expression}

    def __setstate__(self, state):
        if state.get("func") is not None:
            self.__init__(state["func"], None)
        else:
            self.__init__(ClosedFormPotential.from_expression(state["expression"])._func,
                          state["expression"])

    def to_dict(self):
        if self.expression is None:
            raise ValueError("callable potentials without an expression cannot be serialised")
        return {"kind": self.kind, "expression": self.expression}

    def __repr__(self):
        return f"ClosedFormPotential({self.expression or self._func!r})"


@dataclass(frozen=True, eq=False)
class CouplingBlock:
    """Finite-dimensional part of the Hilbert space contributed by one coupling.

    For positive slope the block is built from the reciprocal expansion
    (``constant`` = sigma or tau, ``poles`` = gamma or delta, ``weights`` =
    beta or alpha); otherwise directly from the coupling (``constant`` = xi or
    zeta, ``poles`` = c or d, ``weights`` = b or a).
    """

    coupling: EigenparameterCoupling
    reciprocal: bool
    constant: float
    poles: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, coupling):
        if coupling.slope > 0:
            rec = reciprocal_expansion(coupling)
            return cls(coupling, True, rec.constant, rec.poles, rec.residues)
        return cls(coupling, False, coupling.offset, coupling.poles, coupling.residues)

    @property
    def size(self):
        return int(self.poles.size)

    def pole_index(self, lam):
        for k, p in enumerate(self.poles):
            if abs(lam - p) < 1e-9 * max(1.0, abs(p)):
                return k
        return None


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Full eigenvalue problem.

    Parameters
    ----------
    a, b : float
        Lengths of the left interval ``[-a, 0)`` and right interval ``(0, b]``.
    alpha : float
        Left boundary angle in ``[0, pi)``.
    beta : float
        Right boundary angle in ``(0, pi]``.
    potential : Potential
    mu, nu : EigenparameterCoupling
        Couplings in the ``MU`` and ``NU`` conventions.
    """

    a: float
    b: float
    alpha: float = 0.0
    beta: float = math.pi
    potential: Potential = field(default_factory=ZeroPotential)
    mu: EigenparameterCoupling = field(default_factory=lambda: EigenparameterCoupling.mu())
    nu: EigenparameterCoupling = field(default_factory=lambda: EigenparameterCoupling.nu())
    name: str = ""

    def __post_init__(self):
        for key in ("a", "b"):
            val = getattr(self, key)
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise ProblemValidationError(f"geometry.{key}", f"must be a positive real, got {val!r}")
            object.__setattr__(self, key, float(val))
        alpha, beta = float(self.alpha), float(self.beta)
        if not (0.0 <= alpha < math.pi):
            raise ProblemValidationError("boundary.alpha", f"alpha ∈ [0,π) required, got {alpha}")
        if math.pi < beta <= math.pi + 1e-12:
            beta = math.pi
        if not (0.0 < beta <= math.pi):
            raise ProblemValidationError("boundary.beta", f"beta ∈ (0,π] required, got {beta}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        if not isinstance(self.mu, EigenparameterCoupling) or self.mu.kind is not Kind.MU:
            raise ProblemValidationError("mu", "must be a coupling in the MU convention")
        if not isinstance(self.nu, EigenparameterCoupling) or self.nu.kind is not Kind.NU:
            raise ProblemValidationError("nu", "must be a coupling in the NU convention")
        if not isinstance(self.potential, Potential):
            raise ProblemValidationError("potential", "must be a Potential instance")
        support = getattr(self.potential, "support", None)
        if support is not None and (support[0] > -self.a + 1e-12 or support[1] < self.b - 1e-12):
            raise ProblemValidationError("potential.grid", "samples must cover [-a, b]")

    @property
    def dirichlet_left(self):
        return abs(math.sin(self.alpha)) < 1e-12

    @property
    def dirichlet_right(self):
        return abs(math.sin(self.beta)) < 1e-12

    @cached_property
    def mu_block(self):
        return CouplingBlock.build(self.mu)

    @cached_property
    def nu_block(self):
        return CouplingBlock.build(self.nu)

    @cached_property
    def all_poles(self):
        """Sorted union of the poles of both couplings."""
        return np.unique(np.concatenate([self.mu.poles, self.nu.poles]))

    def replace(self, **changes):
        import dataclasses

        return dataclasses.replace(self, **changes)
