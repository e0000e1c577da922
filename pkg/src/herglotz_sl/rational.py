r"""Rational eigenparameter couplings and their partial-fraction algebra.

Two sign conventions are in use for the couplings entering the
transmission conditions at the origin,

.. math::

    \mu(\lambda) = -\Bigl(\lambda\eta - \xi - \sum_i \frac{b_i^2}{\lambda - c_i}\Bigr),
    \qquad
    \nu(\lambda) = \lambda\kappa + \zeta - \sum_j \frac{a_j^2}{\lambda - d_j},

with nonnegative slopes and strictly positive residue squares.  On every
real interval between poles :math:`\mu` is strictly decreasing and
:math:`\nu` strictly increasing; all zero finding below relies on that.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (
    InterlacingViolation,
    NumericalFailure,
    PoleEvaluation,
    SlopeZero,
)

__all__ = [
    "Kind",
    "EigenparameterCoupling",
    "ReciprocalExpansion",
    "pole_tolerance",
    "is_pole",
    "poles_of",
    "zeros_of",
    "reciprocal_expansion",
    "from_interlacing",
    "coupling_from_interlacing",
]

POLE_RTOL = 1e-9
BRACKET_OFFSET = 1e-6


class Kind(enum.Enum):
    """Sign convention of a coupling."""

    MU = "mu"
    NU = "nu"


def pole_tolerance(pole):
    """Half-width of the band around `pole` treated as "on the pole"."""
    return POLE_RTOL * max(1.0, abs(pole))


def _frozen(values):
    arr = np.array(values, dtype=float).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class EigenparameterCoupling:
    """Rational function of the spectral parameter given by poles and residues.

    Parameters
    ----------
    kind : Kind
        ``Kind.MU`` or ``Kind.NU`` sign convention.
    slope : float
        Coefficient of the linear term (eta or kappa), must be >= 0.
    offset : float
        Constant term (xi or zeta).
    poles : array_like
        Strictly increasing real poles.
    residue_squares : array_like
        Strictly positive residue squares, one per pole.
    """

    kind: Kind
    slope: float = 0.0
    offset: float = 0.0
    poles: np.ndarray = field(default_factory=lambda: _frozen([]))
    residue_squares: np.ndarray = field(default_factory=lambda: _frozen([]))

    def __post_init__(self):
        kind = Kind(self.kind)
        poles = _frozen(self.poles)
        res = _frozen(self.residue_squares)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "slope", float(self.slope))
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "residue_squares", res)
        if not math.isfinite(self.slope) or self.slope < 0:
            raise ValueError(f"slope must be a finite number >= 0, got {self.slope}")
        if not math.isfinite(self.offset):
            raise ValueError("offset must be finite")
        if poles.size != res.size:
            raise ValueError(
                f"{poles.size} poles but {res.size} residue squares"
            )
        if not np.all(np.isfinite(poles)) or np.any(np.diff(poles) <= 0):
            raise ValueError("poles must be finite and strictly increasing")
        if np.any(~(res > 0)) or not np.all(np.isfinite(res)):
            raise ValueError("residue squares must be finite and > 0")

    @classmethod
    def mu(cls, slope=0.0, offset=0.0, poles=(), residue_squares=()):
        """Coupling in the ``mu`` convention (eta, xi, c_i, b_i^2)."""
        return cls(Kind.MU, slope, offset, poles, residue_squares)

    @classmethod
    def nu(cls, slope=0.0, offset=0.0, poles=(), residue_squares=()):
        """Coupling in the ``nu`` convention (kappa, zeta, d_j, a_j^2)."""
        return cls(Kind.NU, slope, offset, poles, residue_squares)

    @property
    def count(self):
        return int(self.poles.size)

    @property
    def residues(self):
        """Positive square roots of the residue squares (b_i or a_j)."""
        return np.sqrt(self.residue_squares)

    @property
    def sign(self):
        """+1 for ``MU`` (decreasing), -1 for ``NU`` (increasing)."""
        return 1.0 if self.kind is Kind.MU else -1.0

    def nearest_pole(self, lam):
        """Return (pole, distance) of the pole closest to `lam`, or (None, inf)."""
        if self.count == 0:
            return None, math.inf
        dist = np.abs(lam - self.poles)
        k = int(np.argmin(dist))
        return float(self.poles[k]), float(dist[k])

    def pole_at(self, lam):
        """Index of the pole within tolerance of `lam`, or ``None``."""
        for k, c in enumerate(self.poles):
            if abs(lam - c) < pole_tolerance(c):
                return k
        return None

    def _check(self, lam):
        lam = np.asarray(lam)
        for c in self.poles:
            hit = np.abs(lam - c) < pole_tolerance(c)
            if np.any(hit):
                bad = lam[hit] if lam.ndim else lam
                raise PoleEvaluation(complex(np.ravel(bad)[0]), float(c))

    def __call__(self, lam):
        """Evaluate the coupling; raises :class:`PoleEvaluation` on a pole."""
        self._check(lam)
        return self._raw(lam)

    def _raw(self, lam):
        lam = np.asarray(lam)
        s = self.sign
        total = np.zeros(lam.shape, dtype=np.result_type(lam, float))
        for c, r in zip(self.poles, self.residue_squares):
            total = total + r / (lam - c)
        value = s * (-self.slope * lam) + self.offset + s * total
        return value[()] if value.ndim == 0 else value

    def derivative(self, lam):
        """Derivative in the spectral parameter."""
        self._check(lam)
        lam = np.asarray(lam)
        s = self.sign
        total = np.zeros(lam.shape, dtype=np.result_type(lam, float))
        for c, r in zip(self.poles, self.residue_squares):
            total = total + r / (lam - c) ** 2
        value = -s * (self.slope + total)
        return value[()] if value.ndim == 0 else value

    def residue_limit(self, index):
        """Limit of ``(lam - pole) * f(lam)`` at pole `index`."""
        return self.sign * float(self.residue_squares[index])

    def to_dict(self):
        return {
            "slope": self.slope,
            "offset": self.offset,
            "poles": [float(c) for c in self.poles],
            "residue_squares": [float(r) for r in self.residue_squares],
        }

    def __repr__(self):
        return (
            f"EigenparameterCoupling({self.kind.name}, slope={self.slope}, "
            f"offset={self.offset}, poles={list(self.poles)}, "
            f"residue_squares={list(self.residue_squares)})"
        )


def is_pole(f, lam, tol=None):
    """True when `lam` lies within `tol` of a pole of `f`.

    With ``tol=None`` the relative band ``1e-9 * max(1, |pole|)`` is used.
    """
    for c in f.poles:
        band = pole_tolerance(c) if tol is None else tol
        if abs(lam - c) < band:
            return True
    return False


def poles_of(f):
    return np.array(f.poles)


def _tail_limit(f, direction):
    """Sign-relevant limit of `f` as lam -> direction * infinity."""
    if f.slope > 0:
        # mu ~ -eta*lam, nu ~ kappa*lam
        return -f.sign * direction * math.inf
    return f.offset


def _near_pole_point(f, pole, side):
    """A point just to one side of `pole` where the pole term dominates."""
    offset = BRACKET_OFFSET * max(1.0, abs(pole))
    # mu: +inf just right of a pole, -inf just left; nu the opposite
    expected = f.sign * side
    for _ in range(12):
        lam = pole + side * offset
        if np.sign(f._raw(lam)) == expected:
            return lam
        offset *= 1e-2
    raise NumericalFailure(f"cannot bracket near pole {pole}")


def _far_point(f, anchor, direction, target_sign):
    step = max(1.0, abs(anchor))
    for _ in range(2000):
        lam = anchor + direction * step
        if np.sign(f._raw(lam)) == target_sign:
            return lam
        step *= 2.0
        if not math.isfinite(step):
            break
    raise NumericalFailure("tail bracket search diverged")


def zeros_of(f):
    """All real zeros of `f`, increasing.

    One zero is sought on every interval between consecutive poles and on
    each unbounded tail whose limit has the opposite sign to the pole side.
    """
    if f.count == 0:
        if f.slope > 0:
            # mu = -eta*lam + xi, nu = kappa*lam + zeta
            return np.array([f.sign * f.offset / f.slope])
        return np.array([])

    brackets = []
    poles = list(f.poles)
    # left tail (-inf, c_1): f tends to the left-of-pole limit at c_1
    left_lim = _tail_limit(f, -1)
    near = _near_pole_point(f, poles[0], -1)
    if np.sign(left_lim) == -np.sign(f._raw(near)) and left_lim != 0:
        far = _far_point(f, poles[0], -1, np.sign(left_lim))
        brackets.append((far, near))
    for lo, hi in zip(poles[:-1], poles[1:]):
        brackets.append((_near_pole_point(f, lo, +1), _near_pole_point(f, hi, -1)))
    right_lim = _tail_limit(f, +1)
    near = _near_pole_point(f, poles[-1], +1)
    if np.sign(right_lim) == -np.sign(f._raw(near)) and right_lim != 0:
        far = _far_point(f, poles[-1], +1, np.sign(right_lim))
        brackets.append((near, far))

    zeros = []
    for lo, hi in brackets:
        try:
            z, info = brentq(f._raw, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                             maxiter=500, full_output=True)
        except ValueError as exc:
            raise NumericalFailure(f"no sign change on [{lo}, {hi}]") from exc
        if not info.converged:
            raise NumericalFailure(f"zero search on [{lo}, {hi}] did not converge")
        zeros.append(z)
    return np.array(zeros)


@dataclass(frozen=True, eq=False)
class ReciprocalExpansion:
    """Partial-fraction form of ``1/f``.

    ``sign=-1`` means ``constant - sum beta^2/(lam - gamma)`` (reciprocal of
    ``mu``); ``sign=+1`` means ``constant + sum alpha^2/(lam - delta)``.
    """

    constant: float
    poles: np.ndarray
    residue_squares: np.ndarray
    sign: int

    @property
    def count(self):
        return int(self.poles.size)

    @property
    def residues(self):
        return np.sqrt(self.residue_squares)

    def __call__(self, lam):
        lam = np.asarray(lam)
        total = np.zeros(lam.shape, dtype=np.result_type(lam, float))
        for g, r in zip(self.poles, self.residue_squares):
            total = total + r / (lam - g)
        value = self.constant + self.sign * total
        return value[()] if value.ndim == 0 else value


def reciprocal_expansion(f):
    """Partial-fraction expansion of ``1/f`` for a coupling with positive slope.

    The poles of the expansion are the real zeros of `f`; the residue squares
    follow from ``1/|f'|`` at each zero.  The constant term is recovered
    numerically (it is zero up to rounding).
    """
    if f.slope <= 0:
        raise SlopeZero("reciprocal expansion needs slope > 0")
    zeros = zeros_of(f)
    if zeros.size != f.count + 1:
        raise NumericalFailure(
            f"expected {f.count + 1} zeros, found {zeros.size}"
        )
    deriv = f.derivative(zeros)
    # mu' < 0 gives -beta^2 = 1/mu'; nu' > 0 gives alpha^2 = 1/nu'
    res = np.abs(1.0 / deriv)
    sign = -1 if f.kind is Kind.MU else +1
    partial = ReciprocalExpansion(0.0, _frozen(zeros), _frozen(res), sign)
    scale = 1.0 + np.max(np.abs(np.concatenate([zeros, f.poles])))
    probes = np.array([10.0, 31.0, -17.0, 57.0]) * scale
    constant = float(np.mean(1.0 / f._raw(probes) - partial(probes)))
    return ReciprocalExpansion(constant, partial.poles, partial.residue_squares, sign)


def _check_interlacing(zeros, poles):
    m = zeros.size
    if poles.size != m:
        raise InterlacingViolation(f"{m} zeros but {poles.size} poles")
    if m == 0:
        return +1
    if np.any(np.diff(zeros) <= 0) or np.any(np.diff(poles) <= 0):
        raise InterlacingViolation("zeros and poles must be strictly increasing")
    merged_a = np.empty(2 * m)
    merged_a[0::2], merged_a[1::2] = poles, zeros
    if np.all(np.diff(merged_a) > 0):
        return +1
    merged_b = np.empty(2 * m)
    merged_b[0::2], merged_b[1::2] = zeros, poles
    if np.all(np.diff(merged_b) > 0):
        return -1
    raise InterlacingViolation("zeros and poles do not strictly interlace")


def from_interlacing(zeros, poles):
    r"""Partial fractions of :math:`\prod(s_j-\lambda)/\prod(r_k-\lambda)`.

    Returns
    -------
    constant : float
        Always 1.
    K : ndarray
        Coefficients with ``phi(lam) = 1 - sum K_k / (lam - r_k)``; all
        positive when ``r_1 < s_1 < r_2 < ...``, all negative when
        ``s_1 < r_1 < s_2 < ...``.
    """
    s = np.asarray(zeros, dtype=float).reshape(-1)
    r = np.asarray(poles, dtype=float).reshape(-1)
    _check_interlacing(s, r)
    K = np.empty(r.size)
    for i, ri in enumerate(r):
        others = np.delete(r, i)
        K[i] = np.prod(s - ri) / np.prod(others - ri)
    return 1.0, K


def coupling_from_interlacing(kind, zeros, poles):
    """Coupling equal to ``prod(s_j - lam) / prod(r_k - lam)``.

    The ``MU`` convention needs ``s_1 < r_1 < ...`` (negative ``K``), the
    ``NU`` convention ``r_1 < s_1 < ...`` (positive ``K``).
    """
    kind = Kind(kind)
    constant, K = from_interlacing(zeros, poles)
    if kind is Kind.MU:
        if np.any(K >= 0):
            raise InterlacingViolation("mu convention needs zeros below poles")
        return EigenparameterCoupling.mu(0.0, constant, poles, -K)
    if np.any(K <= 0):
        raise InterlacingViolation("nu convention needs poles below zeros")
    return EigenparameterCoupling.nu(0.0, constant, poles, K)
