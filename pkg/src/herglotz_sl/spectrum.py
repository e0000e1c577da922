"""Eigenvalue search over a real window.

Off the coupling poles eigenvalues are the zeros of the characteristic
function; they are bracketed by sign changes on a uniform sample grid and
refined with Brent's method.  Each pole inside the window is tested
separately with the decoupled characteristics.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import NumericalFailure, SuspectedDoubleRoot
from .rational import pole_tolerance
from .transmission import Variant, characteristic, pole_characteristics

__all__ = [
    "ScanOptions",
    "EigenvalueRecord",
    "scan_regular",
    "scan_poles",
    "find_spectrum",
]


@dataclass(frozen=True)
class ScanOptions:
    """Scan parameters.

    ``workers > 1`` distributes the sampling and refinement of the
    pole-free subintervals over a process pool.
    """

    window: tuple = (-5.0, 25.0)
    grid_points_per_unit: int = 40
    refine_tol: float = 1e-10
    pole_exclusion_radius: float = 1e-4
    workers: int = 1

    def __post_init__(self):
        lo, hi = (float(w) for w in self.window)
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"window must satisfy lo < hi, got {self.window}")
        object.__setattr__(self, "window", (lo, hi))
        if int(self.grid_points_per_unit) < 1:
            raise ValueError("grid_points_per_unit must be a positive integer")
        object.__setattr__(self, "grid_points_per_unit", int(self.grid_points_per_unit))
        if not (self.refine_tol > 0 and self.pole_exclusion_radius > 0):
            raise ValueError("tolerances must be positive")
        if int(self.workers) < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class EigenvalueRecord:
    lam: float
    multiplicity: int
    classification: Variant
    residual: float
    bracket: tuple
    details: object = field(default=None, compare=False)

    @property
    def ambiguous(self):
        return bool(getattr(self.details, "ambiguous", False))


def _subintervals(problem, opts):
    lo, hi = opts.window
    r = opts.pole_exclusion_radius
    poles = [p for p in problem.all_poles if lo - r < p < hi + r]
    edges = [lo]
    for p in poles:
        edges.extend([p - r, p + r])
    edges.append(hi)
    out = []
    for a, b in zip(edges[0::2], edges[1::2]):
        a, b = max(a, lo), min(b, hi)
        if b > a:
            out.append((a, b))
    return out


def _widen_edges(problem, intervals, opts):
    """Push the outer window edges out by one sample step so that a root
    sitting exactly on an edge still shows a sign change."""
    lo, hi = opts.window
    step = 1.0 / opts.grid_points_per_unit
    r = opts.pole_exclusion_radius
    poles = np.asarray(problem.all_poles, dtype=float)

    def clear(a, b):
        return not np.any((poles > a - r) & (poles < b + r))

    out = list(intervals)
    if out and out[0][0] == lo and clear(lo - step, lo):
        out[0] = (lo - step, out[0][1])
    if out and out[-1][1] == hi and clear(hi, hi + step):
        out[-1] = (out[-1][0], hi + step)
    return out


def _psi_scalar(problem):
    def f(lam):
        return float(np.real(characteristic(problem, np.array([lam]))[0]))
    return f


def _sample(problem, interval, ppu):
    a, b = interval
    n = max(8, int(math.ceil((b - a) * ppu))) + 1
    grid = np.linspace(a, b, n)
    return grid, np.real(characteristic(problem, grid))


def _refine(problem, lo, hi, tol):
    f = _psi_scalar(problem)
    fa, fb = f(lo), f(hi)
    if fa == 0.0 or fb == 0.0 or fa * fb > 0:
        # a sample sits on the root and batched and scalar evaluation
        # disagree about the sign of the rounding-level value there
        return (lo, abs(fa)) if abs(fa) <= abs(fb) else (hi, abs(fb))
    root = brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    return root, abs(f(root))


def _merge_close(records):
    """Collapse records closer than 1e-9 (relative), keeping the smaller residual."""
    out = []
    for rec in sorted(records, key=lambda r: r.lam):
        if out and abs(rec.lam - out[-1].lam) < 1e-9 * max(1.0, abs(rec.lam)):
            prev = out[-1]
            keep = rec if rec.residual < prev.residual else prev
            bracket = (min(prev.bracket[0], rec.bracket[0]), max(prev.bracket[1], rec.bracket[1]))
            out[-1] = EigenvalueRecord(keep.lam, 1, Variant.REGULAR, keep.residual, bracket)
        else:
            out.append(rec)
    return out


def _probe_minimum(problem, grid, vals, k):
    """Refine a local minimum of |psi| at sample k without sign change.

    Returns a list of new brackets (two if the curve actually dips through
    zero between samples) and the minimum value found.
    """
    s = math.copysign(1.0, vals[k])
    f = _psi_scalar(problem)
    res = minimize_scalar(lambda x: s * f(x), bounds=(grid[k - 1], grid[k + 1]),
                          method="bounded", options={"xatol": 1e-13})
    xm, fm = float(res.x), float(res.fun)
    if fm < 0:
        return [(grid[k - 1], xm), (xm, grid[k + 1])], 0.0, xm
    return [], fm, xm


def _scan_interval(problem, interval, opts):
    grid, vals = _sample(problem, interval, opts.grid_points_per_unit)
    brackets = []
    exact = []
    for k in range(len(grid) - 1):
        if vals[k] == 0.0:
            exact.append(grid[k])
        elif vals[k] * vals[k + 1] < 0:
            brackets.append((grid[k], grid[k + 1]))
    if vals[-1] == 0.0:
        exact.append(grid[-1])
    suspects = []
    absv = np.abs(vals)
    scale = max(1.0, float(np.median(absv)))
    for k in range(1, len(grid) - 1):
        if vals[k] == 0.0 or vals[k - 1] * vals[k] <= 0 or vals[k] * vals[k + 1] <= 0:
            continue
        if absv[k] < absv[k - 1] and absv[k] < absv[k + 1] and absv[k] < 1e-2 * scale:
            extra, fmin, xm = _probe_minimum(problem, grid, vals, k)
            if extra:
                brackets.extend(extra)
            elif fmin < 1e-6 * scale:
                suspects.append((xm, fmin))
    records = []
    for lo, hi in sorted(brackets):
        root, res = _refine(problem, lo, hi, opts.refine_tol)
        records.append(EigenvalueRecord(root, 1, Variant.REGULAR, res, (lo, hi)))
    for x in exact:
        records.append(EigenvalueRecord(float(x), 1, Variant.REGULAR, 0.0, (x, x)))
    return records, suspects


def _scan_task(args):
    problem, interval, opts = args
    return _scan_interval(problem, interval, opts)


def scan_regular(problem, opts=None):
    """Simple eigenvalues away from the coupling poles.

    Warns with :class:`SuspectedDoubleRoot` where the characteristic
    function touches zero without changing sign.
    """
    opts = opts or ScanOptions()
    intervals = _widen_edges(problem, _subintervals(problem, opts), opts)
    tasks = [(problem, iv, opts) for iv in intervals]
    if opts.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=opts.workers) as pool:
            results = list(pool.map(_scan_task, tasks))
    else:
        results = [_scan_task(t) for t in tasks]
    lo, hi = opts.window
    slack = 1e-9 * max(1.0, abs(lo), abs(hi))
    records = []
    for recs, suspects in results:
        records.extend(r for r in recs if lo - slack <= r.lam <= hi + slack)
        for xm, fmin in suspects:
            warnings.warn(
                f"characteristic function has a near-zero minimum {fmin:.2e} at "
                f"lambda={xm:.12g} without a sign change",
                SuspectedDoubleRoot, stacklevel=2,
            )
    return _merge_close(records)


def _pole_list(problem, lo, hi):
    poles = []
    for p in problem.all_poles:
        if lo <= p <= hi and not any(abs(p - q) < pole_tolerance(q) for q in poles):
            poles.append(float(p))
    return poles


def scan_poles(problem, opts=None):
    """Eigenvalues located at coupling poles, with multiplicity 1 or 2."""
    opts = opts or ScanOptions()
    lo, hi = opts.window
    records = []
    for p in _pole_list(problem, lo, hi):
        cls = pole_characteristics(problem, p)
        if not cls.is_eigenvalue:
            continue
        vanishing = [abs(c) for c, z in ((cls.left_char, cls.left_vanishes),
                                         (cls.right_char, cls.right_vanishes)) if z]
        records.append(EigenvalueRecord(cls.lam, cls.multiplicity, cls.variant,
                                        max(vanishing), (cls.lam, cls.lam), cls))
    return records


def find_spectrum(problem, opts=None):
    """Union of :func:`scan_regular` and :func:`scan_poles`, sorted and de-duplicated."""
    opts = opts or ScanOptions()
    pole_recs = scan_poles(problem, opts)
    merged = list(pole_recs)
    for rec in scan_regular(problem, opts):
        if any(abs(rec.lam - p.lam) < opts.pole_exclusion_radius for p in pole_recs):
            continue
        if any(abs(rec.lam - m.lam) < 1e-9 * max(1.0, abs(rec.lam)) for m in merged):
            continue
        merged.append(rec)
    merged.sort(key=lambda r: r.lam)
    for a, b in zip(merged[:-1], merged[1:]):
        if a.bracket[1] > b.bracket[0]:
            raise NumericalFailure(f"overlapping brackets at {a.lam} and {b.lam}")
    return merged
