"""TOML problem files.

Example::

    name = "double_eigenvalue"

    [geometry]
    a = "pi"
    b = "pi"

    [boundary]          # radians; "pi", "pi/2", "3*pi/4" are accepted
    alpha = 0.0
    beta = "pi"

    [potential]
    kind = "zero"       # zero | piecewise_constant | sampled | expression

    [mu]
    slope = 0.0
    offset = 0.0
    poles = [1.0]
    residue_squares = [1.0]

    [nu]
    slope = 0.0
    offset = 1.0
    poles = [0.0]
    residue_squares = [1.0]

    [scan]
    window = [0.1, 5.0]
    grid = 40
    refine_tol = 1e-10
    pole_exclusion_radius = 1e-4

    [fd]
    mesh_h = 0.0157

    [output]
    directory = "out"
    precision = 12
"""

from __future__ import annotations

import ast
import math
import operator
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import ProblemValidationError
from .problem import (
    ClosedFormPotential,
    PiecewiseConstantPotential,
    ProblemSpec,
    SampledPotential,
    ZeroPotential,
)
from .rational import EigenparameterCoupling
from .spectrum import ScanOptions

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["ProblemFile", "load_problem_file", "parse_problem", "dump_problem", "parse_number",
           "load_rhs_file"]

_SECTIONS = {
    "geometry": {"a", "b"},
    "boundary": {"alpha", "beta"},
    "potential": {"kind", "breakpoints", "values", "grid", "expression"},
    "mu": {"slope", "offset", "poles", "residue_squares"},
    "nu": {"slope", "offset", "poles", "residue_squares"},
    "scan": {"window", "grid", "refine_tol", "pole_exclusion_radius"},
    "fd": {"mesh_h"},
    "output": {"directory", "precision"},
}

_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval_node(node.operand))
    raise ValueError("only numbers, pi and + - * / ** are allowed")


def parse_number(value, path):
    """A real number, or a string arithmetic expression in ``pi``."""
    if isinstance(value, bool):
        raise ProblemValidationError(path, "expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(_eval_node(ast.parse(value, mode="eval")))
        except (SyntaxError, ValueError, ZeroDivisionError) as exc:
            raise ProblemValidationError(path, f"cannot parse {value!r}: {exc}") from None
    raise ProblemValidationError(path, f"expected a number, got {type(value).__name__}")


def _numbers(value, path):
    if not isinstance(value, list):
        raise ProblemValidationError(path, "expected a list")
    return [parse_number(v, f"{path}[{k}]") for k, v in enumerate(value)]


def _require(section, key, path):
    if key not in section:
        raise ProblemValidationError(f"{path}.{key}", "required")
    return section[key]


def _coupling(section, kind, path):
    if not isinstance(section, dict):
        raise ProblemValidationError(path, "expected a table")
    slope = parse_number(section.get("slope", 0.0), f"{path}.slope")
    offset = parse_number(section.get("offset", 0.0), f"{path}.offset")
    poles = _numbers(section.get("poles", []), f"{path}.poles")
    res = _numbers(section.get("residue_squares", []), f"{path}.residue_squares")
    if slope < 0:
        raise ProblemValidationError(f"{path}.slope", f"slope must be >= 0, got {slope}")
    if len(poles) != len(res):
        raise ProblemValidationError(f"{path}.residue_squares",
                                     f"{len(poles)} poles but {len(res)} residue squares")
    if any(b <= a for a, b in zip(poles[:-1], poles[1:])):
        raise ProblemValidationError(f"{path}.poles", "poles must be strictly increasing")
    bad = [r for r in res if not r > 0]
    if bad:
        raise ProblemValidationError(f"{path}.residue_squares",
                                     f"residue squares must be > 0, got {bad[0]}")
    factory = EigenparameterCoupling.mu if kind == "mu" else EigenparameterCoupling.nu
    try:
        return factory(slope, offset, poles, res)
    except ValueError as exc:
        raise ProblemValidationError(path, str(exc)) from None


def _potential(section):
    kind = section.get("kind", "zero")
    try:
        if kind == "zero":
            return ZeroPotential()
        if kind == "piecewise_constant":
            return PiecewiseConstantPotential(
                _numbers(_require(section, "breakpoints", "potential"), "potential.breakpoints"),
                _numbers(_require(section, "values", "potential"), "potential.values"),
            )
        if kind == "sampled":
            return SampledPotential(
                _numbers(_require(section, "grid", "potential"), "potential.grid"),
                _numbers(_require(section, "values", "potential"), "potential.values"),
            )
        if kind == "expression":
            expr = _require(section, "expression", "potential")
            if not isinstance(expr, str):
                raise ProblemValidationError("potential.expression", "expected a string")
            return ClosedFormPotential.from_expression(expr)
    except ProblemValidationError:
        raise
    except Exception as exc:  # sympy raises a zoo of types on bad input
        raise ProblemValidationError(f"potential.{kind}", str(exc)) from None
    raise ProblemValidationError("potential.kind", f"unknown kind {kind!r}")


@dataclass(frozen=True)
class ProblemFile:
    problem: ProblemSpec
    scan: ScanOptions
    mesh_h: float | None = None
    output_directory: str | None = None
    precision: int = 12
    raw: dict = field(default_factory=dict, compare=False, repr=False)


def parse_problem(data):
    """Validate a decoded TOML document and build a :class:`ProblemFile`."""
    if not isinstance(data, dict):
        raise ProblemValidationError("<root>", "expected a table")
    for key, value in data.items():
        if key == "name":
            continue
        if key not in _SECTIONS:
            raise ProblemValidationError(key, "unknown section")
        if not isinstance(value, dict):
            raise ProblemValidationError(key, "expected a table")
        extra = set(value) - _SECTIONS[key]
        if extra:
            raise ProblemValidationError(f"{key}.{sorted(extra)[0]}", "unknown key")

    geom = data.get("geometry")
    if geom is None:
        raise ProblemValidationError("geometry", "required")
    a = parse_number(_require(geom, "a", "geometry"), "geometry.a")
    b = parse_number(_require(geom, "b", "geometry"), "geometry.b")
    bnd = data.get("boundary", {})
    alpha = parse_number(bnd.get("alpha", 0.0), "boundary.alpha")
    beta = parse_number(bnd.get("beta", math.pi), "boundary.beta")
    potential = _potential(data.get("potential", {}))
    mu = _coupling(data.get("mu", {}), "mu", "mu")
    nu = _coupling(data.get("nu", {}), "nu", "nu")
    problem = ProblemSpec(a, b, alpha, beta, potential, mu, nu, name=str(data.get("name", "")))

    scan = data.get("scan", {})
    kwargs = {}
    if "window" in scan:
        win = _numbers(scan["window"], "scan.window")
        if len(win) != 2 or not win[0] < win[1]:
            raise ProblemValidationError("scan.window", "expected [lo, hi] with lo < hi")
        kwargs["window"] = tuple(win)
    if "grid" in scan:
        grid = scan["grid"]
        if not isinstance(grid, int) or isinstance(grid, bool) or grid < 1:
            raise ProblemValidationError("scan.grid", "expected a positive integer")
        kwargs["grid_points_per_unit"] = grid
    for key in ("refine_tol", "pole_exclusion_radius"):
        if key in scan:
            val = parse_number(scan[key], f"scan.{key}")
            if not val > 0:
                raise ProblemValidationError(f"scan.{key}", "must be positive")
            kwargs[key] = val
    opts = ScanOptions(**kwargs)

    mesh_h = None
    if "mesh_h" in data.get("fd", {}):
        mesh_h = parse_number(data["fd"]["mesh_h"], "fd.mesh_h")
        if not mesh_h > 0:
            raise ProblemValidationError("fd.mesh_h", "must be positive")
    out = data.get("output", {})
    directory = out.get("directory")
    if directory is not None and not isinstance(directory, str):
        raise ProblemValidationError("output.directory", "expected a string")
    precision = out.get("precision", 12)
    if not isinstance(precision, int) or isinstance(precision, bool) or not 1 <= precision <= 17:
        raise ProblemValidationError("output.precision", "expected an integer in [1, 17]")
    return ProblemFile(problem, opts, mesh_h, directory, precision, data)


def load_problem_file(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ProblemValidationError("<file>", f"invalid TOML: {exc}") from None
    return parse_problem(data)


def _fmt_list(values):
    return "[" + ", ".join(repr(float(v)) for v in values) + "]"


def dump_problem(problem, scan=None):
    """TOML text describing `problem` (inverse of :func:`parse_problem`)."""
    lines = [f'name = "{problem.name}"', "", "[geometry]", f"a = {problem.a!r}",
             f"b = {problem.b!r}", "", "[boundary]", f"alpha = {problem.alpha!r}",
             f"beta = {problem.beta!r}", "", "[potential]"]
    pot = problem.potential.to_dict()
    lines.append(f'kind = "{pot.pop("kind")}"')
    for key, value in pot.items():
        lines.append(f'{key} = "{value}"' if isinstance(value, str) else f"{key} = {_fmt_list(value)}")
    for name, c in (("mu", problem.mu), ("nu", problem.nu)):
        lines += ["", f"[{name}]", f"slope = {c.slope!r}", f"offset = {c.offset!r}",
                  f"poles = {_fmt_list(c.poles)}", f"residue_squares = {_fmt_list(c.residue_squares)}"]
    if scan is not None:
        lines += ["", "[scan]", f"window = {_fmt_list(scan.window)}",
                  f"grid = {scan.grid_points_per_unit}", f"refine_tol = {scan.refine_tol!r}",
                  f"pole_exclusion_radius = {scan.pole_exclusion_radius!r}"]
    return "\n".join(lines) + "\n"


def load_rhs_file(path, problem, mesh):
    """Right-hand side block vector from a TOML file.

    ``[function]`` holds expressions in ``x`` for ``left`` and ``right``
    (omitted sides are zero); ``[vectors]`` holds ``h1``, ``h2`` and optional
    ``h1_imag``, ``h2_imag``.
    """
    from .grid import BlockVector, GridFunction

    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ProblemValidationError("<rhs>", f"invalid TOML: {exc}") from None
    func = data.get("function", {})
    sides = []
    for side, xs in (("left", mesh.left), ("right", mesh.right)):
        expr = func.get(side)
        if expr is None:
            sides.append(np.zeros(xs.size))
            continue
        try:
            pot = ClosedFormPotential.from_expression(str(expr))
        except Exception as exc:
            raise ProblemValidationError(f"function.{side}", str(exc)) from None
        sides.append(pot(xs))
    vec = data.get("vectors", {})
    parts = []
    for key, size in (("h1", problem.mu_block.size), ("h2", problem.nu_block.size)):
        re = np.array(_numbers(vec.get(key, [0.0] * size), f"vectors.{key}"))
        im = np.array(_numbers(vec.get(f"{key}_imag", [0.0] * size), f"vectors.{key}_imag"))
        if re.size != size or im.size != size:
            raise ProblemValidationError(f"vectors.{key}", f"expected {size} entries")
        parts.append(re + 1j * im)
    return BlockVector(GridFunction(mesh, sides[0], sides[1]), parts[0], parts[1])
