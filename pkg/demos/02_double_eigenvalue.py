"""A two-dimensional eigenspace sitting on a pole of mu.

mu = 1/(lam - 1) and nu = (lam - 1)/lam.  At lam = 1 the transmission
conditions decouple: the left piece needs y'(0-) nu(1) + y(0-) = 0, i.e.
u(0-) = 0, and the right piece needs v(0+) = 0.  Both hold for the sine
solutions on intervals of length pi, so lam = 1 carries two independent
eigenfunctions, one supported on each side.
"""

import math

import numpy as np

from herglotz_sl import Mesh, ScanOptions, assemble_fd, configs, fd_spectrum, find_spectrum, pole_characteristics
from herglotz_sl.resolvent import apply_L, eigenfunctions, lift_eigenfunction

problem = configs.double_eigenvalue()

cls = pole_characteristics(problem, 1.0)
print(f"pole lam = 1: {cls.variant.value}")
print(f"  left characteristic  {abs(cls.left_char):.1e}")
print(f"  right characteristic {abs(cls.right_char):.1e}")
print(f"  multiplicity {cls.multiplicity}")

cls0 = pole_characteristics(problem, 0.0)
print(f"pole lam = 0: {cls0.variant.value}, characteristics "
      f"{cls0.left_char.real:.6f} and {cls0.right_char.real:.6f} (pi - 1 = {math.pi - 1:.6f}), "
      f"not an eigenvalue")

print("\nspectrum in (0.1, 5):")
records = find_spectrum(problem, ScanOptions(window=(0.1, 5.0)))
for r in records:
    print(f"  {r.lam:.10f}  multiplicity {r.multiplicity}  {r.classification.value}")

mesh = Mesh.for_problem(problem, h=1e-3)
double = next(r for r in records if r.multiplicity == 2)
print("\neigenvectors of the block operator at lam = 1:")
for f in eigenfunctions(problem, double, mesh):
    Y = lift_eigenfunction(problem, 1.0, f)
    side = "left" if np.max(np.abs(f.right)) == 0 else "right"
    defect = (apply_L(problem, Y) - Y * 1.0).norm() / Y.norm()
    print(f"  supported on the {side}: |LY - Y| / |Y| = {defect:.1e}")

print("\noracle eigenvalues near 1:")
for h in (math.pi / 200, math.pi / 400, math.pi / 800):
    vals = fd_spectrum(assemble_fd(problem, h), 10)
    near = vals[np.abs(vals - 1) < 5e-3]
    print(f"  h = pi/{round(math.pi / h):<4d} " + "  ".join(f"{v:.9f}" for v in near))
