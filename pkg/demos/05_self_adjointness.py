"""The block operator is symmetric on its domain.

Random smooth block vectors are bent into the domain (the two interface
conditions tie the function traces to the vector parts) and the form
<LF, G> - <F, LG> is evaluated by quadrature.  The discrete oracle, built
from the same form, has a real spectrum.
"""

import math

import numpy as np

from herglotz_sl import Mesh, assemble_fd, configs, verify_symmetry
from herglotz_sl.fd import admissible_block_vector, fd_spectrum_general

rng = np.random.default_rng(0)
print(f"{'configuration':<20} {'max defect':>12} {'max |Im| oracle':>16}")
for name, build in sorted(configs.SHIPPED.items()):
    problem = build()
    mesh = Mesh.for_problem(problem, h=1e-3)
    worst = 0.0
    for _ in range(10):
        F = admissible_block_vector(problem, mesh, rng)
        G = admissible_block_vector(problem, mesh, rng)
        worst = max(worst, verify_symmetry(problem, F, G) / (F.norm() * G.norm()))
    imag = np.max(np.abs(fd_spectrum_general(assemble_fd(problem, math.pi / 100)).imag))
    print(f"{name:<20} {worst:>12.1e} {imag:>16.1e}")
