"""With constant zero couplings the interface is invisible.

The problem reduces to -y'' = lam y on [-pi, pi] with Dirichlet ends, whose
eigenvalues are (n/2)^2.  Shooting recovers them to about 1e-11 and the
discrete oracle converges to them at second order.
"""

import math

import numpy as np

from herglotz_sl import ScanOptions, assemble_fd, configs, fd_spectrum, find_spectrum

problem = configs.continuous()
records = find_spectrum(problem, ScanOptions(window=(0.01, 26.0)))
exact = (np.arange(1, 11) / 2) ** 2

print(" n   shooting            exact     error")
for n, (rec, e) in enumerate(zip(records, exact), start=1):
    print(f"{n:2d}   {rec.lam:.12f}   {e:7.4f}   {abs(rec.lam - e):.1e}")

print("\noracle errors for the first five eigenvalues:")
for h in (math.pi / 50, math.pi / 100, math.pi / 200):
    err = np.abs(fd_spectrum(assemble_fd(problem, h), 5) - exact[:5])
    print(f"  h = pi/{round(math.pi / h):<4d} " + "  ".join(f"{x:.2e}" for x in err))
print("each halving of h divides the errors by about 4")
