"""Interlacing couplings that rule out double eigenvalues.

mu = (1 - lam)/(9/4 - lam) has its zero below its pole, nu = (9/4 - lam)/(1 - lam)
its pole below its zero.  With these couplings every eigenvalue is simple and
neither pole is an eigenvalue.
"""

from herglotz_sl import ScanOptions, configs, find_spectrum, pole_characteristics
from herglotz_sl.rational import from_interlacing

const, K = from_interlacing([1.0], [2.25])
print(f"(1 - lam)/(9/4 - lam) = {const} - ({K[0]:+.4f})/(lam - 9/4)")
const, K = from_interlacing([2.25], [1.0])
print(f"(9/4 - lam)/(1 - lam) = {const} - ({K[0]:+.4f})/(lam - 1)")

problem = configs.no_double_slice()
print("\nspectrum in (0, 10):")
for r in find_spectrum(problem, ScanOptions(window=(0.0, 10.0))):
    print(f"  {r.lam:.10f}  multiplicity {r.multiplicity}")

for lam0 in (1.0, 2.25):
    cls = pole_characteristics(problem, lam0)
    print(f"pole {lam0}: {cls.variant.value}, |left| = {abs(cls.left_char):.4f}, "
          f"|right| = {abs(cls.right_char):.4f}, eigenvalue: {cls.is_eigenvalue}")
