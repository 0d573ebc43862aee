"""The resolvent gap bound delta_n for generic perturbed spectra.

delta_n controls when the perturbative eigenvalue formula is valid: it sums
row norms of the perturbation against the squared distance of the spectrum
from the gap-radius circle around mu_n.  Uniform gaps keep delta_n -> 0 for
any vanishing row norms; growing gaps (mu_n = n^2) tolerate even unbounded
row norms m^alpha with alpha < 1/2, at rate n^{alpha-1}.
"""

import numpy as np

from rabi_spectra import SpectrumModel, delta_n

print("uniform gaps mu_n = n, row norms 1/sqrt(m): delta_n -> 0")
size = 4000
norms = np.concatenate(([0.0], 1.0 / np.sqrt(np.arange(1.0, size))))
uniform = SpectrumModel(mu=np.arange(size, dtype=float), row_norms=norms)
for n in (10, 100, 1000):
    print(f"  n = {n:5}: delta_n = {delta_n(uniform, n, size - 1):.6f}")

print("\nquadratic gaps mu_n = n^2, row norms m^0.3: delta_n = O(n^{-0.7})")
quad = SpectrumModel(
    mu=np.arange(size, dtype=float) ** 2,
    row_norms=np.arange(size, dtype=float) ** 0.3,
)
for n in (10, 50, 200, 500):
    value = delta_n(quad, n, size - 1)
    print(f"  n = {n:4}: delta_n = {value:.6f}, delta_n * n^0.7 = {value * n**0.7:.4f}")

print("\nconstant row norms c = 0.4 on mu_n = n^2 (bounded perturbation):")
const = SpectrumModel(
    mu=np.arange(size, dtype=float) ** 2, row_norms=np.full(size, 0.4)
)
for n in (10, 100, 500):
    print(f"  n = {n:4}: delta_n = {delta_n(const, n, size - 1):.6f}")
