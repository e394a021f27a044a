"""Transfer operator of x -> 3x mod 1 acting on Fourier tables.

Walks through the basic objects: a trigonometric polynomial on the circle,
its norms, the decimation action of the transfer operator, the martingale
difference decomposition, and the sup-norm decay profile that certifies the
convergence-system hypotheses.
"""

import numpy as np

from ergoseries.torusfn import TorusFunction, empirical_modulus
from ergoseries.transfer import (
    ExpandingMap,
    decay_profile,
    hypothesis_check,
    martingale_decomposition,
    perron_frobenius,
    preimage_sum_apply,
)

T = ExpandingMap(3)

# A two-frequency test function: cos(2 pi x) + 0.5 cos(2 pi 9 x).
f = TorusFunction.cosine(1) + TorusFunction.cosine(9, 0.5)
nb = f.norms()
print("norms:  sup in [%.6f, %.6f],  L2 = %.6f,  Wiener = %.3f" % (
    nb.sup_lower, nb.sup_upper, nb.l2, nb.wiener))

# The transfer operator decimates the spectrum: frequency 9 = 3^2 survives
# two applications and lands on frequency 1.
for n in range(4):
    print(f"L^{n} f coefficients:", perron_frobenius(T, f, n).coeffs_dict())

# Same operator, evaluated as the average over preimages -- they agree.
xs = np.linspace(0, 1, 5, endpoint=False)
err = np.max(np.abs(preimage_sum_apply(T, f, xs) - perron_frobenius(T, f, 1).evaluate(xs)))
print("preimage-sum vs decimation max error:", err)

# Martingale differences sieve the support by powers of 3; their sup norms
# are the profile behind every concentration bound downstream.
for i, d in enumerate(martingale_decomposition(T, f)):
    print(f"d_{i} support:", sorted(k for k in d.coeffs_dict() if k != 0))
report = hypothesis_check(T, f)
print("mean-zero:", report.mean_zero, " summable differences:", report.summable_differences)
print("Delta* =", report.profile.delta_star, " sigma^2 =", report.profile.sigma_sq)

# Sup-norm decay of the iterates, with the fitted per-step rate.
prof = decay_profile(T, f, 5)
print("decay profile (upper ends):", np.round(prof.sup_upper, 6))
print("fitted decay rate per step:", prof.fitted_rate)

# Modulus of continuity estimated on the grid.
mod = empirical_modulus(TorusFunction.cosine(1, grid_size=8192), [0.5, 0.1, 0.01, 0.001])
print("modulus table:", [(s, round(v, 6)) for s, v in mod.table])
