"""Weighted orbit series sum a_n f(3^n x): moments against concentration bounds.

Estimates second and fourth moments by Monte Carlo and compares them with the
bounds implied by the martingale profile, checks the sub-gaussian exponential
moment, measures the maximal inequality on a block, and runs the
anti-concentration floor that certifies divergence for non-square-summable
weights.
"""

import numpy as np

from ergoseries.series import (
    CoefficientSequence,
    divergence_test,
    maximal_check,
    mc_moment,
    subgaussian_check,
)
from ergoseries.torusfn import TorusFunction
from ergoseries.transfer import ExpandingMap

T = ExpandingMap(3)
lacunary = TorusFunction.exponential(1)
cosine = TorusFunction.cosine(1)

# Harmonic weights: square-summable, so the series converges a.e.
a = CoefficientSequence.power(1.0, 10)
print("weights 1/n:  l2^2 =", round(a.l2_sq, 6), " BV =", round(a.bv, 6))

for p in (2, 4):
    rep = mc_moment(lacunary, T, a, 10, p, 100000, seed=7)
    print(f"E|S|^{p}: estimate {rep.estimate:.5f} +- {rep.std_error:.5f}, "
          f"bound {rep.bound:.5f}, passed={rep.passed}")

# For distinct powers of 3 the second moment is exactly sum a_n^2.
print("orthogonality oracle:", float(np.sum(np.abs(a.values(10)) ** 2)))

# Exponential moments stay below exp(lambda^2 sigma^2 / 2).
for rep in subgaussian_check(cosine, T, a, 10, [0.25, 0.5, 1.0], 100000, seed=8):
    print(f"lambda={rep.lam}: E e^(lam S) = {rep.estimate:.5f}, "
          f"bound {rep.bound:.5f} [{rep.status}]")

# Maximal inequality on a block of 16 terms: measure the block constant first,
# then check the running maximum against C' = C / (1 - 2^(-1/4)).
rep = maximal_check(lacunary, T, CoefficientSequence.constant(1.0, 40), 4, 19, 4.0, 30000, seed=9)
print(f"block constant C = {rep.block_constant:.4f}, C'/C = {rep.c_prime_factor:.4f}, "
      f"||max||_4 = {rep.max_norm_estimate:.4f} <= {rep.bound:.4f}: {rep.passed}")

# Divergence floor for a_n = n^(-0.3): the square sum grows without bound and
# the measured exceedance fractions clear the anti-concentration floor.
div = divergence_test(lacunary, T, CoefficientSequence.power(0.3, 40), [10, 20, 40], 20000, seed=10)
print("divergence verdict:", div.verdict, " floor =", round(div.floor, 6))
for N, v, frac, se, ok in div.rows:
    print(f"  N={N}: variance {v:.3f}, exceedance fraction {frac:.4f} (+- {se:.4f})")
