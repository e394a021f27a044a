"""Frame diagnostics for dilated systems {f(3^n x)}.

Correlation sequences and their Toeplitz forms bracket the L2 norm of
weighted orbit sums between frame constants; Fejér means of the correlations
estimate the spectral density; a nonnegative density factorizes as |Q|^2; and
a Dirichlet-series window test covers the dilation-basis criterion for sine
profiles.  The coboundary profile sin(pi x) - sin(3 pi x) shows the
degenerate case where the lower frame bound collapses.
"""

import numpy as np

from ergoseries.riesz import (
    coboundary_probe,
    correlations_exact,
    dilated_sine_correlations,
    factor_reconstruction,
    fejer_density,
    fejer_riesz_factor,
    hls_criterion,
    riesz_bounds,
)
from ergoseries.series import CoefficientSequence
from ergoseries.torusfn import TorusFunction
from ergoseries.transfer import ExpandingMap

T = ExpandingMap(3)

# cos(2 pi x) is exactly orthogonal under dilation by powers of 3.
corr = correlations_exact(T, TorusFunction.cosine(1), 32)
print("cos correlations:", np.round(corr.gamma[:4].real, 12))

# Dilated sine profile sin(pi x) + c3 sin(3 pi x): tridiagonal Toeplitz Gram.
for c3 in (0.5, -1.0):
    corr = dilated_sine_correlations([1.0, 0.0, c3], K=128)
    rb = riesz_bounds(corr, [8, 32, 128])
    print(f"c3={c3}: lambda_min per order {np.round(rb.lambda_min, 6)}, "
          f"riesz={rb.is_riesz}")

# The Fejér means of the c3 = 0.5 profile converge to 0.625 + 0.5 cos t.
corr = dilated_sine_correlations([1.0, 0.0, 0.5], K=512)
t = np.linspace(-np.pi, np.pi, 512, endpoint=False)
dens = fejer_density(corr, 400, t)
print(f"density window: inf {dens.inf:.4f} (target 0.125), sup {dens.sup:.4f} (target 1.125)")

# Spectral factorization: 5/4 + cos t = |1 + z/2|^2 on the circle.
q = fejer_riesz_factor({-1: 0.5, 0: 1.25, 1: 0.5})
resid = np.max(np.abs(factor_reconstruction(q, t) - (1.25 + np.cos(t))))
print("factor coefficients:", np.round(q.real, 12), " reconstruction residual:", resid)

# Dirichlet-series window test: n^(-2) sine coefficients give a series
# pinched between zeta(4)/zeta(2) and zeta(2) on the right half-plane.
rep = hls_criterion(CoefficientSequence.power(2.0, 64), sigma_steps=20, t_steps=81)
print("window inf/sup:", np.round(rep.inf_interval, 4), np.round(rep.sup_interval, 4),
      "->", rep.verdict)

# The coboundary detector: plateau vs power-law collapse of the Gram floor.
for g, label in [
    (TorusFunction.cosine(1), "cos(2 pi x)"),
    (TorusFunction.cosine(1) - TorusFunction.cosine(3), "cos - cos(3.)"),
]:
    rep = coboundary_probe(T, g, [8, 16, 32, 64])
    print(f"{label}: {rep.verdict} (plateau {rep.plateau_level:.2e}, slope {rep.decay_slope})")
