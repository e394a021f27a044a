"""Frame diagnostics for dilated systems {f(q^n x)}: correlations to factorizations.

The correlation sequence gamma(k) = <f o T^k, f> is the Fourier data of the
spectral measure of ``f``; its Hermitian Toeplitz forms bracket the L^2 norm
of weighted orbit sums between frame constants, the Fejér means of gamma
estimate the spectral density, and a nonnegative density factorizes as the
squared modulus of a polynomial (spectral factorization).  A Dirichlet-series
boundedness test covers the dilation-basis criterion for odd 2-periodic
profiles given by sine coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz as _toeplitz

from .errors import NumericalError, SchemaError
from .series import CoefficientSequence
from .torusfn import TorusFunction
from .transfer import ExpandingMap

_PSD_TOL = 1e-10


@dataclass
class CorrelationData:
    """gamma(k) = <f o T^k, f> for k = 0..K, with gamma(-k) = conj gamma(k).

    The order-(K+1) Toeplitz matrix built from gamma must be positive
    semidefinite to tolerance; this is checked at construction since every
    downstream bound assumes it.
    """

    gamma: np.ndarray
    source: str = "exact-fourier"
    f_ref: str = ""

    def __post_init__(self):
        self.gamma = np.asarray(self.gamma, dtype=np.complex128)
        if self.gamma.ndim != 1 or len(self.gamma) == 0:
            raise SchemaError("correlation data must be a nonempty vector")
        if abs(self.gamma[0].imag) > 1e-12 * (1 + abs(self.gamma[0])):
            raise SchemaError("gamma(0) must be real")
        lam_min = float(np.linalg.eigvalsh(self.toeplitz(len(self.gamma)))[0])
        if lam_min < -_PSD_TOL:
            raise SchemaError(
                f"correlations are not positive semidefinite (min eig {lam_min:.3e})"
            )

    @property
    def max_order(self) -> int:
        return len(self.gamma)

    def toeplitz(self, N: int) -> np.ndarray:
        """Hermitian Toeplitz matrix [gamma(m - n)] of size N."""
        if N > len(self.gamma):
            raise SchemaError(f"order {N} exceeds stored correlations {len(self.gamma)}")
        col = self.gamma[:N]
        return _toeplitz(col, np.conj(col))

    def quadratic_form(self, a) -> float:
        """a* T a = E-side second moment of sum a_n f o T^n (exact)."""
        a = np.asarray(a, dtype=np.complex128)
        T = self.toeplitz(len(a))
        return float(np.real(np.conj(a) @ T @ a))


def correlations_exact(map_: ExpandingMap, f: TorusFunction, K: int) -> CorrelationData:
    """Exact correlations of a trigonometric polynomial under x -> q x mod 1.

    gamma(k) = sum_m f^(q^k m) conj f^(m) by orthogonality of the characters.
    """
    if K < 0:
        raise SchemaError("correlation order must be nonnegative")
    coeffs = f.coeffs_dict()
    gamma = np.zeros(K + 1, dtype=np.complex128)
    for k in range(K + 1):
        step = map_.q**k
        total = 0j
        for m, c in coeffs.items():
            hit = coeffs.get(m * step)
            if hit is not None:
                total += hit * np.conj(c)
        gamma[k] = total
    return CorrelationData(gamma, source="exact-fourier", f_ref=repr(f))


def dilated_sine_correlations(c, K: int, q: int = 3) -> CorrelationData:
    """Gram data of {phi(q^n x)} for phi = sum_k c_k sin(pi k x) on [0, 1].

    With the sine functions orthogonal of square 1/2, the Gram matrix is
    Toeplitz with gamma(d) = (1/2) sum_k c_k c_{q^d k}.  ``c`` is indexed
    from 1 (c[0] is the coefficient of sin(pi x)).
    """
    c = np.asarray(c, dtype=np.float64)
    n = len(c)
    gamma = np.zeros(K + 1, dtype=np.complex128)
    for d in range(K + 1):
        step = q**d
        total = 0.0
        for k in range(1, n + 1):
            kk = k * step
            if kk <= n:
                total += c[k - 1] * c[kk - 1]
        gamma[d] = total / 2.0
    return CorrelationData(gamma, source="dilated-sine", f_ref="sine-profile")


@dataclass
class RieszBounds:
    """Extremal Toeplitz eigenvalues per order and the frame estimates.

    ``a_sq_est`` / ``b_sq_est`` are the running sup of lambda_max and inf of
    lambda_min; they estimate the essential bounds of the spectral density
    (reported as estimates, with the order trend as the diagnostic).
    """

    orders: list[int]
    lambda_min: np.ndarray
    lambda_max: np.ndarray
    a_sq_est: float
    b_sq_est: float
    is_riesz: bool
    threshold: float
    plateau_tol: float


def riesz_bounds(
    corr: CorrelationData,
    orders,
    threshold: float = 1e-3,
    plateau_tol: float = 0.2,
) -> RieszBounds:
    """Extremal eigenvalues of the Toeplitz forms at the requested orders.

    ``is_riesz`` is a declared heuristic: the smallest eigenvalue must sit
    above ``threshold`` and be flat over the last three orders (relative
    drop below ``plateau_tol``).
    """
    orders = sorted(int(N) for N in orders)
    if not orders or orders[0] < 1:
        raise SchemaError("orders must be positive")
    lam_min, lam_max = [], []
    for N in orders:
        evs = np.linalg.eigvalsh(corr.toeplitz(N))
        if evs[0] < -_PSD_TOL:
            raise NumericalError(
                f"indefinite Toeplitz form at order {N}", {"lambda_min": float(evs[0])}
            )
        lam_min.append(float(evs[0]))
        lam_max.append(float(evs[-1]))
    lam_min_arr = np.array(lam_min)
    lam_max_arr = np.array(lam_max)
    b_sq = float(np.min(lam_min_arr))
    a_sq = float(np.max(lam_max_arr))
    tail = lam_min_arr[-3:]
    plateau = bool(
        len(tail) < 3
        or (tail.max() - tail.min()) <= plateau_tol * max(tail.max(), threshold)
    )
    return RieszBounds(
        orders=orders,
        lambda_min=lam_min_arr,
        lambda_max=lam_max_arr,
        a_sq_est=a_sq,
        b_sq_est=b_sq,
        is_riesz=bool(b_sq >= threshold and plateau),
        threshold=threshold,
        plateau_tol=plateau_tol,
    )


@dataclass
class DensityEstimate:
    t_grid: np.ndarray
    values: np.ndarray
    inf: float
    sup: float
    order: int


def fejer_density(corr: CorrelationData, N: int, t_grid) -> DensityEstimate:
    """Fejér mean s_N(t) = sum_{|k|<=N} (1 - |k|/(N+1)) gamma(k) e^{ikt}.

    The values are Rayleigh quotients of the order-(N+1) Toeplitz form, so
    they are real and (for admissible correlation data) nonnegative; a dip
    below -1e-9 flags invalid input.  Density values are relative to the
    normalized length measure on the circle (total mass 1), so the mean of
    s_N is gamma(0).
    """
    if N + 1 > corr.max_order:
        raise SchemaError(f"need correlations up to {N}, have {corr.max_order - 1}")
    t = np.asarray(t_grid, dtype=np.float64)
    ks = np.arange(1, N + 1)
    w = 1.0 - ks / (N + 1.0)
    phases = np.exp(1j * np.multiply.outer(t, ks))
    vals = np.real(corr.gamma[0]) + 2 * np.real(phases @ (w * corr.gamma[1 : N + 1]))
    inf, sup = float(np.min(vals)), float(np.max(vals))
    if inf < -1e-9:
        raise NumericalError("Fejér mean dips negative", {"inf": inf})
    return DensityEstimate(t, vals, inf, sup, N)


# ---------------------------------------------------------------------------
# spectral factorization
# ---------------------------------------------------------------------------


def fejer_riesz_factor(coeffs, pairing_tol: float = 1e-7):
    """Factor a nonnegative trigonometric polynomial as |Q(e^{it})|^2.

    ``coeffs`` maps k in -n..n to c_k with c_{-k} = conj(c_k) and
    p(t) = sum c_k e^{ikt} >= 0.  Returns the coefficient vector
    (q_0, ..., q_n) of the polynomial Q with roots outside the open unit
    disk (boundary roots allowed) and Q(0) real positive, so that
    |Q(e^{it})|^2 = p(t).
    """
    table = {int(k): complex(v) for k, v in dict(coeffs).items()}
    n = max(abs(k) for k in table) if table else 0
    c = np.zeros(2 * n + 1, dtype=np.complex128)
    for k, v in table.items():
        c[k + n] = v
    herm_err = float(np.max(np.abs(c - np.conj(c[::-1]))))
    if herm_err > 1e-10 * (1 + np.max(np.abs(c))):
        raise SchemaError("coefficients are not Hermitian (polynomial not real)")
    t_chk = np.linspace(0, 2 * np.pi, max(4096, 64 * (n + 1)), endpoint=False)
    vals = np.real(np.exp(1j * np.multiply.outer(t_chk, np.arange(-n, n + 1))) @ c)
    if float(np.min(vals)) < -1e-10 * max(1.0, float(np.max(np.abs(vals)))):
        raise SchemaError(f"polynomial is negative on the circle (min {vals.min():.3e})")
    if n == 0:
        val = float(np.real(c[n]))
        return np.array([math.sqrt(max(val, 0.0))], dtype=np.complex128)

    # roots of z^n p(z) come in pairs (r, 1/conj r); boundary roots are double
    poly = c[::-1]  # numpy orders from the z^(2n) coefficient down
    roots = np.roots(poly)
    inside, boundary = [], []
    for r in roots:
        ar = abs(r)
        if abs(ar - 1.0) <= 1e-7:
            boundary.append(r)
        elif ar < 1.0:
            inside.append(r)
    # validate pairing: every inside root should have a reciprocal partner
    outside = [r for r in roots if abs(r) > 1.0 + 1e-7]
    for r in inside:
        target = 1.0 / np.conj(r)
        dists = [abs(s - target) for s in outside]
        if not dists or min(dists) > pairing_tol * max(1.0, abs(target)):
            raise NumericalError(
                "root pairing failed", {"root": complex(r), "expected": complex(target)}
            )
    # boundary roots appear with even multiplicity; cluster and halve
    boundary_half = []
    used = np.zeros(len(boundary), dtype=bool)
    for i, r in enumerate(boundary):
        if used[i]:
            continue
        used[i] = True
        partner = None
        for j in range(i + 1, len(boundary)):
            if not used[j] and abs(boundary[j] - r) < 1e-4 * max(1.0, abs(r)):
                partner = j
                break
        if partner is None:
            raise NumericalError(
                "boundary root of odd multiplicity", {"root": complex(r)}
            )
        used[partner] = True
        boundary_half.append((r + boundary[partner]) / 2)

    chosen = [1.0 / np.conj(r) for r in inside] + boundary_half
    if len(chosen) != n:
        raise NumericalError(
            "unexpected factor degree after root selection",
            {"expected": n, "got": len(chosen)},
        )
    lead = abs(c[-1])  # |c_n|
    scale = math.sqrt(lead * float(np.prod([abs(r) for r in inside])) if inside else lead)
    q = np.array([scale], dtype=np.complex128)
    for r in chosen:
        q = np.convolve(q, np.array([-r, 1.0], dtype=np.complex128))
    # q holds Q's coefficients (q_0 ... q_n); rotate so Q(0) is real positive
    if abs(q[0]) > 0:
        q = q * (np.conj(q[0]) / abs(q[0]))
    else:  # Q(0) = 0 can only come from boundary roots at the origin; rotate by top
        q = q * (np.conj(q[-1]) / abs(q[-1]))
    return q


def factor_reconstruction(q: np.ndarray, t_grid) -> np.ndarray:
    """|Q(e^{it})|^2 on a grid, for residual checks."""
    t = np.asarray(t_grid, dtype=np.float64)
    z = np.exp(1j * t)
    vals = np.polyval(q[::-1], z)
    return np.abs(vals) ** 2


# ---------------------------------------------------------------------------
# symmetrization
# ---------------------------------------------------------------------------


def symmetrize_correlations(corr: CorrelationData) -> CorrelationData:
    """Correlations of the reflection-symmetrized spectral data: Re gamma."""
    return CorrelationData(
        np.real(corr.gamma).astype(np.complex128),
        source=corr.source + "+symmetrized",
        f_ref=corr.f_ref,
    )


def symmetrize_density(values_pos: np.ndarray, values_neg: np.ndarray) -> np.ndarray:
    """(s(t) + s(-t)) / 2 given samples at t and -t."""
    return 0.5 * (np.asarray(values_pos) + np.asarray(values_neg))


def symmetrize(obj):
    """Symmetrize correlation data (or a (s(t), s(-t)) pair of sample arrays)."""
    if isinstance(obj, CorrelationData):
        return symmetrize_correlations(obj)
    if isinstance(obj, tuple) and len(obj) == 2:
        return symmetrize_density(*obj)
    raise SchemaError("symmetrize expects CorrelationData or a pair of sample arrays")


# ---------------------------------------------------------------------------
# Dirichlet-series criterion for dilation Riesz bases
# ---------------------------------------------------------------------------


@dataclass
class HLSReport:
    """Boundedness of D(s) = sum c_n n^{-s} on a right-half-plane rectangle.

    ``inf_interval`` / ``sup_interval`` fold the truncation tail into the
    reported ranges.  The verdict compares the inf against ``zero_threshold``:
    bounded away from zero on the tested region, violated, or inconclusive
    when the tail swamps the estimate near the left edge.
    """

    inf_interval: tuple[float, float]
    sup_interval: tuple[float, float]
    verdict: str
    zero_threshold: float
    grid: dict
    conditions: dict = field(default_factory=dict)


def _dirichlet_values(cvals: np.ndarray, sigmas: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """|D| on the grid, summing n^{-sigma} e^{-it log n} term by term."""
    n = np.arange(1, len(cvals) + 1, dtype=np.float64)
    logn = np.log(n)
    out = np.empty((len(sigmas), len(ts)), dtype=np.complex128)
    for i, sig in enumerate(sigmas):
        radial = cvals * n ** (-sig)
        out[i] = np.exp(-1j * np.multiply.outer(ts, logn)) @ radial
    return np.abs(out)


def hls_criterion(
    c: CoefficientSequence,
    sigma_min: float = 0.05,
    sigma_max: float = 4.0,
    t_max: float = 50.0,
    sigma_steps: int = 40,
    t_steps: int = 201,
    truncation: int = 20000,
    zero_threshold: float = 0.1,
) -> HLSReport:
    """Grid test of "analytic and bounded away from 0 and infinity" for D(s).

    ``c`` holds the sine-expansion coefficients (index n >= 1; the stored
    index-0 entry is ignored).  Power-rule coefficients are summed to
    ``truncation`` with the integral tail bound folded into the intervals;
    explicit coefficients are finite and exact.

    Also evaluates the two classical sufficient conditions when they are
    decidable for the rule: the dominant-first-coefficient test
    (sum_{n>=2} |c_n| < c_1 = 1) and, for power rules, total
    multiplicativity with a convergent sum over primes.
    """
    if sigma_min <= 0:
        raise SchemaError("sigma_min must be positive (right half-plane only)")
    kind = c.rule[0]
    if kind == "power":
        tau = c.rule[1]
        length = truncation
        cvals = np.arange(1, length + 1, dtype=np.float64) ** (-tau)

        def tail(sig):
            s = tau + sig
            if s <= 1:
                return math.inf
            return length ** (1 - s) / (s - 1)

    elif kind == "explicit":
        cvals = np.asarray(c._explicit[1:], dtype=np.complex128)
        if len(cvals) == 0:
            raise SchemaError("need at least c_1")

        def tail(sig):
            return 0.0

    else:
        raise SchemaError("hls criterion needs a power rule or explicit coefficients")

    sigmas = np.linspace(sigma_min, sigma_max, sigma_steps)
    ts = np.linspace(-t_max, t_max, t_steps)
    mags = _dirichlet_values(np.asarray(cvals, dtype=np.complex128), sigmas, ts)
    tails = np.array([tail(s) for s in sigmas])
    inf_lower = float(np.min(np.clip(mags - tails[:, None], 0.0, None)))
    inf_upper = float(np.min(mags + tails[:, None]))
    sup_lower = float(np.max(np.clip(mags - tails[:, None], 0.0, None)))
    sup_upper = float(np.max(mags + tails[:, None]))

    conditions: dict = {}
    if kind == "power":
        # c_1 = 1 automatically; sum_{n>=2} n^{-tau} = zeta(tau) - 1 with tail bound
        head = float(np.sum(cvals[1:]))
        total = head + tail(0.0) if math.isfinite(tail(0.0)) else math.inf
        conditions["dominant_first"] = bool(total < 1.0)
        conditions["totally_multiplicative"] = True
        conditions["prime_sum_finite"] = bool(tau > 1.0)
    else:
        head = float(np.sum(np.abs(cvals[1:])))
        c1 = cvals[0]
        conditions["dominant_first"] = bool(abs(c1 - 1.0) < 1e-12 and head < 1.0)

    if inf_lower >= zero_threshold:
        verdict = "satisfied on tested region"
    elif inf_upper < zero_threshold:
        verdict = "violated"
    else:
        verdict = "inconclusive near sigma_min"
    return HLSReport(
        inf_interval=(inf_lower, inf_upper),
        sup_interval=(sup_lower, sup_upper),
        verdict=verdict,
        zero_threshold=zero_threshold,
        grid={
            "sigma_min": sigma_min,
            "sigma_max": sigma_max,
            "t_max": t_max,
            "sigma_steps": sigma_steps,
            "t_steps": t_steps,
            "truncation": len(cvals),
        },
        conditions=conditions,
    )


# ---------------------------------------------------------------------------
# coboundary detection
# ---------------------------------------------------------------------------


@dataclass
class CoboundaryReport:
    verdict: str
    orders: list[int]
    lambda_min: np.ndarray
    decay_slope: float | None
    plateau_level: float


def coboundary_probe(
    map_: ExpandingMap,
    g: TorusFunction,
    N_orders,
    plateau_threshold: float = 1e-3,
    decay_slope_threshold: float = -1.0,
) -> CoboundaryReport:
    """Distinguish frame-like dilation systems from coboundary-degenerate ones.

    Computes lambda_min of the Gram of {g(q^n x)} at increasing orders and
    fits a log-log decay slope: a power-law collapse signals that g is (close
    to) u - u o T, while a plateau above the threshold signals a lower frame
    bound.
    """
    if g.coeff(0) != 0:
        raise SchemaError("coboundary probe requires a mean-zero function")
    orders = sorted(int(N) for N in N_orders)
    if g.is_zero:
        return CoboundaryReport(
            "coboundary-like (zero function)", orders, np.zeros(len(orders)), None, 0.0
        )
    corr = correlations_exact(map_, g, max(orders))
    lam_min = np.array(
        [float(np.linalg.eigvalsh(corr.toeplitz(N))[0]) for N in orders]
    )
    plateau_level = float(lam_min[-1])
    slope = None
    positive = lam_min > 0
    if np.sum(positive) >= 2:
        slope = float(
            np.polyfit(np.log(np.array(orders)[positive]), np.log(lam_min[positive]), 1)[0]
        )
    if plateau_level >= plateau_threshold and (slope is None or slope > -0.5):
        verdict = "Riesz (not coboundary)"
    elif slope is not None and slope <= decay_slope_threshold:
        verdict = "coboundary-like"
    else:
        verdict = "inconclusive"
    return CoboundaryReport(verdict, orders, lam_min, slope, plateau_level)
