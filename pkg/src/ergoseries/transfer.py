"""Transfer operator of x -> q*x mod 1 and its martingale structure.

On Fourier tables the normalized transfer operator acts by decimation: the
coefficient of frequency k in L^n f is the coefficient of q^n * k in f.
Conditional expectations onto the k-th pullback sigma-algebra keep exactly
the frequencies divisible by q^k, and the martingale differences d_i sieve
the support into the annuli {q^i | n, q^(i+1) not| n}.  For finitely
supported tables all of these are exact, which is what makes the hypothesis
checker a certificate rather than an estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError
from .torusfn import TorusFunction


@dataclass(frozen=True)
class ExpandingMap:
    """The endomorphism T x = q x mod 1 with integer base q >= 2."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or self.q < 2:
            raise SchemaError("expanding map base q must be an integer >= 2")
        object.__setattr__(self, "q", int(self.q))

    def apply(self, x):
        return np.mod(self.q * np.asarray(x, dtype=np.float64), 1.0)

    def preimages(self, x):
        """The q preimages (x + i)/q, i = 0..q-1."""
        x = np.asarray(x, dtype=np.float64)
        i = np.arange(self.q, dtype=np.float64)
        return (np.expand_dims(x, -1) + i) / self.q


def perron_frobenius(map_: ExpandingMap, f: TorusFunction, n: int = 1) -> TorusFunction:
    """L^n f by coefficient decimation: (L^n f)^(k) = f^(q^n k)."""
    if n < 0:
        raise SchemaError("power of the transfer operator must be nonnegative")
    if n == 0:
        return f
    step = map_.q**n
    coeffs = {
        int(freq) // step: amp
        for freq, amp in zip(f.freqs, f.amps)
        if freq % step == 0
    }
    return TorusFunction(coeffs, f.grid_size)


def preimage_sum_apply(map_: ExpandingMap, f: TorusFunction, x) -> np.ndarray:
    """(1/q) sum over preimages f((x+i)/q): the sum form of L, for cross-checks."""
    pts = map_.preimages(x)
    return np.mean(f.evaluate(pts), axis=-1)


def conditional_expectation(map_: ExpandingMap, f: TorusFunction, k: int) -> TorusFunction:
    """E(f | T^-k B): the sub-series over frequencies divisible by q^k."""
    if k < 0:
        raise SchemaError("conditioning level must be nonnegative")
    if k == 0:
        return f
    step = map_.q**k
    coeffs = {
        int(freq): amp for freq, amp in zip(f.freqs, f.amps) if freq % step == 0
    }
    return TorusFunction(coeffs, f.grid_size)


def martingale_difference(map_: ExpandingMap, f: TorusFunction, i: int) -> TorusFunction:
    """d_i(f): frequencies divisible by q^i but not q^(i+1)."""
    if i < 0:
        raise SchemaError("martingale index must be nonnegative")
    lo, hi = map_.q**i, map_.q ** (i + 1)
    coeffs = {
        int(freq): amp
        for freq, amp in zip(f.freqs, f.amps)
        if freq != 0 and freq % lo == 0 and freq % hi != 0
    }
    return TorusFunction(coeffs, f.grid_size)


def truncation_index(map_: ExpandingMap, f: TorusFunction) -> int:
    """Smallest i0 such that d_i(f) = 0 for all i >= i0 (exact for polynomials)."""
    nonzero = [abs(int(n)) for n in f.freqs if n != 0]
    if not nonzero:
        return 0
    i = 0
    while map_.q**i <= max(nonzero):
        i += 1
    return i


def martingale_decomposition(map_: ExpandingMap, f: TorusFunction) -> list[TorusFunction]:
    """[d_0(f), ..., d_{i_max - 1}(f)] with f = mean + sum of the pieces."""
    return [martingale_difference(map_, f, i) for i in range(truncation_index(map_, f))]


@dataclass
class MartingaleProfile:
    """Sup-norm sequence of the martingale differences of one function.

    ``deltas`` holds the upper ends of the sup-norm intervals (the
    conservative direction for every summability claim built on them);
    ``deltas_lower`` the certified grid maxima.  ``delta_star`` and
    ``sigma_sq`` are the sum and the sum of squares of ``deltas``.
    """

    deltas: np.ndarray
    deltas_lower: np.ndarray
    delta_star: float
    sigma_sq: float
    truncation_index: int

    def delta(self, i: int) -> float:
        if i < 0:
            raise SchemaError("profile index must be nonnegative")
        return float(self.deltas[i]) if i < len(self.deltas) else 0.0


@dataclass
class HypothesisReport:
    """Outcome of the convergence-system hypothesis check for one function."""

    mean_zero: bool
    summable_differences: bool
    profile: MartingaleProfile
    wiener_norm: float
    notes: dict = field(default_factory=dict)


def hypothesis_check(map_: ExpandingMap, f: TorusFunction) -> HypothesisReport:
    """Certify the two convergence-system hypotheses for a trigonometric polynomial.

    For finite tables the tail conditional expectations vanish identically
    once q^k exceeds the top frequency, so the mean-zero condition holds iff
    the 0-coefficient vanishes; the difference sup-norms are summable with
    sum at most the Wiener norm.
    """
    mean_zero = f.coeff(0) == 0
    diffs = martingale_decomposition(map_, f)
    uppers, lowers = [], []
    for d in diffs:
        nb = d.norms()
        uppers.append(nb.sup_upper)
        lowers.append(nb.sup_lower)
    deltas = np.array(uppers, dtype=np.float64)
    profile = MartingaleProfile(
        deltas=deltas,
        deltas_lower=np.array(lowers, dtype=np.float64),
        delta_star=float(np.sum(deltas)),
        sigma_sq=float(np.sum(deltas**2)),
        truncation_index=len(diffs),
    )
    notes = {}
    if not mean_zero:
        notes["mean_zero"] = "mean coefficient is nonzero; tail expectations converge to it"
    return HypothesisReport(
        mean_zero=mean_zero,
        summable_differences=True,
        profile=profile,
        wiener_norm=f.wiener_norm,
        notes=notes,
    )


@dataclass
class DecayProfile:
    """Sup-norm intervals of L^n f and the summability diagnostics built on them."""

    sup_lower: np.ndarray
    sup_upper: np.ndarray
    fitted_rate: float | None
    sum_upper: float
    summable: bool
    diff_sum_upper: float
    tail_vanishes: bool

    @property
    def condition_strong(self) -> bool:
        """Sum of the sup norms is finite (trivially true for polynomials)."""
        return self.summable

    @property
    def condition_weak(self) -> bool:
        """Sup norms tend to 0 and consecutive differences are summable."""
        return self.tail_vanishes and np.isfinite(self.diff_sum_upper)


def decay_profile(map_: ExpandingMap, f: TorusFunction, n_max: int) -> DecayProfile:
    """Sup-norm intervals of L^n f for n = 0..n_max plus a fitted decay rate.

    Requires a mean-zero input.  The fitted rate is the negative slope of a
    least-squares line through log(sup upper) on the nonzero entries; None
    when fewer than two entries are nonzero.
    """
    if f.coeff(0) != 0:
        raise SchemaError("decay profile requires a mean-zero function")
    lowers, uppers = [], []
    diff_sum = 0.0
    prev = f
    prev_bounds = f.norms()
    for n in range(n_max + 1):
        lowers.append(prev_bounds.sup_lower)
        uppers.append(prev_bounds.sup_upper)
        nxt = perron_frobenius(map_, prev, 1)
        nxt_bounds = nxt.norms()
        diff_sum += (prev - nxt).norms().sup_upper
        prev, prev_bounds = nxt, nxt_bounds
    uppers_arr = np.array(uppers)
    lowers_arr = np.array(lowers)
    positive = np.nonzero(uppers_arr > 0)[0]
    rate = None
    if len(positive) >= 2:
        slope = np.polyfit(positive, np.log(uppers_arr[positive]), 1)[0]
        rate = float(-slope)
    tail_vanishes = truncation_index(map_, f) <= n_max
    return DecayProfile(
        sup_lower=lowers_arr,
        sup_upper=uppers_arr,
        fitted_rate=rate,
        sum_upper=float(np.sum(uppers_arr)),
        summable=True,
        diff_sum_upper=float(diff_sum),
        tail_vanishes=tail_vanishes,
    )
