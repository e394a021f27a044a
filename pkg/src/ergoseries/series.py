"""Weighted orbit series sum_n a_n f(q^n x): partial sums, probes, moment checks.

Orbit points are computed by exact integer arithmetic on rational seeds (every
float is one), so partial sums carry no orbit drift; the declared precision
budget below is an interface contract, not a floating-point necessity.

The Monte-Carlo operations estimate moments and exponential moments of the
partial sums and compare them against the concentration bounds implied by the
martingale profile of ``f`` (sub-gaussian constant, L^p bounds, a maximal
inequality, and an anti-concentration floor for divergence).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import digamma

from . import orbits
from .errors import PrecisionBudgetError, SchemaError
from .torusfn import TorusFunction
from .transfer import ExpandingMap, hypothesis_check

#: Declared horizon contract for weighted partial sums (base 3 reference).
PRECISION_BUDGET = 60

_MC_CHUNK = 16384


# ---------------------------------------------------------------------------
# coefficient sequences
# ---------------------------------------------------------------------------


class CoefficientSequence:
    """Weights (a_n) with analytic classification flags.

    Rules:
      * ``power(alpha)``: a_0 = 0, a_n = n**(-alpha) for n >= 1
      * ``constant(c)``:  a_n = c for all n
      * ``explicit(v)``:  the listed values, zero beyond them

    ``length`` is the largest index the sequence is declared for; partial
    sums must stay within it.  Classification flags (square-summability,
    divergence of the plain sum, bounded variation, decay to zero) are set
    analytically from the rule, never estimated numerically.
    """

    def __init__(self, rule: tuple, length: int):
        if length < 0:
            raise SchemaError("sequence length must be nonnegative")
        self.rule = rule
        self.length = int(length)
        kind = rule[0]
        if kind == "power":
            alpha = rule[1]
            self.tends_to_zero = alpha > 0
            self.l2_finite = alpha > 0.5
            self.sum_diverges = alpha <= 1
            self.abs_summable = alpha > 1
            self.bv_finite = alpha >= 0
        elif kind == "constant":
            c = rule[1]
            self.tends_to_zero = c == 0
            self.l2_finite = c == 0
            self.sum_diverges = c != 0
            self.abs_summable = c == 0
            self.bv_finite = True
        elif kind == "explicit":
            self.tends_to_zero = True
            self.l2_finite = True
            self.sum_diverges = False
            self.abs_summable = True
            self.bv_finite = True
        else:
            raise SchemaError(f"unknown coefficient rule {kind!r}")

    # -- constructors --------------------------------------------------------

    @classmethod
    def power(cls, alpha: float, length: int = PRECISION_BUDGET) -> "CoefficientSequence":
        return cls(("power", float(alpha)), length)

    @classmethod
    def constant(cls, c: float, length: int = PRECISION_BUDGET) -> "CoefficientSequence":
        return cls(("constant", complex(c) if isinstance(c, complex) else float(c)), length)

    @classmethod
    def explicit(cls, values) -> "CoefficientSequence":
        values = np.asarray(values, dtype=np.complex128)
        if values.ndim != 1:
            raise SchemaError("explicit coefficients must be a 1-d sequence")
        seq = cls(("explicit",), max(len(values) - 1, 0))
        seq._explicit = values.copy()
        return seq

    # -- values ---------------------------------------------------------------

    def values(self, n_max: int | None = None) -> np.ndarray:
        """a_0..a_{n_max} as a complex array (n_max defaults to ``length``)."""
        n_max = self.length if n_max is None else int(n_max)
        if n_max > self.length:
            raise SchemaError(f"index {n_max} beyond declared length {self.length}")
        kind = self.rule[0]
        if kind == "power":
            out = np.zeros(n_max + 1, dtype=np.complex128)
            n = np.arange(1, n_max + 1, dtype=np.float64)
            out[1:] = n ** (-self.rule[1])
            return out
        if kind == "constant":
            return np.full(n_max + 1, self.rule[1], dtype=np.complex128)
        vals = np.zeros(n_max + 1, dtype=np.complex128)
        src = self._explicit[: n_max + 1]
        vals[: len(src)] = src
        return vals

    def a_star(self, N: int) -> float:
        """max_{n > N} |a_n| over the infinite tail (0 beyond explicit data)."""
        if N < 0:
            raise SchemaError("tail index must be nonnegative")
        kind = self.rule[0]
        if kind == "power":
            alpha = self.rule[1]
            if alpha > 0:
                return float((N + 1) ** (-alpha))
            if alpha == 0:
                return 1.0
            return math.inf
        if kind == "constant":
            return abs(self.rule[1])
        tail = np.abs(self._explicit[N + 1 :])
        return float(tail.max()) if tail.size else 0.0

    @property
    def support_end(self) -> int | None:
        """Last index with a nonzero value, when the support is finite."""
        kind = self.rule[0]
        if kind == "explicit":
            nz = np.nonzero(self._explicit)[0]
            return int(nz[-1]) if nz.size else -1
        if kind == "constant" and self.rule[1] == 0:
            return -1
        return None

    def abs_tail_bound(self, N: int) -> float:
        """Upper bound for sum_{n > N} |a_n|; +inf when not absolutely summable."""
        kind = self.rule[0]
        if kind == "power" and self.rule[1] > 1:
            alpha = self.rule[1]
            return float(N ** (1 - alpha) / (alpha - 1)) if N >= 1 else math.inf
        if kind == "explicit":
            return float(np.sum(np.abs(self._explicit[N + 1 :])))
        if kind == "constant" and self.rule[1] == 0:
            return 0.0
        return math.inf

    # -- stored aggregates ------------------------------------------------------

    @property
    def l2_sq(self) -> float:
        return float(np.sum(np.abs(self.values()) ** 2))

    @property
    def bv(self) -> float:
        v = self.values()
        return float(np.sum(np.abs(np.diff(v))))

    @property
    def rm_sum(self) -> float:
        """sum over n >= 1 of a_n^2 log^2 n (the quasi-orthogonal threshold)."""
        v = np.abs(self.values())
        n = np.arange(len(v), dtype=np.float64)
        logs = np.zeros_like(n)
        logs[1:] = np.log(n[1:])
        return float(np.sum((v * logs) ** 2))

    def l2_partial(self, N: int) -> float:
        return float(np.sum(np.abs(self.values(N)) ** 2))

    def __repr__(self) -> str:
        return f"CoefficientSequence(rule={self.rule!r}, length={self.length})"


# ---------------------------------------------------------------------------
# partial sums on exact orbits
# ---------------------------------------------------------------------------


def _check_budget(N: int, budget: int | None = None) -> None:
    cap = PRECISION_BUDGET if budget is None else int(budget)
    if N > cap:
        raise PrecisionBudgetError(
            f"horizon N={N} exceeds the {cap}-step precision budget for weighted "
            "partial sums"
        )


def _eval_positions(f: TorusFunction, pos: np.ndarray) -> np.ndarray:
    """f at an array of positions, accumulated coefficient by coefficient."""
    out = np.zeros(pos.shape, dtype=np.complex128)
    for freq, amp in zip(f.freqs, f.amps):
        out += amp * np.exp((2j * np.pi * freq) * pos)
    return out


def partial_sum_trajectory(
    f: TorusFunction,
    map_: ExpandingMap,
    a: CoefficientSequence,
    N: int,
    x,
    budget: int | None = None,
) -> np.ndarray:
    """S_0, ..., S_N at one point, S_k = sum_{n<=k} a_n f(q^n x)."""
    _check_budget(N, budget)
    if N > a.length:
        raise SchemaError(f"N={N} exceeds coefficient length {a.length}")
    pos = orbits.orbit_positions(x, map_.q, N)
    terms = a.values(N) * _eval_positions(f, pos)
    return np.cumsum(terms)


def partial_sum(
    f: TorusFunction,
    map_: ExpandingMap,
    a: CoefficientSequence,
    N: int,
    x,
    budget: int | None = None,
) -> complex:
    """sum_{n=0}^{N} a_n f(q^n x) with the orbit computed exactly."""
    return complex(partial_sum_trajectory(f, map_, a, N, x, budget)[-1])


def trajectory_batch(
    f: TorusFunction,
    map_: ExpandingMap,
    a: CoefficientSequence,
    N: int,
    nums,
    den: int,
    budget: int | None = None,
) -> np.ndarray:
    """Trajectories for many rational seeds nums/den; shape (len(nums), N+1)."""
    _check_budget(N, budget)
    if N > a.length:
        raise SchemaError(f"N={N} exceeds coefficient length {a.length}")
    pos = orbits.orbit_matrix(nums, den, map_.q, N)
    terms = _eval_positions(f, pos) * a.values(N)[None, :]
    return np.cumsum(terms, axis=1)


# ---------------------------------------------------------------------------
# Monte-Carlo machinery
# ---------------------------------------------------------------------------


def _as_seedseq(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _mc_mean(stat_fn, samples: int, seed, chunk: int = _MC_CHUNK):
    """Mean and standard error of a statistic over uniform dyadic seeds.

    ``stat_fn(nums, den) -> array`` is evaluated chunk by chunk on split
    seed streams; accumulation happens in fixed chunk order so repeated runs
    are bit-identical.
    """
    n_chunks = max(1, math.ceil(samples / chunk))
    children = _as_seedseq(seed).spawn(n_chunks)
    total = 0.0
    total_sq = 0.0
    count = 0
    for i in range(n_chunks):
        size = min(chunk, samples - count)
        rng = np.random.default_rng(children[i])
        nums, den = orbits.random_dyadic_seeds(rng, size)
        vals = np.asarray(stat_fn(nums, den), dtype=np.float64)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals**2))
        count += size
    mean = total / count
    var = max(total_sq / count - mean**2, 0.0)
    return mean, math.sqrt(var / count), count


@dataclass
class MomentReport:
    """One estimated moment of |S_N| against its concentration bound."""

    p: float
    estimate: float
    std_error: float
    sample_count: int
    bound: float
    passed: bool
    slack: float


def khintchine_bound(delta_star: float, p: float, l2_sq: float) -> float:
    """(sqrt(2) Gamma(p/2)^(1/p) Delta*)^p (sum |a_n|^2)^(p/2)."""
    return (2 ** (p / 2)) * math.gamma(p / 2) * delta_star**p * l2_sq ** (p / 2)


def mc_moment(
    f: TorusFunction,
    map_: ExpandingMap,
    a: CoefficientSequence,
    N: int,
    p: float,
    samples: int,
    seed,
) -> MomentReport:
    """Monte-Carlo estimate of E|S_N|^p with the martingale-profile bound."""
    if p < 1:
        raise SchemaError("moment order must be at least 1")
    profile = hypothesis_check(map_, f).profile
    v = a.l2_partial(N)
    bound = khintchine_bound(profile.delta_star, p, v)

    def stat(nums, den):
        traj = trajectory_batch(f, map_, a, N, nums, den)
        return np.abs(traj[:, -1]) ** p

    estimate, se, count = _mc_mean(stat, samples, seed)
    slack = 4 * se / bound if bound > 0 else 0.0
    passed = estimate <= bound * (1 + slack) if bound > 0 else estimate == 0.0
    return MomentReport(p, estimate, se, count, bound, passed, slack)


def series_sigma_sq(
    map_: ExpandingMap, f: TorusFunction, a: CoefficientSequence, N: int
) -> float:
    """Sub-gaussian constant of S_N via the profile convolution bound.

    ||d_i(S_N)||_inf <= sum_{k <= min(i, N)} |a_k| Delta(i - k), summed in
    squares over i.
    """
    profile = hypothesis_check(map_, f).profile
    deltas = profile.deltas
    avals = np.abs(a.values(N))
    i_max = N + len(deltas)
    total = 0.0
    for i in range(i_max):
        lo = max(0, i - len(deltas) + 1)
        hi = min(i, N)
        if lo > hi:
            continue
        ks = np.arange(lo, hi + 1)
        total += float(np.sum(avals[ks] * deltas[i - ks])) ** 2
    return total


@dataclass
class SubgaussianReport:
    lam: float
    estimate: float
    std_error: float
    bound: float
    status: str  # "pass" | "fail" | "inconclusive"
    slack: float
    sigma_sq: float


def subgaussian_check(
    f: TorusFunction,
    map_: ExpandingMap,
    a: CoefficientSequence,
    N: int,
    lambdas,
    samples: int,
    seed,
) -> list[SubgaussianReport]:
    """Estimate E exp(lambda S_N) against exp(lambda^2 sigma^2 / 2) per lambda.

    Requires a real-valued ``f``.  A lambda whose exponential moment is too
    noisy (standard error above half the estimate) is reported inconclusive
    rather than failed.
    """
    if not f.is_real_valued:
        raise SchemaError("sub-gaussian check requires a real-valued function")
    lambdas = list(lambdas)
    sigma_sq = series_sigma_sq(map_, f, a, N)
    ss = _as_seedseq(seed).spawn(len(lambdas))
    reports = []
    for lam, child in zip(lambdas, ss):
        def stat(nums, den, _l=lam):
            traj = trajectory_batch(f, map_, a, N, nums, den)
            return np.exp(_l * traj[:, -1].real)

        estimate, se, _ = _mc_mean(stat, samples, child)
        try:
            bound = math.exp(lam**2 * sigma_sq / 2)
        except OverflowError:
            bound = math.inf
        slack = 4 * se / bound if math.isfinite(bound) and bound > 0 else 0.0
        noisy = not math.isfinite(estimate) or (estimate > 0 and se / estimate > 0.5)
        if noisy:
            status = "inconclusive"
        else:
            status = "pass" if estimate <= bound * (1 + slack) else "fail"
        reports.append(SubgaussianReport(lam, estimate, se, bound, status, slack, sigma_sq))
    return reports


@dataclass
class MaximalReport:
    """Outcome of the block-maximum inequality measurement."""

    beta: float
    block_constant: float
    c_prime_factor: float
    max_norm_estimate: float
    std_error: float
    bound: float
    passed: bool
    p_idx: int
    q_idx: int


def maximal_factor(beta: float) -> float:
    """C'/C = 1/(1 - 2^(1/beta - 1/2)) from the dyadic-splitting argument."""
    if beta <= 2:
        raise SchemaError("maximal inequality requires beta > 2")
    return 1.0 / (1.0 - 2.0 ** (1.0 / beta - 0.5))


def maximal_check(
    f: TorusFunction,
    map_: ExpandingMap,
    a: CoefficientSequence,
    p_idx: int,
    q_idx: int,
    beta: float,
    samples: int,
    seed,
) -> MaximalReport:
    """Two-stage measurement of the maximal inequality on one index block.

    Stage 1 measures the block constant C = max over sub-blocks of
    ||S_{p',q'}||_beta / sqrt(sum |a_n|^2) on an independent seed stream;
    stage 2 checks ||max_k |S_{p,k}| ||_beta <= C' sqrt(sum |a_n|^2) with
    C' = C / (1 - 2^(1/beta - 1/2)).
    """
    if not 0 <= p_idx <= q_idx:
        raise SchemaError("need 0 <= p <= q")
    factor = maximal_factor(beta)
    child_blocks, child_max = _as_seedseq(seed).spawn(2)
    avals = np.abs(a.values(q_idx))
    v_cum = np.concatenate([[0.0], np.cumsum(avals**2)])

    def block_sums(nums, den):
        traj = trajectory_batch(f, map_, a, q_idx, nums, den)
        cum = np.concatenate([np.zeros((len(nums), 1)), traj], axis=1)
        return cum

    # stage 1: beta-norms of every sub-block
    n_blocks = (q_idx - p_idx + 1) * (q_idx - p_idx + 2) // 2
    sums_pow = np.zeros(n_blocks)
    count = 0
    n_chunks = max(1, math.ceil(samples / _MC_CHUNK))
    for i, ch in enumerate(child_blocks.spawn(n_chunks)):
        size = min(_MC_CHUNK, samples - count)
        rng = np.random.default_rng(ch)
        nums, den = orbits.random_dyadic_seeds(rng, size)
        cum = block_sums(nums, den)
        idx = 0
        for pp in range(p_idx, q_idx + 1):
            for qq in range(pp, q_idx + 1):
                block = np.abs(cum[:, qq + 1] - cum[:, pp]) ** beta
                sums_pow[idx] += float(np.sum(block))
                idx += 1
        count += size
    c_block = 0.0
    idx = 0
    for pp in range(p_idx, q_idx + 1):
        for qq in range(pp, q_idx + 1):
            v = v_cum[qq + 1] - v_cum[pp]
            if v > 0:
                norm = (sums_pow[idx] / count) ** (1 / beta)
                c_block = max(c_block, norm / math.sqrt(v))
            idx += 1

    # stage 2: the running maximum over the block
    def stat(nums, den):
        cum = block_sums(nums, den)
        running = np.abs(cum[:, p_idx + 1 : q_idx + 2] - cum[:, p_idx : p_idx + 1])
        return np.max(running, axis=1) ** beta

    mean_pow, se_pow, count2 = _mc_mean(stat, samples, child_max)
    norm_est = mean_pow ** (1 / beta)
    se_norm = se_pow / (beta * mean_pow) * norm_est if mean_pow > 0 else 0.0
    v_total = v_cum[q_idx + 1] - v_cum[p_idx]
    bound = factor * c_block * math.sqrt(v_total)
    passed = norm_est <= bound * (1 + (4 * se_norm / bound if bound > 0 else 0.0))
    return MaximalReport(
        beta=beta,
        block_constant=c_block,
        c_prime_factor=factor,
        max_norm_estimate=norm_est,
        std_error=se_norm,
        bound=bound,
        passed=passed,
        p_idx=p_idx,
        q_idx=q_idx,
    )


@dataclass
class DivergenceReport:
    verdict: str
    riesz_lower: float | None
    floor: float
    rows: list  # (N, variance, fraction, std_error, floor_ok)
    lam: float
    variance_threshold: float


def divergence_test(
    f: TorusFunction,
    map_: ExpandingMap,
    a: CoefficientSequence,
    N_grid,
    samples: int,
    seed,
    riesz_lower: float | None = None,
    lam: float = 0.5,
    variance_threshold: float = 3.0,
) -> DivergenceReport:
    """Anti-concentration floor test for divergence of the partial sums.

    For each horizon the measured fraction of points with
    |S_N|^2 >= lam * B^2 * V_N must clear the floor
    (1 - lam)^2 B^4 / C_4^4, where B is the lower frame constant of the
    dilated system and C_4 the fourth-moment constant from the martingale
    profile.  When B is unavailable the verdict is inconclusive.
    """
    if not 0 < lam <= 1:
        raise SchemaError("Paley-Zygmund level must lie in (0, 1]")
    if a.l2_finite:
        return DivergenceReport("not applicable (l2)", riesz_lower, 0.0, [], lam, variance_threshold)
    b_const = riesz_lower
    if b_const is None:
        from .riesz import correlations_exact  # local import; one-way dependency

        corr = correlations_exact(map_, f, K=8)
        if np.all(np.abs(corr.gamma[1:]) < 1e-14):
            b_const = math.sqrt(float(corr.gamma[0].real))
    if b_const is None or b_const <= 0:
        return DivergenceReport(
            "inconclusive (no lower frame constant)", None, 0.0, [], lam, variance_threshold
        )
    delta_star = hypothesis_check(map_, f).profile.delta_star
    c4_fourth = khintchine_bound(delta_star, 4, 1.0)  # C_4^4 per unit variance
    floor = (1 - lam) ** 2 * b_const**4 / c4_fourth
    N_grid = list(N_grid)
    children = _as_seedseq(seed).spawn(len(N_grid))
    rows = []
    all_ok = True
    v_last = 0.0
    for N, child in zip(N_grid, children):
        v = a.l2_partial(N)
        v_last = max(v_last, v)
        thresh = lam * b_const**2 * v

        def stat(nums, den, _N=N, _t=thresh):
            traj = trajectory_batch(f, map_, a, _N, nums, den)
            return (np.abs(traj[:, -1]) ** 2 >= _t).astype(np.float64)

        frac, se, _ = _mc_mean(stat, samples, child)
        ok = frac >= floor - 4 * se
        all_ok = all_ok and ok
        rows.append((int(N), v, frac, se, ok))
    if all_ok and v_last >= variance_threshold:
        verdict = "diverges a.e. (certified floor)"
    elif all_ok:
        verdict = "inconclusive (floors hold, variance below threshold)"
    else:
        verdict = "floor violated (check correlation input)"
    return DivergenceReport(verdict, b_const, floor, rows, lam, variance_threshold)


# ---------------------------------------------------------------------------
# convergence probes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeConfig:
    """Declared thresholds for the finite-horizon convergence verdicts.

    ``strict`` mode demands Cauchy stabilisation of the trailing window at
    resolution ``eps`` (or an exact certificate); ``scaled`` mode asks the
    trailing blocks to oscillate below ``scaled_eps`` in units of ||f||_2,
    the resolution appropriate for square-summable tails at desk horizons.
    Every verdict echoes the configuration that produced it.
    """

    eps: float = 1e-6
    window: int = 20
    envelope_c: float = 0.2
    mode: str = "strict"
    scaled_eps: float = 0.8
    scaled_blocks: int = 2
    scaled_block_len: int = 13
    detect_periodic: bool = True
    period_scan: int = 4096
    zero_sum_tol: float = 1e-12

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class ConvergenceVerdict:
    verdict: str  # "converged" | "diverged" | "inconclusive"
    route: str
    value: complex | None
    tail_bound: float | None
    diagnostics: dict = field(default_factory=dict)


def _periodic_tail_value(
    a: CoefficientSequence, cvals: np.ndarray, pre: int, period: int, start: int
):
    """Exact tail sum_{n >= start} a_n c[(n - pre) mod period] for power rules.

    For a_n = n^(-alpha) the arithmetic-progression pieces are Hurwitz zeta
    values; at alpha = 1 the pole cancels against the zero mean of the cycle
    and the digamma function gives the limit.  Returns None when no closed
    form applies.
    """
    if a.rule[0] != "power":
        return None
    alpha = a.rule[1]
    if alpha <= 0:
        return None
    p = period
    tail = 0j
    if abs(alpha - 1.0) < 1e-15:
        for m in range(p):
            n_m = start + ((pre + m - start) % p)
            tail += -cvals[(n_m - pre) % p] * digamma(n_m / p) / p
        return tail
    import mpmath

    for m in range(p):
        n_m = start + ((pre + m - start) % p)
        z = mpmath.zeta(alpha, n_m / p)
        tail += cvals[(n_m - pre) % p] * (p ** (-alpha)) * complex(z)
    return tail


def convergence_probe(
    f: TorusFunction,
    map_: ExpandingMap,
    a: CoefficientSequence,
    x,
    N_max: int,
    config: ProbeConfig | None = None,
    budget: int | None = None,
) -> ConvergenceVerdict:
    """Finite-horizon convergence verdict for sum_n a_n f(q^n x) at one point.

    Routes, in order: exact finite support; Cauchy window at the configured
    resolution; periodic-orbit certificates (zero cycle mean + bounded
    variation gives convergence with an exact or Abel-bounded tail, nonzero
    cycle mean with divergent plain sum gives drift divergence); absolute
    summability of the weights; scaled trailing-block test (scaled mode);
    growth-envelope divergence for sequences whose square sum is
    analytically infinite; else inconclusive.
    """
    cfg = config or ProbeConfig()
    diag: dict = {"config": cfg.as_dict(), "N_max": int(N_max)}
    support_end = a.support_end
    if support_end is not None and support_end <= N_max:
        n_eff = max(support_end, 0)
        s = partial_sum(f, map_, a, n_eff, x, budget) if support_end >= 0 else 0j
        return ConvergenceVerdict("converged", "finite-support", s, 0.0, diag)

    traj = partial_sum_trajectory(f, map_, a, N_max, x, budget)
    w = min(cfg.window, N_max)
    window_vals = traj[N_max - w :]
    osc = float(np.max(np.abs(window_vals[:, None] - window_vals[None, :])))
    diag["window_osc"] = osc
    if osc < cfg.eps:
        return ConvergenceVerdict("converged", "cauchy", complex(traj[-1]), osc, diag)

    if cfg.detect_periodic:
        per = orbits.detect_period(x, map_.q, cfg.period_scan)
        if per is not None:
            pre, period = per
            pos = orbits.orbit_positions(x, map_.q, pre + period - 1)
            cvals = f.evaluate(pos[pre : pre + period])
            cvals = np.atleast_1d(np.asarray(cvals))
            cycle_sum = complex(np.sum(cvals))
            scale = max(1.0, float(np.max(np.abs(cvals))) if cvals.size else 1.0)
            diag["periodic"] = {"preperiod": pre, "period": period, "cycle_sum": cycle_sum}
            zero_sum = abs(cycle_sum) <= cfg.zero_sum_tol * scale
            if zero_sum and a.bv_finite and a.tends_to_zero:
                double = np.concatenate([cvals, cvals])
                prefix = np.cumsum(double)
                c_orbit = float(np.max(np.abs(prefix)))
                tail = _periodic_tail_value(a, cvals, pre, period, N_max + 1)
                if tail is not None:
                    value = complex(traj[-1] + tail)
                    return ConvergenceVerdict(
                        "converged", "abel-periodic-exact", value, 1e-13 * (1 + abs(value)), diag
                    )
                avals = np.abs(a.values(a.length))
                bv_tail = float(np.sum(np.abs(np.diff(avals[N_max:])))) + a.a_star(a.length)
                bound = c_orbit * (a.a_star(N_max) + bv_tail)
                return ConvergenceVerdict(
                    "converged", "abel-periodic", complex(traj[-1]), bound, diag
                )
            if not zero_sum and a.sum_diverges and a.bv_finite:
                return ConvergenceVerdict("diverged", "periodic-drift", None, None, diag)

    if a.abs_summable:
        bound = a.abs_tail_bound(N_max) * f.wiener_norm
        if math.isfinite(bound):
            return ConvergenceVerdict(
                "converged", "absolute", complex(traj[-1]), bound, diag
            )

    if cfg.mode == "scaled":
        scale = f.l2_norm
        n_blocks, blen = cfg.scaled_blocks, cfg.scaled_block_len
        need = n_blocks * blen
        if need <= N_max and scale > 0:
            oscs = []
            for b in range(n_blocks):
                seg = traj[N_max - (b + 1) * blen : N_max - b * blen + 1]
                oscs.append(float(np.max(np.abs(seg[:, None] - seg[None, :]))))
            diag["scaled_block_osc"] = oscs
            if all(o < cfg.scaled_eps * scale for o in oscs):
                return ConvergenceVerdict(
                    "converged", "scaled-cauchy", complex(traj[-1]), max(oscs), diag
                )

    if not a.l2_finite:
        v = np.cumsum(np.abs(a.values(N_max)) ** 2)
        mask = v > 0
        if np.any(mask):
            c_fit = float(np.max(np.abs(traj[mask]) / np.sqrt(v[mask])))
            diag["envelope_c_fit"] = c_fit
            if c_fit > cfg.envelope_c:
                return ConvergenceVerdict("diverged", "envelope", None, None, diag)

    return ConvergenceVerdict("inconclusive", "none", None, None, diag)


def probe_batch(
    f: TorusFunction,
    map_: ExpandingMap,
    a: CoefficientSequence,
    nums,
    den: int,
    N_max: int,
    config: ProbeConfig,
    budget: int | None = None,
) -> list[str]:
    """Vectorised probe verdicts for many seeds (certificate routes skipped).

    Used by sampling experiments over generic (non-periodic) points, where
    only the Cauchy / scaled-block / envelope routes can fire.
    """
    traj = trajectory_batch(f, map_, a, N_max, nums, den, budget)
    n = traj.shape[0]
    verdicts = np.full(n, "inconclusive", dtype=object)

    w = min(config.window, N_max)
    seg = traj[:, N_max - w :]
    osc = np.max(
        np.abs(seg[:, :, None] - seg[:, None, :]), axis=(1, 2)
    )
    converged = osc < config.eps

    if config.mode == "scaled" and f.l2_norm > 0:
        blen, nb = config.scaled_block_len, config.scaled_blocks
        if nb * blen <= N_max:
            ok = np.ones(n, dtype=bool)
            for b in range(nb):
                blk = traj[:, N_max - (b + 1) * blen : N_max - b * blen + 1]
                o = np.max(np.abs(blk[:, :, None] - blk[:, None, :]), axis=(1, 2))
                ok &= o < config.scaled_eps * f.l2_norm
            converged |= ok
    verdicts[converged] = "converged"

    if not a.l2_finite:
        v = np.cumsum(np.abs(a.values(N_max)) ** 2)
        mask = v > 0
        c_fit = np.max(np.abs(traj[:, mask]) / np.sqrt(v[mask])[None, :], axis=1)
        verdicts[(~converged) & (c_fit > config.envelope_c)] = "diverged"
    return list(verdicts)


# ---------------------------------------------------------------------------
# weighted averages and growth envelopes
# ---------------------------------------------------------------------------


def weighted_slln(
    f: TorusFunction, map_: ExpandingMap, weights, x, N_max: int
) -> np.ndarray:
    """Weighted averages A_N = sum_{k<=N} w_k f(q^k x) / W_N for N = 0..N_max."""
    w = np.asarray(weights, dtype=np.float64)
    if len(w) < N_max + 1:
        raise SchemaError("need N_max + 1 weights")
    w = w[: N_max + 1]
    if np.any(w <= 0):
        raise SchemaError("weights must be positive")
    pos = orbits.orbit_positions(x, map_.q, N_max)
    vals = _eval_positions(f, pos)
    return np.cumsum(w * vals) / np.cumsum(w)


def slln_pass_fraction(
    f: TorusFunction,
    map_: ExpandingMap,
    weights,
    N_max: int,
    count: int,
    seed,
    tol: float,
) -> float:
    """Fraction of uniform sample points with |A_{N_max}| below ``tol``."""
    rng = np.random.default_rng(seed)
    nums, den = orbits.random_dyadic_seeds(rng, count)
    w = np.asarray(weights, dtype=np.float64)[: N_max + 1]
    pos = orbits.orbit_matrix(nums, den, map_.q, N_max)
    vals = _eval_positions(f, pos)
    trajs = np.cumsum(w[None, :] * vals, axis=1) / np.cumsum(w)[None, :]
    return float(np.mean(np.abs(trajs[:, -1]) < tol))


def _iterated_log(n: np.ndarray, m: int) -> np.ndarray:
    out = np.log(n.astype(np.float64))
    for _ in range(m - 1):
        out = np.log(out)
    return out


def envelope_min_n(m: int) -> int:
    """Smallest N with log_m N > 0 (all iterated logs defined and positive)."""
    n = 2
    while True:
        val = float(n)
        ok = True
        for _ in range(m):
            val = math.log(val)
            if val <= 0:
                ok = False
                break
        if ok:
            return n
        n += 1


@dataclass
class EnvelopeReport:
    max_ratio: float
    n_min: int
    per_sample_max: np.ndarray
    m: int
    eps: float


def envelope_check(
    f: TorusFunction,
    map_: ExpandingMap,
    count: int,
    seed,
    N_max: int,
    m: int = 1,
    eps: float = 0.1,
) -> EnvelopeReport:
    """Empirical constant sup |B_N| / env(N) for the iterated-log envelope.

    B_N are the plain orbit sums of ``f``; env(N) multiplies sqrt(N) by the
    first m-1 iterated logarithms and the m-th raised to 1 + eps.  Horizons
    below the positivity threshold of the innermost logarithm are excluded.
    """
    report = hypothesis_check(map_, f)
    if not report.mean_zero:
        raise SchemaError("envelope check requires a mean-zero function")
    rng = np.random.default_rng(seed)
    nums, den = orbits.random_dyadic_seeds(rng, count)
    pos = orbits.orbit_matrix(nums, den, map_.q, N_max)
    sums = np.cumsum(_eval_positions(f, pos), axis=1)
    n_min = envelope_min_n(m)
    ns = np.arange(n_min, N_max + 1)
    env = np.sqrt(ns.astype(np.float64))
    for i in range(1, m):
        env *= np.sqrt(_iterated_log(ns, i))
    env *= _iterated_log(ns, m) ** ((1 + eps) / 2)
    ratios = np.abs(sums[:, n_min:]) / env[None, :]
    per_sample = np.max(ratios, axis=1)
    return EnvelopeReport(float(np.max(per_sample)), n_min, per_sample, m, eps)
