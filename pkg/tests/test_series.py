import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from ergoseries.errors import PrecisionBudgetError, SchemaError
from ergoseries.series import (
    PRECISION_BUDGET,
    CoefficientSequence,
    ProbeConfig,
    convergence_probe,
    divergence_test,
    envelope_check,
    envelope_min_n,
    maximal_check,
    maximal_factor,
    mc_moment,
    partial_sum,
    partial_sum_trajectory,
    probe_batch,
    series_sigma_sq,
    slln_pass_fraction,
    subgaussian_check,
    weighted_slln,
)
from ergoseries.torusfn import TorusFunction
from ergoseries.transfer import ExpandingMap
from ergoseries import orbits

M3 = ExpandingMap(3)
EXP1 = TorusFunction.exponential(1)
COS1 = TorusFunction.cosine(1)


class TestCoefficientSequence:
    @pytest.mark.parametrize(
        "alpha,zero,l2,div,abss,bv",
        [
            (0.3, True, False, True, False, True),
            (0.75, True, True, True, False, True),
            (1.0, True, True, True, False, True),
            (1.2, True, True, False, True, True),
            (2.0, True, True, False, True, True),
            (0.0, False, False, True, False, True),
            (-0.5, False, False, True, False, False),
        ],
    )
    def test_power_flags(self, alpha, zero, l2, div, abss, bv):
        a = CoefficientSequence.power(alpha, 20)
        assert a.tends_to_zero == zero
        assert a.l2_finite == l2
        assert a.sum_diverges == div
        assert a.abs_summable == abss
        assert a.bv_finite == bv

    def test_power_values_and_star(self):
        a = CoefficientSequence.power(1.0, 10)
        vals = a.values()
        assert vals[0] == 0
        assert vals[3] == pytest.approx(1 / 3)
        assert a.a_star(0) == 1.0
        assert a.a_star(9) == pytest.approx(0.1)
        assert a.a_star(100) == pytest.approx(1 / 101)

    def test_derived_stats_recompute(self):
        a = CoefficientSequence.power(0.75, 40)
        vals = np.abs(a.values())
        assert a.l2_sq == pytest.approx(np.sum(vals**2), abs=1e-14)
        assert a.bv == pytest.approx(np.sum(np.abs(np.diff(vals))), abs=1e-14)
        n = np.arange(len(vals), dtype=float)
        logs = np.where(n >= 1, np.log(np.maximum(n, 1)), 0.0)
        assert a.rm_sum == pytest.approx(np.sum((vals * logs) ** 2), abs=1e-14)

    def test_explicit_support(self):
        a = CoefficientSequence.explicit([1.0, 0.0, 2.0])
        assert a.support_end == 2
        assert a.a_star(0) == 2.0
        assert a.a_star(2) == 0.0
        assert a.l2_finite and not a.sum_diverges

    def test_constant(self):
        a = CoefficientSequence.constant(1.0, 10)
        assert not a.tends_to_zero and a.sum_diverges and a.bv_finite
        assert a.a_star(5) == 1.0

    def test_length_guard(self):
        a = CoefficientSequence.power(1.0, 5)
        with pytest.raises(SchemaError):
            a.values(6)


class TestPartialSums:
    def test_zero_weights(self):
        a = CoefficientSequence.constant(0.0, 10)
        assert partial_sum(EXP1, M3, a, 5, 0.37) == 0

    def test_single_term(self):
        a = CoefficientSequence.explicit([1.0])
        val = partial_sum(EXP1, M3, a, 0, Fraction(1, 3))
        assert val == pytest.approx(np.exp(2j * np.pi / 3))

    def test_period_two_cancellation(self):
        a = CoefficientSequence.explicit([1.0, 1.0])
        val = partial_sum(COS1, M3, a, 1, 0.125)
        assert abs(val) < 1e-14

    def test_matches_fraction_orbit(self):
        # independent slow path: exact rational orbit via Fraction arithmetic
        a = CoefficientSequence.power(0.6, 40)
        x = Fraction(12345, 2**20)
        traj = partial_sum_trajectory(COS1, M3, a, 40, x)
        acc = 0j
        xi = x
        avals = a.values(40)
        for n in range(41):
            acc += avals[n] * complex(COS1.evaluate(float(xi)))
            xi = (3 * xi) % 1
        assert traj[-1] == pytest.approx(acc, abs=1e-12)

    def test_budget_enforced(self):
        a = CoefficientSequence.power(1.0, 100)
        with pytest.raises(PrecisionBudgetError):
            partial_sum(EXP1, M3, a, PRECISION_BUDGET + 1, 0.37)

    def test_budget_override(self):
        a = CoefficientSequence.power(1.0, 100)
        partial_sum(EXP1, M3, a, 80, 0.37, budget=100)


def lacunary_fourth_moment_oracle(avals):
    """Brute-force enumeration of E|sum a_n e(3^n x)|^4 for N <= 12.

    Counts quadruples with 3^a + 3^b = 3^c + 3^d (exact integers).
    """
    idx = [n for n, v in enumerate(avals) if v != 0]
    total = 0.0
    for aa, bb in itertools.product(idx, repeat=2):
        for cc, dd in itertools.product(idx, repeat=2):
            if 3**aa + 3**bb == 3**cc + 3**dd:
                total += (avals[aa] * avals[bb] * avals[cc] * avals[dd]).real
    return total


class TestMoments:
    def test_second_moment_orthogonality(self):
        a = CoefficientSequence.power(1.0, 10)
        rep = mc_moment(EXP1, M3, a, 10, 2, 100000, seed=42)
        exact = float(np.sum(np.abs(a.values(10)) ** 2))
        assert abs(rep.estimate - exact) <= 4 * rep.std_error
        assert rep.passed

    def test_fourth_moment_vs_enumeration(self):
        a = CoefficientSequence.power(1.0, 10)
        avals = a.values(10)
        oracle = lacunary_fourth_moment_oracle(avals)
        s2 = float(np.sum(np.abs(avals) ** 2))
        s4 = float(np.sum(np.abs(avals) ** 4))
        assert oracle == pytest.approx(2 * s2**2 - s4, rel=1e-12)
        rep = mc_moment(EXP1, M3, a, 10, 4, 100000, seed=43)
        assert abs(rep.estimate - oracle) <= 4 * rep.std_error
        assert rep.passed

    def test_zero_case(self):
        a = CoefficientSequence.constant(0.0, 10)
        rep = mc_moment(EXP1, M3, a, 5, 2, 1000, seed=1)
        assert rep.estimate == 0 and rep.bound == 0 and rep.passed

    def test_determinism(self):
        a = CoefficientSequence.power(1.0, 10)
        r1 = mc_moment(EXP1, M3, a, 10, 2, 20000, seed=5)
        r2 = mc_moment(EXP1, M3, a, 10, 2, 20000, seed=5)
        assert r1.estimate == r2.estimate and r1.std_error == r2.std_error

    def test_second_moment_across_fifty_seeds(self):
        a = CoefficientSequence.power(1.0, 10)
        exact = float(np.sum(np.abs(a.values(10)) ** 2))
        for seed in range(50):
            rep = mc_moment(EXP1, M3, a, 10, 2, 4000, seed=seed)
            assert abs(rep.estimate - exact) <= 4 * rep.std_error, seed

    def test_bound_chain_dominates_exact_l2(self, poly_battery):
        from ergoseries.riesz import correlations_exact
        from ergoseries.series import khintchine_bound
        from ergoseries.transfer import hypothesis_check

        a = CoefficientSequence.power(0.9, 8)
        avals = a.values(8)
        for f in poly_battery[:8]:
            exact = correlations_exact(M3, f, 8).quadratic_form(avals)
            delta_star = hypothesis_check(M3, f).profile.delta_star
            assert khintchine_bound(delta_star, 2, float(np.sum(np.abs(avals) ** 2))) >= exact


class TestSubgaussian:
    def test_lambda_zero_exact(self):
        a = CoefficientSequence.explicit([1.0])
        rep = subgaussian_check(COS1, M3, a, 0, [0.0], 1000, seed=2)[0]
        assert rep.estimate == pytest.approx(1.0, abs=1e-12)
        assert rep.bound == 1.0 and rep.status == "pass"

    def test_single_term_vs_quadrature(self):
        # E exp(lam * cos(2 pi x)) by quadrature, vs MC and the bound e^{lam^2/2}
        a = CoefficientSequence.explicit([1.0])
        lam = 1.0
        xs = np.linspace(0, 1, 20001)
        quad = float(np.trapezoid(np.exp(lam * np.cos(2 * np.pi * xs)), xs))
        from scipy.special import i0

        assert quad == pytest.approx(float(i0(lam)), abs=1e-8)
        rep = subgaussian_check(COS1, M3, a, 0, [lam], 200000, seed=3)[0]
        assert abs(rep.estimate - quad) <= 4 * rep.std_error
        assert rep.bound == pytest.approx(math.exp(lam**2 / 2))
        assert rep.status == "pass"

    @pytest.mark.parametrize("lam", [0.25, 0.5, 1.0])
    def test_power_weights_pass(self, lam):
        a = CoefficientSequence.power(1.0, 10)
        rep = subgaussian_check(COS1, M3, a, 10, [lam], 100000, seed=4)[0]
        assert rep.status == "pass"

    def test_sigma_sq_profile_convolution(self):
        # single-frequency profile: ||d_i(S_N)|| <= |a_i|, so sigma^2 = sum a_i^2
        a = CoefficientSequence.power(1.0, 10)
        sig = series_sigma_sq(M3, COS1, a, 10)
        assert sig == pytest.approx(float(np.sum(np.abs(a.values(10)) ** 2)), abs=1e-12)

    def test_complex_rejected(self):
        a = CoefficientSequence.power(1.0, 5)
        with pytest.raises(SchemaError):
            subgaussian_check(EXP1, M3, a, 5, [0.5], 100, seed=0)

    def test_huge_lambda_inconclusive(self):
        # the exponential moment estimator collapses onto a few extreme
        # samples; that is reported, not failed
        a = CoefficientSequence.power(1.0, 10)
        rep = subgaussian_check(COS1, M3, a, 10, [40.0], 2000, seed=6)[0]
        assert rep.status == "inconclusive"


class TestMaximal:
    def test_factor_value(self):
        assert maximal_factor(4.0) == pytest.approx(6.2852, abs=5e-5)

    def test_single_point_block(self):
        a = CoefficientSequence.constant(1.0, 40)
        rep = maximal_check(EXP1, M3, a, 7, 7, 4.0, 20000, seed=9)
        assert rep.passed  # C' > C makes the one-term maximum trivial

    def test_lacunary_block(self):
        a = CoefficientSequence.constant(1.0, 40)
        rep = maximal_check(EXP1, M3, a, 4, 19, 4.0, 30000, seed=10)
        assert rep.passed
        assert rep.c_prime_factor == pytest.approx(maximal_factor(4.0))
        assert rep.block_constant >= 1.0 - 0.05  # contains the full block itself

    def test_zero_sequence(self):
        a = CoefficientSequence.constant(0.0, 30)
        rep = maximal_check(EXP1, M3, a, 2, 10, 4.0, 1000, seed=11)
        assert rep.max_norm_estimate == 0.0 and rep.passed


class TestDivergenceTest:
    def test_power_03_certified(self):
        a = CoefficientSequence.power(0.3, 40)
        rep = divergence_test(EXP1, M3, a, [10, 20, 40], 20000, seed=12)
        assert rep.verdict == "diverges a.e. (certified floor)"
        assert rep.riesz_lower == pytest.approx(1.0)
        assert rep.floor == pytest.approx(1 / 16)
        for _, v, frac, se, ok in rep.rows:
            assert ok and frac >= rep.floor - 4 * se

    def test_l2_branch(self):
        a = CoefficientSequence.power(2.0, 40)
        rep = divergence_test(EXP1, M3, a, [10], 100, seed=13)
        assert rep.verdict == "not applicable (l2)"

    def test_degenerate_level(self):
        a = CoefficientSequence.power(0.3, 20)
        rep = divergence_test(EXP1, M3, a, [10], 2000, seed=14, lam=1.0)
        assert rep.floor == 0.0
        assert all(ok for *_, ok in rep.rows)

    def test_missing_lower_constant(self):
        g = TorusFunction.cosine(1) - TorusFunction.cosine(3)  # coboundary: no frame floor
        a = CoefficientSequence.power(0.3, 20)
        rep = divergence_test(g, M3, a, [10], 1000, seed=15)
        assert rep.verdict == "inconclusive (no lower frame constant)"

    def test_explicit_lower_constant_from_frame_bounds(self):
        # feed the measured frame floor of a two-frequency profile directly
        from ergoseries.riesz import correlations_exact, riesz_bounds

        f = TorusFunction.cosine(1) + TorusFunction.cosine(9, 0.5)
        rb = riesz_bounds(correlations_exact(M3, f, 64), [16, 32, 64])
        a = CoefficientSequence.power(0.3, 40)
        rep = divergence_test(
            f, M3, a, [20, 40], 20000, seed=16, riesz_lower=math.sqrt(rb.b_sq_est)
        )
        assert rep.verdict == "diverges a.e. (certified floor)"


class TestConvergenceProbe:
    def test_finite_support(self):
        a = CoefficientSequence.explicit([1.0, 0.5])
        v = convergence_probe(COS1, M3, a, 0.37, 50)
        assert v.verdict == "converged" and v.route == "finite-support"
        assert v.tail_bound == 0.0

    def test_periodic_certificate_value(self):
        a = CoefficientSequence.power(1.0, 60)
        v = convergence_probe(COS1, M3, a, 0.125, 50)
        assert v.verdict == "converged" and v.route == "abel-periodic-exact"
        # independent oracle: direct 10^7-term summation on the period-2 orbit
        n = np.arange(1, 10**7, dtype=np.float64)
        vals = np.where(n % 2 == 1, math.cos(3 * math.pi / 4), math.cos(math.pi / 4))
        oracle = float(np.sum(vals / n))
        assert v.value.real == pytest.approx(oracle, abs=2e-6)
        assert v.value.real == pytest.approx(-math.sqrt(2) / 2 * math.log(2), abs=1e-12)

    def test_divergent_family_never_converges(self):
        a = CoefficientSequence.power(0.3, 50)
        rng = np.random.default_rng(16)
        nums, den = orbits.random_dyadic_seeds(rng, 100)
        for num in nums[:20]:
            v = convergence_probe(EXP1, M3, a, (int(num), den), 50)
            assert v.verdict in ("diverged", "inconclusive")
        verdicts = probe_batch(EXP1, M3, a, nums, den, 50, ProbeConfig())
        assert "converged" not in verdicts

    def test_drift_at_fixed_point(self):
        a = CoefficientSequence.constant(1.0, 50)
        v = convergence_probe(COS1, M3, a, 0.0, 50)
        assert v.verdict == "diverged" and v.route == "periodic-drift"

    def test_l2_family_inconclusive_in_strict_mode(self):
        a = CoefficientSequence.power(0.75, 50)
        v = convergence_probe(EXP1, M3, a, 0.31234, 50)
        assert v.verdict == "inconclusive"

    def test_scaled_mode_separates(self):
        cfg = ProbeConfig(mode="scaled")
        rng = np.random.default_rng(17)
        nums, den = orbits.random_dyadic_seeds(rng, 500)
        v75 = probe_batch(EXP1, M3, CoefficientSequence.power(0.75, 50), nums, den, 50, cfg)
        v30 = probe_batch(EXP1, M3, CoefficientSequence.power(0.3, 50), nums, den, 50, cfg)
        assert v75.count("converged") == 500
        assert v30.count("converged") == 0

    def test_verdict_stable_under_grid_refinement(self):
        a = CoefficientSequence.power(1.0, 60)
        for x in (0.125, 0.37):
            fine = TorusFunction.cosine(1, grid_size=2 * COS1.grid_size)
            v1 = convergence_probe(COS1, M3, a, x, 50)
            v2 = convergence_probe(fine, M3, a, x, 50)
            assert v1.verdict == v2.verdict

    def test_config_echoed(self):
        a = CoefficientSequence.power(1.0, 60)
        v = convergence_probe(COS1, M3, a, 0.37, 30)
        assert v.diagnostics["config"]["eps"] == 1e-6
        assert v.diagnostics["config"]["window"] == 20


class TestWeightedAverages:
    def test_birkhoff_average_battery(self):
        frac = slln_pass_fraction(COS1, M3, np.ones(10**4 + 1), 10**4, 200, seed=18, tol=0.05)
        assert frac >= 0.95

    def test_zero_function(self):
        traj = weighted_slln(TorusFunction.zero(), M3, np.ones(101), 0.37, 100)
        assert np.max(np.abs(traj)) == 0.0

    def test_linear_weights(self):
        # w_n = n + 1: W_N ~ N^2/2, a_n = w_n / W_n is square-summable
        w = np.arange(1, 2002, dtype=float)
        a = w / np.cumsum(w)
        assert np.sum(a**2) < math.inf and np.sum(a[1000:] ** 2) < 0.01
        frac = slln_pass_fraction(COS1, M3, w, 2000, 100, seed=19, tol=0.1)
        assert frac >= 0.95

    def test_kronecker_consistency(self):
        # probe certifies convergence of sum a_n f(3^n x) at the periodic point
        # for a_n = w_n / W_n; the weighted averages must then be small there
        w = np.ones(10**4 + 1)
        a = CoefficientSequence.explicit(w[: 61] / np.cumsum(w)[: 61])
        v = convergence_probe(COS1, M3, a, 0.125, 60)
        assert v.verdict == "converged"
        traj = weighted_slln(COS1, M3, w, 0.125, 10**4)
        assert abs(traj[-1]) < 1e-3


class TestEnvelope:
    def test_min_n(self):
        assert envelope_min_n(1) == 2
        assert envelope_min_n(2) == 3
        assert envelope_min_n(3) == 16

    def test_cosine_constant(self):
        rep = envelope_check(COS1, M3, 50, seed=20, N_max=10**4, m=1, eps=0.1)
        assert rep.max_ratio < 3.0
        assert rep.n_min == 2

    def test_zero_function(self):
        rep = envelope_check(TorusFunction.zero(), M3, 5, seed=21, N_max=100)
        assert rep.max_ratio == 0.0

    def test_mean_zero_required(self):
        with pytest.raises(SchemaError):
            envelope_check(TorusFunction.constant(1.0), M3, 5, seed=22, N_max=100)
