"""Acceptance gate: every criterion at its stated tolerance, one line per run.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the PASS/FAIL line
for each criterion as it completes.
"""

import contextlib
import itertools
import math
import time

import numpy as np
import pytest

from ergoseries.gibbs import (
    Potential,
    RuelleOperator,
    gibbs_property_check,
    pressure_curve,
    solve,
)
from ergoseries.riesz import (
    dilated_sine_correlations,
    factor_reconstruction,
    fejer_riesz_factor,
    hls_criterion,
    riesz_bounds,
)
from ergoseries.series import (
    CoefficientSequence,
    maximal_check,
    maximal_factor,
    mc_moment,
    subgaussian_check,
)
from ergoseries.torusfn import TorusFunction
from ergoseries.transfer import (
    ExpandingMap,
    hypothesis_check,
    martingale_decomposition,
    perron_frobenius,
    preimage_sum_apply,
)
from ergoseries.weierstrass import (
    WeierstrassSpec,
    birkhoff_scanner,
    classify_point,
    dichotomy_experiment,
    lebesgue_convergence_fraction,
    tilted_divergence,
)

from conftest import random_trig_poly

M3 = ExpandingMap(3)


@contextlib.contextmanager
def criterion(number: int, label: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number:02d} [{label}]: FAIL")
        raise
    print(f"ACCEPTANCE {number:02d} [{label}]: PASS")


@pytest.fixture(scope="module")
def decimation_battery():
    rng = np.random.default_rng(1001)
    return [random_trig_poly(rng, max_degree=200, n_terms=12, grid_size=4096) for _ in range(100)]


def test_criterion_01_decimation_oracle(decimation_battery):
    with criterion(1, "decimation oracle, 100 polynomials, < 10 s"):
        start = time.monotonic()
        xs = np.linspace(0, 1, 128, endpoint=False)
        for f in decimation_battery:
            direct = preimage_sum_apply(M3, f, xs)
            decimated = perron_frobenius(M3, f, 1).evaluate(xs)
            assert np.max(np.abs(direct - decimated)) < 1e-10
        elapsed = time.monotonic() - start
        assert elapsed < 10.0, f"took {elapsed:.1f}s"


def test_criterion_02_martingale_reconstruction(decimation_battery):
    with criterion(2, "martingale reconstruction and Delta* <= Wiener norm"):
        for f in decimation_battery:
            parts = martingale_decomposition(M3, f)
            total = {0: f.coeff(0)}
            for d in parts:
                for n, c in d.coeffs_dict().items():
                    if n != 0:
                        total[n] = total.get(n, 0j) + c
            assert total == f.coeffs_dict()
            rep = hypothesis_check(M3, f)
            assert rep.profile.delta_star <= rep.wiener_norm + 1e-12


def test_criterion_03_lacunary_moment_oracle():
    with criterion(3, "lacunary second/fourth moment oracles, 1e5 samples, < 30 s"):
        start = time.monotonic()
        f = TorusFunction.exponential(1)
        a = CoefficientSequence.power(1.0, 10)
        avals = a.values(10)
        # brute-force quadruple enumeration first (N <= 12)
        idx = [n for n, v in enumerate(avals) if v != 0]
        brute = 0.0
        for aa, bb in itertools.product(idx, repeat=2):
            for cc, dd in itertools.product(idx, repeat=2):
                if 3**aa + 3**bb == 3**cc + 3**dd:
                    brute += float((avals[aa] * avals[bb] * avals[cc] * avals[dd]).real)
        s2 = float(np.sum(np.abs(avals) ** 2))
        s4 = float(np.sum(np.abs(avals) ** 4))
        assert brute == pytest.approx(2 * s2**2 - s4, rel=1e-12)
        rep2 = mc_moment(f, M3, a, 10, 2, 100000, seed=1003)
        assert abs(rep2.estimate - s2) <= 4 * rep2.std_error
        rep4 = mc_moment(f, M3, a, 10, 4, 100000, seed=1004)
        assert abs(rep4.estimate - brute) <= 4 * rep4.std_error
        elapsed = time.monotonic() - start
        assert elapsed < 30.0, f"took {elapsed:.1f}s"


def test_criterion_04_subgaussian_bound():
    with criterion(4, "sub-gaussian exponential-moment bounds"):
        battery = [
            (TorusFunction.cosine(1), CoefficientSequence.explicit([1.0]), 0),
            (TorusFunction.cosine(1), CoefficientSequence.power(1.0, 10), 10),
            (
                TorusFunction.cosine(1) + TorusFunction.cosine(9, 0.5),
                CoefficientSequence.power(0.75, 12),
                12,
            ),
        ]
        for f, a, n in battery:
            for rep in subgaussian_check(f, M3, a, n, [0.25, 0.5, 1.0], 100000, seed=1005):
                assert rep.status == "pass", (f, n, rep)
        # single-term case against the quadrature value of E e^{cos}
        xs = np.linspace(0, 1, 40001)
        quad = float(np.trapezoid(np.exp(np.cos(2 * np.pi * xs)), xs))
        rep = subgaussian_check(
            TorusFunction.cosine(1), M3, CoefficientSequence.explicit([1.0]), 0, [1.0], 200000, seed=1006
        )[0]
        assert abs(rep.estimate - quad) <= 4 * rep.std_error
        assert rep.bound == pytest.approx(math.exp(0.5))
        assert quad <= rep.bound


def test_criterion_05_maximal_inequality():
    with criterion(5, "maximal inequality with measured block constant"):
        assert round(maximal_factor(4.0), 4) == 6.2852  # C/(1 - 2^(-1/4)) to 4 decimals
        f = TorusFunction.exponential(1)
        a = CoefficientSequence.constant(1.0, 40)
        rep = maximal_check(f, M3, a, 4, 19, 4.0, 50000, seed=1007)
        v_total = 16.0
        assert rep.passed
        literal_bound = 6.2857 * rep.block_constant * math.sqrt(v_total)
        assert rep.max_norm_estimate <= literal_bound * (1 + 4 * rep.std_error / literal_bound)


def test_criterion_06_riesz_closed_forms():
    with criterion(6, "dilated-sine Toeplitz spectra in closed form"):
        for N in (8, 32, 128):
            corr = dilated_sine_correlations([1.0, 0.0, 0.5], K=N)
            rb = riesz_bounds(corr, [N])
            ks = np.arange(1, N + 1)
            eigs = 0.625 + 0.5 * np.cos(ks * np.pi / (N + 1))
            assert rb.lambda_min[0] == pytest.approx(eigs.min(), abs=1e-8)
            assert rb.lambda_max[0] == pytest.approx(eigs.max(), abs=1e-8)
        corr = dilated_sine_correlations([1.0, 0.0, -1.0], K=128)
        rb = riesz_bounds(corr, [128])
        assert rb.lambda_min[0] * 129**2 == pytest.approx(math.pi**2 / 2, rel=0.02)


def test_criterion_07_spectral_factorization():
    with criterion(7, "spectral factorization: 100 random + worked examples"):
        rng = np.random.default_rng(1008)
        t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        for _ in range(100):
            deg = int(rng.integers(1, 21))
            r = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
            conv = np.convolve(r, np.conj(r[::-1]))
            coeffs = {k - deg: conv[k] for k in range(2 * deg + 1)}
            q = fejer_riesz_factor(coeffs)
            target = np.abs(np.polyval(r[::-1], np.exp(1j * t))) ** 2
            resid = np.max(np.abs(factor_reconstruction(q, t) - target))
            assert resid < 1e-8 * max(1.0, float(target.max()))
        worked = [
            ({-1: 1.0, 0: 2.0, 1: 1.0}, np.array([1.0, 1.0])),
            ({0: 1.0}, np.array([1.0])),
            ({-1: 0.5, 0: 1.25, 1: 0.5}, np.array([1.0, 0.5])),
        ]
        for coeffs, expected in worked:
            q = fejer_riesz_factor(coeffs)
            phase = q[0] / abs(q[0])
            assert np.allclose(q / phase, expected, atol=1e-9)


def test_criterion_08_dirichlet_boundedness():
    with criterion(8, "Dirichlet-series window bounds and violated flag"):
        rep = hls_criterion(
            CoefficientSequence.power(2.0, 64),
            sigma_min=0.05,
            sigma_max=4.0,
            t_max=50.0,
            sigma_steps=40,
            t_steps=201,
        )
        assert rep.inf_interval[0] >= 0.65
        assert rep.sup_interval[1] <= 1.645
        # oracle cross-check at the left edge of the window
        import mpmath

        from ergoseries.riesz import _dirichlet_values

        cv = (np.arange(1, 20001).astype(float)) ** -2.0
        mine = _dirichlet_values(cv, np.array([0.05]), np.array([0.0]))[0, 0]
        assert mine == pytest.approx(abs(complex(mpmath.zeta(2.05))), abs=1e-4)
        bad = hls_criterion(
            CoefficientSequence.explicit([0.0, 1.0, 0.0, -1.0]),
            sigma_min=0.05,
            sigma_max=2.0,
            t_max=10.0,
            t_steps=41,
        )
        assert bad.verdict == "violated"


def test_criterion_09_gibbs_solver():
    with criterion(9, "Gibbs eigendata, ratio constant, pressure derivative"):
        sol1 = solve(RuelleOperator(M3, Potential.constant(1.0)), depth=6, grid_size=8 * 3**5)
        assert sol1.rho == pytest.approx(3.0, abs=1e-10)
        assert np.max(np.abs(sol1.h - 1.0)) < 1e-10
        op = RuelleOperator(M3, Potential.tilt(TorusFunction.cosine(1), 0.2))
        sol = solve(op, depth=8, grid_size=8 * 3**7)
        ratios = gibbs_property_check(sol)
        assert ratios.constant < 2.0
        curve = pressure_curve(
            M3, TorusFunction.cosine(1), np.arange(-0.05, 0.0501, 0.01), grid_size=8 * 3**5
        )
        assert abs(curve.diagnostics["m_at_zero"]) < 1e-6
        assert curve.convexity_cert >= -1e-6


def test_criterion_10_four_regime_table():
    with criterion(10, "four-regime table stable across 5 seeds, < 5 min"):
        start = time.monotonic()
        alphas = [-0.5, 0.3, 0.75, 1.2]
        expected = ["nowhere", "singular-a.e.", "differentiable-a.e.", "everywhere"]
        for seed in (11, 12, 13, 14, 15):
            rows = dichotomy_experiment(alphas, 500, seed=seed, n_max=50)
            assert [r.regime for r in rows] == expected
            by_alpha = {r.alpha: r for r in rows}
            assert by_alpha[0.75].frac_differentiable >= 0.99
            assert by_alpha[0.3].frac_differentiable <= 0.01
            assert by_alpha[-0.5].frac_differentiable == 0.0
            assert by_alpha[1.2].frac_differentiable >= 0.99
        # the closed boundary case joins the square-sum-divergent regime
        from ergoseries.weierstrass import qualitative_regime

        assert qualitative_regime(CoefficientSequence.power(0.5, 10)) == "singular-a.e."
        elapsed = time.monotonic() - start
        assert elapsed < 300.0, f"took {elapsed:.1f}s"


def test_criterion_11_periodic_orbit_certificate():
    with criterion(11, "period-2 orbit certificate and matching derivative"):
        found = birkhoff_scanner(TorusFunction.cosine(1), 2)
        assert any(
            o.zero_sum and o.numerator == 1 and o.denominator == 8 and o.period == 2
            for o in found
        )
        spec = WeierstrassSpec.from_f(
            TorusFunction.sine(1, 1 / (2 * math.pi)), CoefficientSequence.power(1.0, 60)
        )
        verdict = classify_point(spec, 0.125)
        assert verdict.verdict == "differentiable"
        assert verdict.series.verdict == "converged"
        assert verdict.quotient.verdict == "differentiable"
        # independent oracle: direct long summation over the exact orbit values
        n = np.arange(1, 2 * 10**7, dtype=np.float64)
        vals = np.where(n % 2 == 1, math.cos(3 * math.pi / 4), math.cos(math.pi / 4))
        oracle = float(np.sum(vals / n))
        assert abs(verdict.value.real - oracle) < 1e-6
        assert abs(verdict.quotient.value - verdict.value) <= verdict.quotient.error_bar


def test_criterion_12_tilted_divergence_contrast():
    with criterion(12, "tilted non-convergence vs Lebesgue convergence"):
        spec = WeierstrassSpec.from_f(
            TorusFunction.sine(1, 1 / (2 * math.pi)), CoefficientSequence.power(1.0, 60)
        )
        rep = tilted_divergence(spec, t=0.5, samples=200, seed=1009)
        assert rep.status == "ok"
        assert rep.frac_nonconvergent >= 0.99
        frac = lebesgue_convergence_fraction(spec, 200, seed=1010)
        assert frac >= 0.99
