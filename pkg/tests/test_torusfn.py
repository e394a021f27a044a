import math

import numpy as np
import pytest

from ergoseries.errors import SchemaError
from ergoseries.torusfn import ModulusOfContinuity, TorusFunction, empirical_modulus

from conftest import random_trig_poly


class TestEvaluate:
    def test_unit_frequency_at_origin(self):
        f = TorusFunction.exponential(1)
        assert f.evaluate(0.0) == pytest.approx(1.0)

    def test_cosine_zero(self):
        f = TorusFunction.cosine(1)
        assert abs(f.evaluate(0.25)) < 1e-15

    def test_two_term_sum(self):
        f = TorusFunction.cosine(1) + TorusFunction.cosine(9, 0.5)
        expected = math.cos(math.pi / 4) + 0.5 * math.cos(9 * math.pi / 4)
        assert f.evaluate(0.125).real == pytest.approx(expected, abs=1e-14)
        assert expected == pytest.approx(1.5 * math.sqrt(2) / 2)

    def test_array_evaluation_matches_scalar(self):
        f = TorusFunction({1: 0.3 + 0.1j, -2: 0.2, 0: 0.05})
        xs = np.linspace(0, 1, 11, endpoint=False)
        arr = f.evaluate(xs)
        for x, v in zip(xs, arr):
            assert v == pytest.approx(f.evaluate(float(x)))


class TestNorms:
    def test_single_cosine(self):
        nb = TorusFunction.cosine(1).norms()
        assert nb.sup_lower == pytest.approx(1.0, abs=1e-12)
        assert nb.sup_upper == pytest.approx(1.0, abs=1e-12)
        assert nb.l2 == pytest.approx(1 / math.sqrt(2))
        assert nb.wiener == pytest.approx(1.0)

    def test_zero_function(self):
        nb = TorusFunction.zero().norms()
        assert (nb.sup_lower, nb.sup_upper, nb.l2, nb.wiener) == (0, 0, 0, 0)

    def test_two_term(self):
        f = TorusFunction.cosine(1) + TorusFunction.cosine(9, 0.5)
        nb = f.norms()
        assert nb.wiener == pytest.approx(1.5)
        assert nb.l2 == pytest.approx(math.sqrt(0.5 + 0.125))

    def test_norm_chain(self, poly_battery):
        for f in poly_battery:
            nb = f.norms()
            assert nb.wiener >= nb.sup_upper - 1e-12
            assert nb.sup_upper >= nb.sup_lower
            assert nb.sup_lower >= nb.l2 - 1e-9

    def test_parseval_on_grid(self, poly_battery):
        for f in poly_battery:
            vals = f.samples()
            grid_mean = np.mean(np.abs(vals) ** 2)
            assert grid_mean == pytest.approx(f.l2_norm**2, abs=1e-10)

    def test_real_function_sampling_is_real(self, poly_battery):
        for f in poly_battery:
            assert f.is_real_valued
            assert np.max(np.abs(f.samples().imag)) <= 1e-12


class TestSamples:
    def test_samples_match_direct_sum(self):
        rng = np.random.default_rng(7)
        f = random_trig_poly(rng, max_degree=40, n_terms=6, grid_size=512)
        vals = f.samples()
        xs = np.arange(512) / 512
        direct = f.evaluate(xs)
        scale = np.max(np.abs(direct)) or 1.0
        assert np.max(np.abs(vals - direct)) / scale < 1e-12

    def test_aliasing_rejected(self):
        f = TorusFunction.cosine(100, grid_size=1024)
        with pytest.raises(SchemaError):
            f.samples(150)


class TestTextIO:
    def test_exact_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        f = TorusFunction(
            {0: 0.125, 5: complex(rng.normal(), rng.normal()), -5: 0.1j, 17: -2.0}
        )
        path = tmp_path / "coeffs.txt"
        f.to_text(path)
        g = TorusFunction.from_text(path)
        assert g.coeffs_dict() == f.coeffs_dict()

    def test_duplicate_frequency_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 1.0 0.0\n1 2.0 0.0\n")
        with pytest.raises(SchemaError):
            TorusFunction.from_text(path)


class TestModulus:
    def test_full_oscillation(self):
        f = TorusFunction.cosine(1, grid_size=2048)
        mod = empirical_modulus(f, [0.5, 0.25])
        assert mod(0.5) == pytest.approx(2.0, abs=1e-6)

    def test_zero_function(self):
        f = TorusFunction.zero(grid_size=2048)
        mod = empirical_modulus(f, [0.5, 0.1, 0.01])
        assert mod(0.5) == 0.0

    def test_lipschitz_scale(self):
        f = TorusFunction.cosine(1, grid_size=8192)
        mod = empirical_modulus(f, [1e-3])
        assert mod(1e-3) == pytest.approx(2 * math.pi * 1e-3, rel=0.05)

    def test_unresolvable_scale_rejected(self):
        f = TorusFunction.cosine(1, grid_size=2048)
        with pytest.raises(SchemaError):
            empirical_modulus(f, [1e-5])

    def test_table_nondecreasing(self):
        rng = np.random.default_rng(11)
        f = random_trig_poly(rng, max_degree=30, n_terms=5, grid_size=2048)
        mod = empirical_modulus(f, [0.5, 0.25, 0.125, 0.0625, 0.03125])
        vals = [v for _, v in mod.table]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_doubling_property_checked(self):
        f = TorusFunction.cosine(3, grid_size=4096)
        empirical_modulus(f, [0.2, 0.1, 0.05, 0.025])  # must not raise

    def test_holder_dini(self):
        mod = ModulusOfContinuity.holder(0.5, c=2.0)
        assert mod.dini_integral == pytest.approx(4.0)
        mod.validate_shape()

    @pytest.mark.parametrize("alpha,finite", [(0.5, False), (1.0, False), (1.5, True), (2.0, True)])
    def test_log_power_dini(self, alpha, finite):
        mod = ModulusOfContinuity.log_power(alpha)
        assert math.isfinite(mod.dini_integral) == finite
        mod.validate_shape()

    def test_empirical_requires_monotone(self):
        with pytest.raises(SchemaError):
            ModulusOfContinuity.empirical([(0.1, 1.0), (0.2, 0.5)])
