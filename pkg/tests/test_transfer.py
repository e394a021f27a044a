import math

import numpy as np
import pytest

from ergoseries.errors import SchemaError
from ergoseries.torusfn import TorusFunction
from ergoseries.transfer import (
    ExpandingMap,
    conditional_expectation,
    decay_profile,
    hypothesis_check,
    martingale_decomposition,
    martingale_difference,
    perron_frobenius,
    preimage_sum_apply,
    truncation_index,
)

M3 = ExpandingMap(3)


def two_term():
    return TorusFunction.cosine(1) + TorusFunction.cosine(9, 0.5)


class TestExpandingMap:
    @pytest.mark.parametrize("q", [1, 0, -2])
    def test_invalid_base(self, q):
        with pytest.raises(SchemaError):
            ExpandingMap(q)

    def test_preimages(self):
        pts = ExpandingMap(3).preimages(0.6)
        assert np.allclose(sorted(pts), [0.2, 0.2 + 1 / 3, 0.2 + 2 / 3])


class TestPerronFrobenius:
    def test_unit_frequency_killed(self):
        out = perron_frobenius(M3, TorusFunction.exponential(1), 1)
        assert out.is_zero

    def test_identity_power(self):
        f = two_term()
        assert perron_frobenius(M3, f, 0) is f

    def test_two_term_decimation(self):
        out = perron_frobenius(M3, two_term(), 2)
        assert out.coeffs_dict() == {0: 0j, 1: 0.25 + 0j, -1: 0.25 + 0j}

    def test_mean_preservation(self, poly_battery):
        for f in poly_battery:
            g = f + TorusFunction.constant(0.7)
            assert perron_frobenius(M3, g, 1).coeff(0) == g.coeff(0)

    def test_fixes_constants(self):
        one = TorusFunction.constant(1.0)
        assert perron_frobenius(M3, one, 1).coeffs_dict() == {0: 1 + 0j}

    def test_matches_preimage_sum(self, poly_battery):
        xs = np.linspace(0, 1, 64, endpoint=False)
        for f in poly_battery:
            lhs = preimage_sum_apply(M3, f, xs)
            rhs = perron_frobenius(M3, f, 1).evaluate(xs)
            assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_contraction_on_intervals(self, poly_battery):
        for f in poly_battery:
            fb = f.norms()
            lb = perron_frobenius(M3, f, 1).norms()
            assert lb.sup_lower <= fb.sup_upper + 1e-12


class TestConditionalExpectation:
    def test_keeps_multiples(self):
        out = conditional_expectation(M3, two_term(), 1)
        assert out.coeffs_dict() == {0: 0j, 9: 0.25 + 0j, -9: 0.25 + 0j}

    def test_level_zero_identity(self):
        f = two_term()
        assert conditional_expectation(M3, f, 0) is f

    def test_unit_frequency_vanishes(self):
        assert conditional_expectation(M3, TorusFunction.exponential(1), 1).is_zero

    def test_tower_property(self, poly_battery):
        for f in poly_battery[:10]:
            for j, k in [(1, 2), (2, 1), (3, 3), (0, 2)]:
                once = conditional_expectation(M3, conditional_expectation(M3, f, j), k)
                direct = conditional_expectation(M3, f, max(j, k))
                assert once.coeffs_dict() == direct.coeffs_dict()

    def test_structural_link_to_transfer(self, poly_battery):
        # coefficient n of E^k f equals coefficient n / q^k of L^k f
        for f in poly_battery[:10]:
            k = 2
            ek = conditional_expectation(M3, f, k)
            lk = perron_frobenius(M3, f, k)
            for n, c in ek.coeffs_dict().items():
                if n == 0:
                    continue
                assert lk.coeff(n // 3**k) == c


class TestMartingaleDifferences:
    def test_two_term_sieve(self):
        f = two_term()
        assert martingale_difference(M3, f, 0).coeffs_dict() == {0: 0j, 1: 0.5 + 0j, -1: 0.5 + 0j}
        assert martingale_difference(M3, f, 1).is_zero
        assert martingale_difference(M3, f, 2).coeffs_dict() == {0: 0j, 9: 0.25 + 0j, -9: 0.25 + 0j}
        assert martingale_difference(M3, f, 3).is_zero

    def test_low_frequency_all_in_first(self):
        f = TorusFunction({1: 0.5, -1: 0.5j})
        assert martingale_difference(M3, f, 0).coeffs_dict() == f.coeffs_dict()
        assert martingale_difference(M3, f, 1).is_zero

    def test_constant_has_no_differences(self):
        c = TorusFunction.constant(2.5)
        for i in range(4):
            assert martingale_difference(M3, c, i).is_zero

    def test_reconstruction_exact(self, poly_battery):
        for f in poly_battery:
            parts = martingale_decomposition(M3, f)
            total = {0: f.coeff(0)}
            for d in parts:
                for n, c in d.coeffs_dict().items():
                    if n != 0:
                        total[n] = total.get(n, 0j) + c
            assert total == f.coeffs_dict()

    def test_truncation_index_exact(self):
        f = two_term()
        idx = truncation_index(M3, f)
        assert idx == 3
        assert martingale_difference(M3, f, idx).is_zero
        assert not martingale_difference(M3, f, idx - 1).is_zero


class TestHypothesisCheck:
    def test_single_cosine(self):
        rep = hypothesis_check(M3, TorusFunction.cosine(1))
        assert rep.mean_zero and rep.summable_differences
        assert rep.profile.delta_star == pytest.approx(1.0, abs=1e-12)
        assert rep.profile.sigma_sq == pytest.approx(1.0, abs=1e-12)

    def test_constant_fails_mean_zero(self):
        rep = hypothesis_check(M3, TorusFunction.constant(1.0))
        assert not rep.mean_zero
        assert "mean_zero" in rep.notes

    def test_two_term_profile(self):
        rep = hypothesis_check(M3, two_term())
        assert rep.profile.delta_star == pytest.approx(1.5, abs=1e-12)
        assert rep.profile.sigma_sq == pytest.approx(1.25, abs=1e-12)
        assert rep.profile.truncation_index == 3

    def test_profile_recomputable(self, poly_battery):
        for f in poly_battery:
            prof = hypothesis_check(M3, f).profile
            assert prof.delta_star == pytest.approx(np.sum(prof.deltas), abs=1e-14)
            assert prof.sigma_sq == pytest.approx(np.sum(prof.deltas**2), abs=1e-14)

    def test_delta_star_below_wiener(self, poly_battery):
        for f in poly_battery:
            rep = hypothesis_check(M3, f)
            assert rep.profile.delta_star <= rep.wiener_norm + 1e-12


class TestDecayProfile:
    def test_unit_frequency(self):
        prof = decay_profile(M3, TorusFunction.exponential(1), 5)
        assert prof.sup_upper[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all(prof.sup_upper[1:] == 0)
        assert prof.condition_strong and prof.condition_weak

    def test_dyadic_ladder(self):
        f = TorusFunction({0: 0j})
        coeffs = {}
        for j in range(7):
            coeffs[3**j] = 2.0**-j
            coeffs[-(3**j)] = 2.0**-j
        f = TorusFunction(coeffs)
        prof = decay_profile(M3, f, 8)
        for n in range(7):
            expected = 2.0 ** (-n + 1) * (2 - 2.0 ** (-(6 - n)))
            assert prof.sup_lower[n] == pytest.approx(expected, rel=1e-12)
        assert np.all(prof.sup_upper[7:] == 0)
        assert prof.fitted_rate == pytest.approx(math.log(2), rel=0.15)

    def test_holder_coefficient_rate(self):
        rng = np.random.default_rng(5)
        delta = 0.5
        coeffs = {0: 0j}
        for k in range(1, 60):
            amp = complex(rng.normal(), rng.normal())
            amp *= k ** (-1 - delta) / abs(amp)
            coeffs[k] = amp
            coeffs[-k] = np.conj(amp)
        f = TorusFunction(coeffs, grid_size=4096)
        prof = decay_profile(M3, f, 4)
        assert prof.fitted_rate >= 0.8 * delta * math.log(3)

    def test_requires_mean_zero(self):
        with pytest.raises(SchemaError):
            decay_profile(M3, TorusFunction.constant(1.0), 3)
