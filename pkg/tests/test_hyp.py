"""Series core: validation, summation, ratio oracle, contiguous relation."""

import math

import numpy as np
import pytest

from hypjacobi import (
    CNonpositiveInteger,
    NoConvergence,
    OutsideDisk,
    contiguous_residual,
    hyp2f1_series,
    ratio_series,
    validate_params,
)


def brute_force_series(a, b, c, z, n_terms):
    """Independent Pochhammer-product oracle, no ratio updates."""
    total = 0j
    for n in range(n_terms):
        num = 1.0 + 0j
        for k in range(n):
            num *= (a + k) * (b + k)
        den = math.factorial(n) + 0j
        for k in range(n):
            den *= c + k
        total += num / den * z**n
    return total


class TestValidateParams:
    def test_real_triple(self):
        p = validate_params(1, 0, 1)
        assert p.is_real
        assert p.a == 1 and p.b == 0 and p.c == 1

    def test_c_zero_rejected(self):
        with pytest.raises(CNonpositiveInteger):
            validate_params(1, 1, 0)

    def test_c_negative_integer_rejected(self):
        with pytest.raises(CNonpositiveInteger):
            validate_params(1, 1, -3)

    def test_c_near_negative_integer_rejected(self):
        with pytest.raises(CNonpositiveInteger):
            validate_params(1, 1, -2 + 1e-10)

    def test_negative_half_is_fine(self):
        p = validate_params(1 + 2j, 3, -0.5)
        assert not p.is_real

    def test_positive_integer_c_fine(self):
        assert validate_params(0.5, 0.5, 3).is_real

    def test_custom_guard(self):
        with pytest.raises(CNonpositiveInteger):
            validate_params(1, 1, -1 + 1e-4, eps_c=1e-3)
        validate_params(1, 1, -1 + 1e-4, eps_c=1e-6)


class TestSeries:
    def test_geometric(self):
        p = validate_params(1, 1, 1)
        out = hyp2f1_series(p, 0.5)
        assert abs(out.value - 2.0) < 1e-13

    def test_at_zero(self):
        out = hyp2f1_series(validate_params(2.5, -0.3 + 1j, 4), 0.0)
        assert out.value == 1.0
        assert out.terms_used == 1
        assert out.truncation_estimate == 0.0

    def test_log_closed_form(self):
        # F(1,1,2;z) = -log(1-z)/z
        out = hyp2f1_series(validate_params(1, 1, 2), 0.5)
        assert abs(out.value - 2.0 * math.log(2.0)) < 1e-13

    def test_against_brute_force(self):
        p = validate_params(0.7 - 0.2j, 1.3, 2.1 + 0.5j)
        z = 0.4 + 0.3j
        ref = brute_force_series(p.a, p.b, p.c, z, 80)
        out = hyp2f1_series(p, z)
        assert abs(out.value - ref) < 1e-12 * abs(ref)

    def test_converged_contract(self):
        p = validate_params(2.2, -0.7, 1.9)
        out = hyp2f1_series(p, 0.6, tol=1e-10)
        assert out.converged
        assert out.truncation_estimate <= 1e-10 * max(1.0, abs(out.value))

    def test_terminating_polynomial(self):
        # a = -3: cubic polynomial, any z allowed
        p = validate_params(-3, 2.5, 1.3)
        out = hyp2f1_series(p, 5.0)
        ref = brute_force_series(-3, 2.5, 1.3, 5.0, 4)
        assert out.truncation_estimate == 0.0
        assert out.terms_used <= 4
        assert abs(out.value - ref) < 1e-12 * abs(ref)

    def test_outside_disk(self):
        with pytest.raises(OutsideDisk):
            hyp2f1_series(validate_params(1, 1, 2), 0.9995)

    def test_no_convergence_budget(self):
        with pytest.raises(NoConvergence):
            hyp2f1_series(validate_params(0.5, 0.5, 0.5), 0.99, max_terms=5)

    @pytest.mark.parametrize("z", [0.3 + 0.4j, -0.6 + 0.1j, 0.7j])
    def test_conjugate_symmetry(self, z):
        p = validate_params(1.7, -0.4, 2.3)
        v1 = hyp2f1_series(p, np.conj(z)).value
        v2 = np.conj(hyp2f1_series(p, z).value)
        assert abs(v1 - v2) <= 1e-15 * max(1.0, abs(v2))


class TestRatioSeries:
    def test_log_case(self):
        # numerator is 1 since b = 0, so ratio = 1/F(1,1,2;z)
        val = ratio_series(validate_params(1, 0, 1), 0.5)
        assert abs(val - 0.5 / math.log(2.0)) < 1e-13

    def test_at_zero(self):
        assert ratio_series(validate_params(2, 0.3, 1.4), 0.0) == 1.0

    def test_polynomial_case(self):
        # (1 + 1.5 z) / (1 + 0.25 z) at z = 0.5
        val = ratio_series(validate_params(-1, -1.5, 1), 0.5)
        assert abs(val - 1.75 / 1.125) < 1e-14


class TestContiguousResidual:
    @pytest.mark.parametrize(
        "abc,z,bound",
        [
            ((1, 0, 1), 0.3, 1e-12),
            ((2 + 1j, 0.5, 3), 0.5j, 1e-12),
            ((-1, -1.5, 1), 0.7, 1e-14),
        ],
    )
    def test_examples(self, abc, z, bound):
        assert contiguous_residual(validate_params(*abc), z) <= bound

    def test_random_grid(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            a = rng.uniform(-3, 3) + 1j * rng.uniform(-1, 1) * rng.integers(0, 2)
            b = rng.uniform(-3, 3)
            c = rng.uniform(0.5, 4)
            p = validate_params(a, b, c)
            z = rng.uniform(-0.8, 0.8) + 1j * rng.uniform(-0.4, 0.4)
            mags = [
                abs(hyp2f1_series(p, z).value),
                abs(hyp2f1_series(p.shifted(db=1, dc=1), z).value),
                abs(hyp2f1_series(p.shifted(da=1, db=1, dc=2), z).value),
            ]
            assert contiguous_residual(p, z) <= 10 * 1e-14 * max(1.0, *mags)
