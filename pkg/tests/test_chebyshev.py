import math

import numpy as np
import pytest

from lrsim.chebyshev import (
    ChebyshevExpansion,
    degree_for_accuracy,
    evaluate,
    evaluate_many,
    expand,
    truncation_bound,
)


class TestExpand:
    def test_linear_function(self):
        e = expand(lambda x: x, rho=2.0, bound_m=1.5, degree=5)
        assert e.coeffs[1] == pytest.approx(1.0, abs=1e-12)
        for j in (0, 2, 3, 4, 5):
            assert abs(e.coeffs[j]) < 1e-12

    def test_second_chebyshev_polynomial(self):
        e = expand(lambda x: 2 * x * x - 1, rho=2.0, bound_m=3.0, degree=6)
        assert e.coeffs[2] == pytest.approx(1.0, abs=1e-12)
        assert sum(abs(c) for j, c in enumerate(e.coeffs) if j != 2) < 1e-11

    def test_constant(self):
        e = expand(lambda x: 0.7, rho=3.0, bound_m=1.0, degree=4)
        for x in (-1.0, -0.3, 0.0, 0.9):
            assert evaluate(e, x) == pytest.approx(0.7, abs=1e-13)

    def test_exp_meets_lemma_bound(self):
        rho = 2.0
        sup_m = math.exp(1.25)  # max of exp on the rho = 2 Bernstein ellipse
        e = expand(math.exp, rho, sup_m, degree=15)
        xs = np.linspace(-1, 1, 1001)
        err = np.abs(evaluate_many(e, xs) - np.exp(xs)).max()
        assert err <= truncation_bound(rho, sup_m, 15)

    def test_coefficient_decay_for_analytic_functions(self):
        cases = [
            (math.exp, 2.0, math.exp(1.25)),
            (math.cos, 3.0, math.cosh((3 - 1 / 3) / 2)),
            (lambda x: 1.0 / (x - 3.0), 2.0, 1.0),  # pole at 3, outside E_2
        ]
        for f, rho, sup_m in cases:
            e = expand(f, rho, sup_m, degree=20)
            assert e.decay_ok
            assert not e.decay_violations()

    def test_decay_violation_flags_wrong_claim(self):
        # claiming a tiny sup on the ellipse contradicts the true coefficients
        e = expand(math.exp, rho=2.0, bound_m=1e-4, degree=10)
        assert not e.decay_ok
        assert e.decay_violations()

    def test_affine_domain(self):
        e = expand(lambda s: s**2, rho=2.0, bound_m=10.0, degree=8, domain=(0.0, 2.0))
        for s in (0.0, 0.5, 1.3, 2.0):
            assert evaluate(e, s) == pytest.approx(s**2, abs=1e-10)


class TestEvaluate:
    def test_chebyshev_identity_t3(self):
        # T_3(0.5) = 4 (0.125) - 3 (0.5) = -1
        e = ChebyshevExpansion((0.0, 0.0, 0.0, 1.0), rho=2.0, bound_m=1.0)
        assert evaluate(e, 0.5) == pytest.approx(-1.0, abs=1e-14)

    def test_against_numpy_clenshaw_oracle(self):
        rng = np.random.default_rng(8)
        coeffs = rng.standard_normal(9)
        e = ChebyshevExpansion(tuple(coeffs), rho=2.0, bound_m=50.0)
        for x in rng.uniform(-1, 1, 25):
            expected = np.polynomial.chebyshev.chebval(x, coeffs)
            assert evaluate(e, float(x)) == pytest.approx(expected, abs=1e-12)

    def test_polynomial_exactness(self):
        rng = np.random.default_rng(3)
        coeffs = rng.standard_normal(6)

        def f(x):
            return float(np.polynomial.chebyshev.chebval(x, coeffs))

        e = expand(f, rho=2.0, bound_m=20.0, degree=8)
        for x in np.linspace(-1, 1, 41):
            assert evaluate(e, float(x)) == pytest.approx(f(x), abs=1e-12)

    def test_out_of_domain_rejected(self):
        e = ChebyshevExpansion((1.0,), rho=2.0, bound_m=1.0)
        with pytest.raises(ValueError):
            evaluate(e, 1.5)


class TestDegreeForAccuracy:
    def test_slack_accuracy_needs_degree_zero(self):
        assert degree_for_accuracy(rho=2.0, bound_m=1.0, eps=2.5) == 0

    def test_formula_arithmetic(self):
        # rho = 2, M = 1, eps = 1e-6: ceil(log2(2e6)) = 21
        assert degree_for_accuracy(2.0, 1.0, 1e-6) == 21

    def test_returned_degree_is_minimal(self):
        for (rho, m, eps) in [(2.0, 1.0, 1e-6), (1.5, 4.0, 1e-9), (3.0, 2.7, 1e-4)]:
            j = degree_for_accuracy(rho, m, eps)
            assert truncation_bound(rho, m, j) <= eps
            if j > 0:
                assert truncation_bound(rho, m, j - 1) > eps

    def test_logarithmic_growth(self):
        for rho in (1.5, 2.0, 4.0):
            j1 = degree_for_accuracy(rho, 1.0, 1e-4)
            j2 = degree_for_accuracy(rho, 1.0, 1e-5)
            assert j2 - j1 <= math.ceil(math.log(10) / math.log(rho)) + 1

    def test_json_round_trip(self):
        e = expand(math.exp, 2.0, math.exp(1.25), degree=7)
        again = ChebyshevExpansion.from_json_dict(e.to_json_dict())
        assert again.coeffs == e.coeffs
        assert again.rho == e.rho
