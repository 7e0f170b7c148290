import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from puritylab.analysis import (
    MseDecomposition,
    crb_variance,
    eq11_lower_bound,
    fit_scaling,
    gaussian_tomography_deficit,
    greedy_fidelity_limit,
    k_lambda,
    mse_decompose,
    quantum_fisher,
)
from puritylab.core import PurityPrior
from puritylab.joint import max_fidelity
from puritylab.protocols import AdaptiveConfig, mc_average

# 30-digit mpmath evaluations of the Gamma-function expression.
K_REFERENCE = {
    0.1: 6.81645271636530197545110797576,
    0.25: 2.47857901064870785284402223284,
    0.5: 1.20042175487614142607359892134,
    0.75: 0.922187380710552986820104867965,
    0.9: 0.927105980461847039033164858274,
}


class TestQuantumFisher:
    def test_values(self):
        assert quantum_fisher(0.0) == 1.0
        assert quantum_fisher(0.6) == pytest.approx(1.5625, rel=1e-15)
        assert crb_variance(0.6, 10**4) == pytest.approx(6.4e-5, rel=1e-14)

    def test_identity_on_grid(self):
        r = np.linspace(0, 0.999, 200)
        np.testing.assert_allclose(quantum_fisher(r) * (1 - r) * (1 + r), 1.0, rtol=0, atol=1e-15)

    @pytest.mark.parametrize("r", [1.0, -0.1, 1.5])
    def test_domain(self, r):
        with pytest.raises(ValueError):
            quantum_fisher(r)


class TestMse:
    def test_constant(self):
        assert mse_decompose([0.3, 0.3, 0.3], 0.3) == MseDecomposition(0.0, 0.0, 0.0)

    def test_symmetric_pair(self):
        d = mse_decompose([0.5, 0.1], 0.3)
        assert d.variance == pytest.approx(0.04)
        assert d.bias_sq == pytest.approx(0.0, abs=1e-30)

    def test_empty(self):
        with pytest.raises(ValueError):
            mse_decompose([], 0.2)

    @given(st.lists(st.floats(-1, 1), min_size=2, max_size=50), st.floats(0, 1))
    def test_identity(self, xs, r):
        d = mse_decompose(xs, r)
        direct = math.fsum((x - r) ** 2 for x in xs) / len(xs)
        assert d.mse == pytest.approx(direct, rel=1e-12, abs=1e-20)
        assert d.mse == pytest.approx(d.variance + d.bias_sq, rel=1e-12, abs=1e-20)


class TestKLambda:
    @pytest.mark.parametrize("lam", sorted(K_REFERENCE))
    def test_reference_values(self, lam):
        assert k_lambda(lam) == pytest.approx(K_REFERENCE[lam], rel=1e-12)

    def test_bures_closed_form(self):
        assert k_lambda(0.5) == pytest.approx(8 * math.sqrt(2) / (3 * math.pi), rel=1e-12)

    def test_finite_on_grid(self):
        assert all(np.isfinite(k_lambda(l)) for l in np.linspace(0.05, 0.95, 19))

    @pytest.mark.parametrize("lam", [0.0, 1.0, -0.5, 1.2])
    def test_domain(self, lam):
        with pytest.raises(ValueError):
            k_lambda(lam)


class TestEq11:
    def test_no_angular_error(self):
        assert eq11_lower_bound(1000, 0.5, 0.0) == 1 - 1 / 2000

    def test_exponent(self):
        th = np.logspace(-6, -2, 9)
        deficit = np.array([1 - 1 / 2000 - eq11_lower_bound(1000, 0.3, t) for t in th])
        slope = np.polyfit(np.log(th), np.log(deficit), 1)[0]
        assert slope == pytest.approx(2 - 0.3, abs=0.05)

    def test_gaussian_model_matches_simulation(self):
        cfg = AdaptiveConfig(10**5, 0.8)
        s = mc_average("adaptive", cfg, 10**5, 21)
        model = gaussian_tomography_deficit(cfg.n1, 0.5, 24 / (5 * cfg.n0))
        assert s.deficit == pytest.approx(model, rel=0.03)


class TestFit:
    def test_exact_power_law(self):
        fit = fit_scaling([(N, 0.7 / N) for N in (10, 100, 1000)])
        assert fit.exponent == pytest.approx(-1.0, abs=1e-12)
        assert fit.coefficient == pytest.approx(0.7, rel=1e-12)
        assert fit.residual == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("pts", [
        [(1, 0.1), (2, 0.05)],
        [(1, 0.1), (2, -0.05), (3, 0.01)],
        [(1, 0.1), (1, 0.05), (3, 0.01)],
    ])
    def test_rejects_bad_input(self, pts):
        with pytest.raises(ValueError):
            fit_scaling(pts)

    def test_joint_bound_exponent(self):
        prior = PurityPrior(0.5)
        pts = [(N, 1 - max_fidelity(N, prior).f_max) for N in (250, 500, 1000, 2000)]
        fit = fit_scaling(pts)
        assert fit.exponent == pytest.approx(-1.0, abs=0.05)
        assert fit.coefficient == pytest.approx(0.5, abs=0.1)


class TestGreedyLimit:
    def test_known_values(self):
        # mpmath 2D quadrature: 3/4 (Bures) and 5/6 (hard sphere).
        assert greedy_fidelity_limit(PurityPrior(0.5)) == pytest.approx(0.75, abs=1e-7)
        assert greedy_fidelity_limit(PurityPrior(0.0)) == pytest.approx(5 / 6, abs=1e-7)
