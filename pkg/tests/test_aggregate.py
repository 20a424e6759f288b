import math

import numpy as np
import pytest
from scipy import integrate

from riskmix.aggregate import (
    AggregateModel,
    ComponentFamily,
    gamma_claims_model,
    inverse_gaussian_model,
    lindley_model,
    mean,
    mixture_representation,
    moment,
    moment_from_mixture,
    pareto_model,
    pdf,
    pdf_closed,
    pdf_generic,
    survival,
    variance,
    weibull_half_model,
    weibull_model,
)
from riskmix.dependence import DependentVector
from riskmix.errors import NonexistentMomentError, UnsupportedModelError
from riskmix.mixing import BetaSecondKindMixing
from riskmix.simulate import SimulationPlan, quadrature_mixture_pdf, sample_sums

FIVE_MODELS = {
    "pareto": lambda n: pareto_model(3.0, 1.0, n),
    "gamma_claims": lambda n: gamma_claims_model(0.5, 1.0, n),
    "weibull_half": lambda n: weibull_half_model(1.0, n),
    "weibull": lambda n: weibull_model(0.5, n),
    "invgauss": lambda n: inverse_gaussian_model(2.0, 1.0, n),
}


def integrate_density(f):
    v1, _ = integrate.quad(f, 0, 1, limit=400)
    v2, _ = integrate.quad(f, 1, np.inf, limit=400)
    return v1 + v2


class TestPinnedDensities:
    def test_pareto(self):
        m = pareto_model(3.0, 1.0, 2)
        assert pdf(m, 1.0) == pytest.approx(0.375, rel=1e-13)
        assert pdf_generic(m, 1.0) == pytest.approx(0.375, rel=1e-12)

    def test_gamma_claims(self):
        m = gamma_claims_model(0.5, 1.0, 2)
        want = math.exp(-1.0) * 1.5 / math.sqrt(math.pi)
        assert pdf_closed(m, 1.0) == pytest.approx(want, rel=1e-12)

    def test_weibull_half_marginal(self):
        m = weibull_half_model(1.0, 1)
        assert pdf(m, 4.0) == pytest.approx(0.25 * math.exp(-2.0), rel=1e-13)

    def test_weibull_degenerate_alpha_one(self):
        m = weibull_model(1.0, 2)
        assert pdf(m, 2.0) == pytest.approx(2.0 * math.exp(-2.0), rel=1e-12)

    def test_inverse_gaussian_printed_small_n(self):
        # explicit n = 2, 3, 4 displays in terms of a(x) = sqrt(1+2mu^2x/lam)-1
        lam, mu, x = 2.0, 1.0, 1.0
        a = math.sqrt(1 + 2 * mu ** 2 * x / lam) - 1.0
        b = lam / mu * a
        f2 = (mu ** 3 * x * math.exp(-b) / (lam * (a + 1) ** 3)
              + mu ** 2 * x * math.exp(-b) / (a + 1) ** 2)
        assert pdf_closed(inverse_gaussian_model(lam, mu, 2), x) == pytest.approx(f2, rel=1e-12)
        f3 = (3 * mu ** 5 * x ** 2 * math.exp(-b) / (2 * lam ** 2 * (a + 1) ** 5)
              + 3 * mu ** 4 * x ** 2 * math.exp(-b) / (2 * lam * (a + 1) ** 4)
              + mu ** 3 * x ** 2 * math.exp(-b) / (2 * (a + 1) ** 3))
        assert pdf_closed(inverse_gaussian_model(lam, mu, 3), x) == pytest.approx(f3, rel=1e-12)
        # last term carries the 1/Gamma(4) factor like the first three
        f4 = (15 * mu ** 7 * x ** 3 * math.exp(-b) / (6 * lam ** 3 * (a + 1) ** 7)
              + 15 * mu ** 6 * x ** 3 * math.exp(-b) / (6 * lam ** 2 * (a + 1) ** 6)
              + 6 * mu ** 5 * x ** 3 * math.exp(-b) / (6 * lam * (a + 1) ** 5)
              + mu ** 4 * x ** 3 * math.exp(-b) / (6 * (a + 1) ** 4))
        assert pdf_closed(inverse_gaussian_model(lam, mu, 4), x) == pytest.approx(f4, rel=1e-12)

    def test_lindley(self):
        m = lindley_model(1.0, 2)
        assert pdf(m, 1.0) == pytest.approx(0.3125, rel=1e-14)


@pytest.mark.parametrize("name", FIVE_MODELS)
class TestClosedEqualsGeneric:
    def test_grids(self, name):
        for n in (1, 2, 4, 5):
            m = FIVE_MODELS[name](n)
            xs = np.logspace(-2, 1.2, 25)
            a = pdf_closed(m, xs)
            b = pdf_generic(m, xs)
            assert np.max(np.abs(a - b) / np.abs(b)) < 1e-9


class TestQuadratureOracle:
    @pytest.mark.parametrize("name", ["pareto", "gamma_claims", "weibull_half", "invgauss"])
    def test_mixture_integral(self, name):
        m = FIVE_MODELS[name](2)
        for x in (0.3, 1.0, 4.0):
            want = quadrature_mixture_pdf(m.mixing, 2, x)
            assert pdf(m, x) == pytest.approx(want, rel=1e-8)

    def test_lindley_quadrature(self):
        m = lindley_model(1.0, 2)
        assert pdf(m, 1.0) == pytest.approx(
            quadrature_mixture_pdf(m.mixing, 2, 1.0), rel=1e-9)


class TestSurvival:
    def test_pareto_closed_form(self):
        m = pareto_model(3.0, 1.0, 2)
        for x in (0.0, 0.5, 1.0, 4.0):
            want = (1 + 4 * x) / (1 + x) ** 4
            assert survival(m, x) == pytest.approx(want, rel=1e-12)

    def test_marginal_case(self):
        m = pareto_model(3.0, 1.0, 1)
        assert survival(m, 1.0) == pytest.approx(0.125, rel=1e-14)

    def test_at_zero_exactly_one(self):
        for name in FIVE_MODELS:
            assert survival(FIVE_MODELS[name](3), 0.0) == 1.0

    def test_decreasing(self):
        for name in FIVE_MODELS:
            m = FIVE_MODELS[name](3)
            vals = survival(m, np.linspace(0, 8, 40))
            assert np.all(np.diff(vals) < 0)

    def test_derivative_is_minus_pdf(self):
        h = 1e-5
        for name in FIVE_MODELS:
            m = FIVE_MODELS[name](3)
            for x in (0.5, 1.0, 2.5):
                fd = -(survival(m, x + h) - survival(m, x - h)) / (2 * h)
                assert fd == pytest.approx(pdf(m, x), rel=1e-6)


class TestNormalization:
    @pytest.mark.parametrize("name", FIVE_MODELS)
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_integrates_to_one(self, name, n):
        m = FIVE_MODELS[name](n)
        total = integrate_density(lambda x: pdf(m, x))
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_beta2_mixing_through_generic_route(self):
        m = AggregateModel(DependentVector(BetaSecondKindMixing(2.0, 3.0), 2))
        total = integrate_density(lambda x: pdf(m, x))
        assert total == pytest.approx(1.0, abs=1e-7)


class TestMoments:
    def test_pareto(self):
        m = pareto_model(3.0, 1.0, 2)
        assert moment(m, 1) == pytest.approx(1.0, rel=1e-12)
        # also the B2 closed form beta^r Gamma(n+r) Gamma(alpha-r) / (Gamma(n) Gamma(alpha))
        assert moment(m, 2) == pytest.approx(3.0, rel=1e-12)
        with pytest.raises(NonexistentMomentError):
            moment(m, 3)

    def test_inverse_gaussian_mean_variance(self):
        m = inverse_gaussian_model(1.0, 1.0, 2)
        assert mean(m) == pytest.approx(4.0, rel=1e-12)
        n, lam, mu = 2, 1.0, 1.0
        want_var = (n * (1 / mu ** 2 + 3 / (lam * mu) + 3 / lam ** 2)
                    + n ** 2 * (1 / (lam * mu) + 2 / lam ** 2))
        assert variance(m) == pytest.approx(want_var, rel=1e-12)
        assert variance(m) == pytest.approx(26.0, rel=1e-12)

    def test_mean_variance_formula_identity(self):
        # var = n E(T^-2) + n^2 var(T^-1) must agree with moment(2) - moment(1)^2
        for m in (pareto_model(4.0, 1.5, 3), inverse_gaussian_model(2.0, 0.7, 3)):
            n = m.n
            w1 = m.mixing.neg_moment(1)
            w2 = m.mixing.neg_moment(2)
            want = n * w2 + n ** 2 * (w2 - w1 ** 2)
            assert variance(m) == pytest.approx(want, rel=1e-11)

    def test_moment_vs_quadrature(self):
        cases = [pareto_model(3.0, 1.0, 2), gamma_claims_model(0.5, 1.0, 2),
                 inverse_gaussian_model(2.0, 1.0, 2), weibull_half_model(1.0, 2),
                 weibull_model(0.5, 2)]
        for m in cases:
            for r in (1, 2):
                try:
                    want = moment(m, r)
                except NonexistentMomentError:
                    continue
                got = integrate_density(lambda x: x ** r * pdf(m, x))
                assert got == pytest.approx(want, rel=1e-6)

    def test_stable_models_route_through_mixture(self):
        m = weibull_half_model(1.0, 1)
        assert moment(m, 1) == pytest.approx(2.0, rel=1e-12)

    def test_monte_carlo_cross_check(self):
        m = pareto_model(3.0, 1.0, 2)
        sums = sample_sums(SimulationPlan(m, 1_000_000, seed=4242))
        se = sums.std(ddof=1) / math.sqrt(sums.size)
        assert abs(sums.mean() - 1.0) < 4 * se


class TestMixtureRepresentation:
    def test_pareto_single_beta2(self):
        rep = mixture_representation(pareto_model(3.0, 1.0, 2))
        (c,) = rep.components
        assert c.family is ComponentFamily.BETA2
        assert (c.shape, c.shape2, c.scale, c.weight) == (2.0, 3.0, 1.0, 1.0)

    def test_gamma_claims_shapes_and_weights(self):
        rep = mixture_representation(gamma_claims_model(0.5, 1.0, 2))
        shapes = [c.shape for c in rep.components]
        assert shapes == pytest.approx([1.5, 0.5])
        assert sum(c.weight for c in rep.components) == pytest.approx(1.0, abs=1e-12)

    def test_weibull_small_n_weights(self):
        alpha = 0.5
        rep2 = mixture_representation(weibull_model(alpha, 2))
        assert [c.weight for c in rep2.components] == pytest.approx([1 - alpha, alpha])
        assert [c.shape2 for c in rep2.components] == [1.0, 2.0]
        rep3 = mixture_representation(weibull_model(alpha, 3))
        want = [(1 - alpha) * (2 - alpha) / 2, 3 * alpha * (1 - alpha) / 2, alpha ** 2]
        assert [c.weight for c in rep3.components] == pytest.approx(want)

    def test_weibull_half_weights(self):
        rep = mixture_representation(weibull_half_model(1.0, 3))
        assert [c.weight for c in rep.components] == pytest.approx([0.375, 0.375, 0.25])
        assert [c.shape for c in rep.components] == pytest.approx([0.5, 1.0, 1.5])

    @pytest.mark.parametrize("name", ["pareto", "gamma_claims", "weibull_half", "weibull"])
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_weights_sum_to_one(self, name, n):
        rep = mixture_representation(FIVE_MODELS[name](n))
        assert sum(c.weight for c in rep.components) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("name", ["pareto", "gamma_claims", "weibull_half", "weibull"])
    def test_reconstructs_closed_pdf(self, name):
        for n in (1, 2, 3):
            m = FIVE_MODELS[name](n)
            rep = mixture_representation(m)
            xs = np.logspace(-1.5, 1.0, 20)
            got = rep.pdf(xs)
            want = pdf_closed(m, xs)
            assert np.max(np.abs(got - want)) < 1e-10 * max(1.0, np.max(np.abs(want)))

    def test_gamma_claims_sign_pattern_record(self):
        # empirical record: for alpha in (0,1) every printed weight came out
        # nonnegative on this grid (not asserted as a theorem elsewhere)
        for alpha in np.arange(0.1, 1.0, 0.2):
            for n in (2, 3, 4, 6):
                rep = mixture_representation(gamma_claims_model(float(alpha), 1.0, n))
                assert min(c.weight for c in rep.components) >= -1e-15

    def test_unsupported_kinds(self):
        with pytest.raises(UnsupportedModelError):
            mixture_representation(inverse_gaussian_model(1.0, 1.0, 2))
        with pytest.raises(UnsupportedModelError):
            mixture_representation(lindley_model(1.0, 2))


class TestMomentFromMixture:
    def test_weibull_half_marginal_mean(self):
        rep = mixture_representation(weibull_half_model(1.0, 1))
        assert moment_from_mixture(rep, 1) == pytest.approx(2.0, rel=1e-12)

    def test_order_zero(self):
        rep = mixture_representation(pareto_model(3.0, 1.0, 2))
        assert moment_from_mixture(rep, 0) == 1.0

    def test_gamma_claims_two_independent_oracles(self):
        # E(S_2) for alpha=1/2, lam=1: the mixture formula and Monte Carlo
        # must agree with each other (both give 2 * alpha / lam = 1)
        m = gamma_claims_model(0.5, 1.0, 2)
        rep = mixture_representation(m)
        mix_val = moment_from_mixture(rep, 1)
        sums = sample_sums(SimulationPlan(m, 1_000_000, seed=777))
        se = sums.std(ddof=1) / math.sqrt(sums.size)
        assert abs(sums.mean() - mix_val) < 4 * se
        assert mix_val == pytest.approx(1.0, rel=1e-12)

    def test_matches_direct_moment_everywhere_defined(self):
        for maker, n in ((lambda: pareto_model(4.0, 2.0, 3), 3),
                         (lambda: gamma_claims_model(0.7, 1.5, 2), 2)):
            m = maker()
            rep = mixture_representation(m)
            for r in (1, 2):
                assert moment_from_mixture(rep, r) == pytest.approx(
                    moment(m, r), rel=1e-9)

    def test_component_moment_divergence(self):
        rep = mixture_representation(pareto_model(2.0, 1.0, 2))
        with pytest.raises(NonexistentMomentError):
            moment_from_mixture(rep, 2)

    def test_each_component_family_is_a_density(self):
        reps = [mixture_representation(m) for m in
                (pareto_model(3.0, 1.0, 2), gamma_claims_model(0.5, 1.0, 3),
                 weibull_half_model(1.5, 2), weibull_model(0.4, 3))]
        seen = set()
        for rep in reps:
            for c in rep.components:
                seen.add(c.family)
                total = integrate_density(c.pdf)
                assert total == pytest.approx(1.0, abs=1e-9)
                assert c.cdf(1e9) == pytest.approx(1.0, abs=1e-7)
        assert len(seen) == 4  # every family exercised


class TestBoundaryBehavior:
    def test_pdf_at_zero_limits(self):
        assert pdf(pareto_model(3.0, 1.0, 1), 0.0) == pytest.approx(3.0)
        assert pdf(pareto_model(3.0, 1.0, 2), 0.0) == 0.0
        assert pdf(gamma_claims_model(0.5, 1.0, 2), 0.0) == math.inf
        assert pdf(weibull_half_model(1.0, 3), 0.0) == math.inf
        assert pdf(inverse_gaussian_model(2.0, 0.7, 1), 0.0) == pytest.approx(0.7)
        assert pdf(lindley_model(1.0, 1), 0.0) == pytest.approx(1.5)

    def test_pdf_negative_is_zero(self):
        m = pareto_model(3.0, 1.0, 2)
        assert pdf(m, -1.0) == 0.0
        out = pdf(m, np.array([-1.0, 0.0, 1.0]))
        assert out[0] == 0.0 and out[1] == 0.0 and out[2] == pytest.approx(0.375)

    def test_explicit_x_positive_contract(self):
        with pytest.raises(ValueError):
            pdf_generic(pareto_model(3.0, 1.0, 2), 0.0)
        with pytest.raises(ValueError):
            pdf_closed(pareto_model(3.0, 1.0, 2), -2.0)

    def test_high_order_derivative_path(self):
        # n up to the mid range stays finite and positive on the generic path
        for name in FIVE_MODELS:
            m = FIVE_MODELS[name](12)
            val = pdf_generic(m, 5.0)
            assert np.isfinite(val) and val > 0

    def test_derivative_cap_surfaces(self):
        from riskmix.errors import DerivativeCapError
        m = pareto_model(3.0, 1.0, 65)
        with pytest.raises(DerivativeCapError):
            pdf_generic(m, 1.0)
        with pytest.raises(DerivativeCapError):
            survival(pareto_model(3.0, 1.0, 80), 1.0)
