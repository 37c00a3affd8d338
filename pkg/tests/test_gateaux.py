"""Numerical derivative oracle: Riesz identities, remainders, sweeps."""
import math

import numpy as np
import pytest
from scipy import stats

from influence_lab import (
    Ate,
    AverageDensity,
    Column,
    DerivativeUnstableError,
    DiscreteDistribution,
    MixturePath,
    NormalMixture,
    Observation,
    PopulationMean,
    Quantile,
    Schema,
    TailConditionalExpectation,
    ValidationError,
    VerificationError,
    check_t1_identity,
    eif_mean_under,
    numerical_gateaux,
    oracle_sweep,
    point_mass,
    remainder_decay_check,
    richardson_derivative,
    smooth_path_check,
    smooth_sweep,
    verify_eif,
    von_mises_remainder,
)
from influence_lab.gateaux import (
    FULL_SCHEMA,
    OUTCOME_ONLY,
    SWEEP_PLAN,
    contaminant_law,
    random_law,
)


def _full_law(rng_seed=0):
    rng = np.random.default_rng(rng_seed)
    return random_law(rng, FULL_SCHEMA), rng


class TestRichardsonDerivative:
    def test_exponential(self):
        value, halvings = richardson_derivative(math.exp, at=0.0)
        assert value == pytest.approx(1.0, abs=1e-10)
        assert halvings >= 1

    def test_polynomial_from_the_left(self):
        value, _ = richardson_derivative(lambda t: t**3 + 2.0 * t, at=1.0,
                                         direction=-1.0)
        assert value == pytest.approx(5.0, abs=1e-9)

    def test_nonsmooth_function_raises(self):
        with pytest.raises(DerivativeUnstableError, match="halvings"):
            richardson_derivative(math.sqrt, at=0.0)


Y_ONLY = Schema((Column("y", "outcome", "continuous"),))
THREE_ATOMS = DiscreteDistribution(
    Y_ONLY, [[0.0], [1.0], [4.0]], [0.5, 0.25, 0.25]
)


class TestVerifyEif:
    def test_population_mean_derivative_is_mean_shift(self):
        # Psi(P_t) is affine in t, so the derivative at 0 equals
        # E_Q[y] - E_P[y] for the point mass Q at each atom.
        reports = verify_eif(PopulationMean(), THREE_ATOMS)
        base_mean = 0.25 + 1.0
        for report, atom in zip(reports, (0.0, 1.0, 4.0)):
            assert not report.skipped
            assert report.analytic_value == pytest.approx(atom - base_mean, abs=1e-12)
            assert report.rel_error < 1e-8

    def test_ate_sweep_on_random_law(self):
        law, _ = _full_law(3)
        for report in verify_eif(Ate(), law):
            assert report.rel_error < 1e-6

    def test_tiny_conditioning_cell_is_skipped_not_passed(self):
        # One (z, x) cell carries 1e-8 probability: conditional means along
        # the path are ill-conditioned there, so the check must step aside.
        law = DiscreteDistribution(
            FULL_SCHEMA,
            [[0, 0, 1.0], [0, 1, 2.0], [1, 0, 3.0], [1, 1, 4.0]],
            [0.4 - 1e-8, 0.3, 1e-8, 0.3],
        )
        reports = verify_eif(Ate(), law)
        assert all(r.skipped for r in reports)
        assert "conditioning cell" in reports[0].skip_reason

    def test_estimand_without_discrete_oracle_is_refused(self):
        with pytest.raises(ValidationError, match="smooth"):
            verify_eif(Quantile(tau=0.5), THREE_ATOMS)

    def test_explicit_contaminant_list(self):
        q = DiscreteDistribution(Y_ONLY, [[0.0], [1.0], [4.0]], [0.1, 0.1, 0.8])
        (report,) = verify_eif(PopulationMean(), THREE_ATOMS, contaminants=[q])
        assert report.contaminant_label == "law:0"
        assert report.rel_error < 1e-8

    def test_derivative_endpoint_validation(self):
        path = MixturePath(THREE_ATOMS, point_mass(Observation([4.0], Y_ONLY)))
        with pytest.raises(ValidationError, match="endpoint"):
            numerical_gateaux(PopulationMean(), path, at_t=0.5)


class TestT1Identity:
    def test_matches_negated_eif_mean(self):
        law, rng = _full_law(5)
        cont = contaminant_law(rng, law)
        report = check_t1_identity(Ate(), law, cont)
        assert report.at_t == 1.0
        assert report.analytic_value == -eif_mean_under(Ate(), law, cont)
        assert report.rel_error < 1e-6

    def test_population_mean_closed_form(self):
        q = DiscreteDistribution(Y_ONLY, [[0.0], [1.0], [4.0]], [0.2, 0.3, 0.5])
        report = check_t1_identity(PopulationMean(), THREE_ATOMS, q)
        # -E_P[phi(O, Q)] = E_Q[y] - E_P[y] for the mean.
        assert report.analytic_value == pytest.approx(2.3 - 1.25, abs=1e-12)
        assert report.rel_error < 1e-8


class TestVonMisesRemainder:
    def test_drift_is_negated_eif_mean(self):
        law, rng = _full_law(7)
        cont = contaminant_law(rng, law)
        report = von_mises_remainder(Ate(), law, cont)
        assert report.drift == -eif_mean_under(Ate(), law, cont)

    def test_linear_functional_has_zero_remainder(self):
        law, rng = _full_law(9)
        cont = contaminant_law(rng, law)
        report = von_mises_remainder(PopulationMean(), law, cont)
        assert report.remainder == pytest.approx(0.0, abs=1e-12)
        assert report.bound is None

    def test_average_density_remainder_is_exact_squared_mass(self):
        rng = np.random.default_rng(2)
        law = random_law(rng, OUTCOME_ONLY)
        cont = contaminant_law(rng, law)
        report = von_mises_remainder(AverageDensity(), law, cont)
        assert report.bound_kind == "exact_squared_mass"
        diff = [law.prob_of(a) - cont.prob_of(a) for a in law.support]
        assert report.remainder == pytest.approx(sum(d * d for d in diff), abs=1e-14)
        assert report.remainder == pytest.approx(report.bound, abs=1e-14)

    @pytest.mark.parametrize("seed", range(6))
    def test_ate_remainder_respects_cauchy_schwarz_bound(self, seed):
        law, rng = _full_law(seed)
        cont = contaminant_law(rng, law)
        report = von_mises_remainder(Ate(), law, cont)
        assert report.bound_kind == "cauchy_schwarz"
        assert abs(report.remainder) <= report.bound + 1e-12

    def test_expansion_identity_holds_exactly(self):
        law, rng = _full_law(11)
        cont = contaminant_law(rng, law)
        r = von_mises_remainder(Ate(), law, cont)
        residual = r.psi_contaminant - r.psi_base - r.drift + r.remainder
        assert residual == 0.0


class TestRemainderDecay:
    def test_ate_ratio_stabilizes(self):
        law, rng = _full_law(0)
        cont = contaminant_law(rng, law)
        ratios = remainder_decay_check(Ate(), law, cont)
        np.testing.assert_allclose(
            ratios,
            [-0.015519281284352874, -0.017373533337636245, -0.018427446972496538],
            rtol=1e-12,
        )
        for a, b in zip(ratios, ratios[1:]):
            assert abs(b - a) <= 0.2 * max(1e-12, abs(a))

    def test_average_density_ratio_is_constant(self):
        # R(P, P_t) = t^2 * sum (p - q)^2, so R / t^2 is flat in t and
        # equals the exact bound of the full-contaminant report.
        rng = np.random.default_rng(0)
        law = random_law(rng, OUTCOME_ONLY)
        cont = contaminant_law(rng, law)
        ratios = remainder_decay_check(AverageDensity(), law, cont)
        assert max(ratios) - min(ratios) < 1e-10
        full = von_mises_remainder(AverageDensity(), law, cont)
        assert ratios[0] == pytest.approx(full.bound, abs=1e-10)


class TestSmoothChecks:
    def test_quantile_against_gaussian_closed_form(self):
        base = NormalMixture(weights=(1.0,), means=(0.0,), sds=(1.0,))
        cont = NormalMixture(weights=(1.0,), means=(1.0,), sds=(0.8,))
        spec = Quantile(tau=0.5)
        report = smooth_path_check(spec, base, cont)
        # E_Q[phi_P] = (tau - F_Q(psi_P)) / f_P(psi_P) with psi_P = 0.
        expected = (0.5 - stats.norm.cdf(0.0, loc=1.0, scale=0.8)) / stats.norm.pdf(0.0)
        assert report.analytic_value == pytest.approx(expected, abs=1e-8)
        assert report.numerical_derivative == pytest.approx(expected, abs=1e-6)

    def test_tail_mean_against_gaussian_closed_form(self):
        base = NormalMixture(weights=(1.0,), means=(0.0,), sds=(1.0,))
        cont = NormalMixture(weights=(1.0,), means=(0.5,), sds=(0.7,))
        c = 0.25
        spec = TailConditionalExpectation(threshold=c)
        report = smooth_path_check(spec, base, cont)
        # phi_P(y) = 1{y <= c} (y - psi_P) / F_P(c); under Q ~ N(0.5, 0.7^2):
        # E_Q[y 1{y <= c}] = mu F_Q(c) - sigma^2 f_Q(c).
        psi0 = -stats.norm.pdf(c) / stats.norm.cdf(c)
        fq = stats.norm.cdf(c, loc=0.5, scale=0.7)
        partial = 0.5 * fq - 0.7**2 * stats.norm.pdf(c, loc=0.5, scale=0.7)
        expected = (partial - psi0 * fq) / stats.norm.cdf(c)
        assert report.analytic_value == pytest.approx(expected, abs=1e-6)
        assert report.rel_error < 1e-5

    def test_smooth_battery_passes(self):
        result = smooth_sweep()
        assert result.checked == 7
        assert result.skipped == 0
        assert result.worst_rel_error < 1e-5

    def test_family_type_validation(self):
        base = NormalMixture(weights=(1.0,), means=(0.0,), sds=(1.0,))
        with pytest.raises(ValidationError, match="no smooth-family check"):
            smooth_path_check(Ate(), base, base)
        with pytest.raises(ValidationError, match="NormalMixture"):
            smooth_path_check(Quantile(tau=0.5), base, object())


class TestOracleSweep:
    def test_small_sweep_passes_everywhere(self):
        result = oracle_sweep(trials=3, seed=123)
        assert result.checked > 0
        assert result.skipped == 0
        assert result.worst_rel_error < 1e-6

    def test_keep_worst_collapses_to_one_report_per_trial(self):
        result = oracle_sweep(trials=2, seed=11, keep="worst")
        assert len(result.reports) == 2 * len(SWEEP_PLAN)

    def test_only_filters_the_plan(self):
        result = oracle_sweep(trials=2, seed=11, only="ate")
        assert {r.spec.name for r in result.reports} == {"ate"}

    def test_only_unknown_name_lists_available(self):
        with pytest.raises(ValidationError, match="available"):
            oracle_sweep(trials=1, only="no_such_estimand")

    def test_keep_validation(self):
        with pytest.raises(ValidationError, match="keep"):
            oracle_sweep(trials=1, keep="best")

    def test_t1_sweep_runs_one_check_per_trial(self):
        result = oracle_sweep(trials=2, seed=29, at_t=1.0)
        assert result.checked == 2 * len(SWEEP_PLAN)
        assert result.worst_rel_error < 1e-6

    def test_raise_on_failure_with_absurd_tolerance(self):
        with pytest.raises(VerificationError, match="rel error"):
            oracle_sweep(trials=1, seed=5, tolerance=1e-18, raise_on_failure=True)
