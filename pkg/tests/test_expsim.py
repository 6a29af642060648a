import math

import numpy as np
import pytest

from phasetest import (
    DomainError,
    FockSpec,
    GaussianSpec,
    MixtureSpec,
    NumericError,
    ValidationError,
    displaced_parity,
    eval_J,
    PointSet4,
)
from phasetest.expsim import (
    PhononDistribution,
    RabiModel,
    TimeSeries,
    displaced_distribution,
    estimate_J,
    fit_distribution,
    ideal_signal,
    measure_J_pipeline,
    mixture_J,
    paper_protocol_times,
    run_parity_pipeline,
    simulate_signal,
    theory_parities,
)

ION_POINTS = ((-0.110, -0.110), (0.121, 0.100), (0.100, 0.121), (0.331, 0.331))


class TestDisplacedDistribution:
    def test_identity_displacement(self):
        q = displaced_distribution(FockSpec(2), 0.0, 12)
        expected = np.zeros(13)
        expected[2] = 1.0
        np.testing.assert_allclose(q.q, expected, atol=1e-15)

    def test_displaced_vacuum_is_poisson(self):
        alpha = 0.7 - 0.2j
        x = abs(alpha) ** 2
        q = displaced_distribution(FockSpec(0), alpha, 12)
        for n in range(8):
            assert q.q[n] == pytest.approx(math.exp(-x) * x**n / math.factorial(n), abs=1e-12)

    def test_scipy_cross_check(self, rng):
        from scipy.special import eval_genlaguerre, factorial

        alpha = 0.4 + 0.5j
        x = abs(alpha) ** 2
        q = displaced_distribution(FockSpec(3), alpha, 15)
        for n in range(10):
            lo, hi = min(n, 3), max(n, 3)
            a = hi - lo
            expected = (
                math.exp(-x) * x**a * factorial(lo) / factorial(hi)
                * eval_genlaguerre(lo, a, x) ** 2
            )
            assert q.q[n] == pytest.approx(float(expected), rel=1e-10, abs=1e-14)

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    def test_parity_matches_wigner_formula(self, n, rng):
        # two independent routes to the same number: displaced-Fock
        # overlaps vs the closed Laguerre form of the Wigner function
        for _ in range(5):
            alpha = complex(*rng.uniform(-0.7, 0.7, 2))
            q = displaced_distribution(FockSpec(n), alpha, n + 25)
            direct = displaced_parity(FockSpec(n), alpha.real, alpha.imag)
            assert q.parity() == pytest.approx(direct, abs=1e-6)

    def test_parity_for_mixture(self, rng):
        state = MixtureSpec([(0.4, FockSpec(0)), (0.6, FockSpec(2))])
        alpha = 0.3 + 0.1j
        q = displaced_distribution(state, alpha, 20)
        assert q.parity() == pytest.approx(
            displaced_parity(state, alpha.real, alpha.imag), abs=1e-6
        )

    def test_guard(self):
        with pytest.raises(ValidationError):
            displaced_distribution(FockSpec(2), 0.1, 5)

    def test_truncation_warning(self):
        with pytest.warns(UserWarning, match="tail"):
            displaced_distribution(FockSpec(4), 2.5, 14)

    def test_rejects_non_fock(self):
        with pytest.raises(ValidationError):
            displaced_distribution(GaussianSpec(), 0.1, 12)


class TestPhononDistribution:
    def test_parity_sign_pattern(self):
        q = PhononDistribution(q=(0.5, 0.3, 0.2))
        assert q.parity() == pytest.approx(0.5 - 0.3 + 0.2)

    def test_validation(self):
        with pytest.raises(ValidationError):
            PhononDistribution(q=(0.5, -0.1))
        with pytest.raises(ValidationError):
            PhononDistribution(q=(0.9, 0.3))
        with pytest.raises(ValidationError):
            PhononDistribution(q=())


class TestSignals:
    def test_single_level_sinusoid(self):
        model = RabiModel(A_b=1.0, lambda_b=0.0)
        q = PhononDistribution(q=(1.0,))
        times = paper_protocol_times()
        p = ideal_signal(q, model, times)
        expected = 0.5 * (1 - np.cos(model.eta_omega * np.asarray(times)))
        np.testing.assert_allclose(p, expected, atol=1e-12)

    def test_protocol_grid(self):
        times = paper_protocol_times()
        assert len(times) == 150
        assert times[0] == pytest.approx(1e-6)
        assert times[-1] == pytest.approx(150e-6)

    def test_ideal_flag_reproduces_model(self):
        model = RabiModel()
        q = displaced_distribution(FockSpec(1), 0.2, 12)
        times = paper_protocol_times()
        ts = simulate_signal(q, model, times, ideal=True)
        np.testing.assert_allclose(ts.p_up, ideal_signal(q, model, times), atol=1e-12)

    def test_sampling_bounds_and_determinism(self):
        model = RabiModel()
        q = displaced_distribution(FockSpec(0), 0.4, 12)
        times = paper_protocol_times()
        a = simulate_signal(q, model, times, shots=100, seed=5)
        b = simulate_signal(q, model, times, shots=100, seed=5)
        assert a.p_up == b.p_up
        assert all(0.0 <= p <= 1.0 for p in a.p_up)

    def test_rates_increase(self):
        rates = RabiModel().rates()
        assert np.all(np.diff(rates) > 0)

    def test_model_validation(self):
        with pytest.raises(ValidationError):
            RabiModel(eta_omega=0.0)
        with pytest.raises(ValidationError):
            RabiModel(lambda_b=-1.0)


class TestTimeSeries:
    def test_csv_round_trip(self):
        ts = TimeSeries(times=(1e-6, 2e-6, 3e-6), p_up=(0.1, 0.5, 0.9), shots=50)
        again = TimeSeries.from_csv(ts.to_csv())
        assert again.shots == 50
        np.testing.assert_allclose(again.times, ts.times, rtol=1e-9)
        np.testing.assert_allclose(again.p_up, ts.p_up, atol=1e-9)

    def test_header_required(self):
        with pytest.raises(ValidationError):
            TimeSeries.from_csv("a,b,c\n1,2,3\n")

    def test_monotone_times(self):
        with pytest.raises(ValidationError):
            TimeSeries(times=(2e-6, 1e-6), p_up=(0.1, 0.2), shots=10)


class TestFit:
    def test_noiseless_round_trip(self):
        model = RabiModel()
        q = displaced_distribution(FockSpec(2), 0.331 + 0.331j, model.n_max, guard=8)
        ts = simulate_signal(q, model, paper_protocol_times(), ideal=True)
        fit, diags = fit_distribution(ts, model)
        np.testing.assert_allclose(fit.q, q.q, atol=1e-6)
        assert diags.residual_norm < 1e-9
        assert not diags.mass_deficient

    def test_shot_noise_recovery_within_three_sigma(self):
        model = RabiModel()
        state = FockSpec(2)
        alpha = 0.331 + 0.331j
        truth = displaced_parity(state, alpha.real, alpha.imag)
        parities = [
            run_parity_pipeline(state, alpha, model, paper_protocol_times(), 100, seed)[0]
            for seed in range(12)
        ]
        scatter = np.std(parities, ddof=1)
        assert abs(np.mean(parities) - truth) < 3 * scatter / math.sqrt(len(parities))
        # shot-noise-limited parity scatter sits at the few-percent level
        assert 0.002 < scatter < 0.15

    def test_mass_deficient_flag(self):
        # population beyond the fitted levels leaks mass
        big = displaced_distribution(FockSpec(6), 1.2, 25)
        small_model = RabiModel(n_max=4)
        ts = simulate_signal(big, small_model, paper_protocol_times(), ideal=True)
        _, diags = fit_distribution(ts, small_model)
        assert diags.mass_deficient

    def test_too_short_series(self):
        model = RabiModel()
        q = displaced_distribution(FockSpec(0), 0.1, 12)
        times = paper_protocol_times()[:5]
        ts = simulate_signal(q, model, times, ideal=True)
        with pytest.raises(NumericError):
            fit_distribution(ts, model)

    def test_sub_period_series(self):
        model = RabiModel()
        q = displaced_distribution(FockSpec(0), 0.1, 12)
        times = tuple(t * 1e-2 for t in paper_protocol_times())
        ts = simulate_signal(q, model, times, ideal=True)
        with pytest.raises(NumericError, match="period"):
            fit_distribution(ts, model)

    def test_imperfection_refinement(self):
        true_model = RabiModel(A_b=0.9, lambda_b=4e3)
        assumed = RabiModel(A_b=1.0, lambda_b=5e3)
        q = displaced_distribution(FockSpec(1), 0.3, assumed.n_max, guard=9)
        ts = simulate_signal(q, true_model, paper_protocol_times(), ideal=True)
        _, fixed = fit_distribution(ts, assumed)
        _, refined = fit_distribution(ts, assumed, refine_imperfections=True)
        assert refined.residual_norm < fixed.residual_norm
        assert refined.A_b == pytest.approx(0.9, abs=0.02)

    def test_unbiased_over_many_pipelines(self):
        model = RabiModel()
        state = FockSpec(1)
        alpha = 0.25 + 0.1j
        truth = displaced_parity(state, alpha.real, alpha.imag)
        times = paper_protocol_times()
        parities = np.array(
            [
                run_parity_pipeline(state, alpha, model, times, 100, seed)[0]
                for seed in range(200)
            ]
        )
        sigma = parities.std(ddof=1)
        assert abs(parities.mean() - truth) <= sigma / math.sqrt(200)


class TestEstimates:
    def test_perfect_parities(self):
        value, sigma = estimate_J([(1, 0), (1, 0), (1, 0), (1, 0)])
        assert value == 2.0
        assert sigma == 0.0

    def test_sign_pattern_and_quadrature(self):
        value, sigma = estimate_J([(0.9, 0.03), (0.8, 0.04), (0.7, 0.0), (0.5, 0.0)])
        assert value == pytest.approx(0.9 + 0.8 + 0.7 - 0.5)
        assert sigma == pytest.approx(math.hypot(0.03, 0.04))

    def test_repeats_scale_sigma(self):
        _, s1 = estimate_J([(1, 0.1)] * 4, repeats=1)
        _, s4 = estimate_J([(1, 0.1)] * 4, repeats=4)
        assert s4 == pytest.approx(s1 / 2)

    def test_wrong_count(self):
        with pytest.raises(ValidationError):
            estimate_J([(1, 0)] * 3)

    def test_mixture_identity(self):
        assert mixture_J((2.2, 0.1), (2.5, 0.2), 1.0) == (2.2, pytest.approx(0.1))

    def test_mixture_values(self):
        value, _ = mixture_J((2.211, 0.0), (2.548, 0.0), 0.5)
        assert value == pytest.approx(2.3795, abs=1e-12)
        value, _ = mixture_J((2.211, 0.0), (2.548, 0.0), 0.65)
        assert value == pytest.approx(2.329, abs=5e-4)

    def test_mixture_range(self):
        with pytest.raises(DomainError):
            mixture_J((2.0, 0.0), (2.0, 0.0), 1.5)

    def test_mixture_matches_eval_J_linearity(self):
        pts = PointSet4(points=ION_POINTS)
        j0 = eval_J(FockSpec(0), pts).value
        j2 = eval_J(FockSpec(2), pts).value
        for f in (0.25, 0.5, 0.8):
            mix = MixtureSpec([(f, FockSpec(0)), (1 - f, FockSpec(2))])
            combined, _ = mixture_J((j0, 0.0), (j2, 0.0), f)
            assert combined == pytest.approx(eval_J(mix, pts).value, abs=1e-13)


class TestPipeline:
    def test_theory_parities_match_states_module(self):
        vals = theory_parities(FockSpec(2), ION_POINTS)
        for (x, y), v in zip(ION_POINTS, vals):
            assert v == pytest.approx(displaced_parity(FockSpec(2), x, y), abs=1e-14)

    def test_monte_carlo_covers_truth(self):
        value, sigma, per_point = measure_J_pipeline(
            FockSpec(0), ION_POINTS, shots=100, repeats=10, seed=7
        )
        truth = eval_J(FockSpec(0), PointSet4(points=ION_POINTS)).value
        assert abs(value - truth) < 2 * sigma
        assert len(per_point) == 4

    def test_threaded_matches_serial(self):
        serial = measure_J_pipeline(FockSpec(0), ION_POINTS, shots=40, repeats=4, seed=9)
        threaded = measure_J_pipeline(
            FockSpec(0), ION_POINTS, shots=40, repeats=4, seed=9, threads=4
        )
        assert serial[0] == pytest.approx(threaded[0], abs=0)
        assert serial[2] == threaded[2]

    def test_repeats_validation(self):
        with pytest.raises(ValidationError):
            measure_J_pipeline(FockSpec(0), ION_POINTS, repeats=1, seed=0)
