import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aerial_na.availability import (SnrModel, TailEstimator, build_profile_plan,
                                    composition_thresholds, gamma_th_ls, gamma_th_ms,
                                    na_lower_bound, snr_model, tail_probability, trajectory_oracle)
from aerial_na.channel import FadingSpec, dbm_to_watt
from aerial_na.errors import ConfigError, InfeasibleError
from aerial_na.numerics import RngStream, inverse_q, upper_reg_gamma
from aerial_na.optimizer import heterogeneity_profile
from aerial_na.scenario import Scenario
from aerial_na.traffic import EBResult, QosSplit


def _model(scenario, K, xi, U=1, source="S4"):
    profile = heterogeneity_profile(source, U, scenario)
    plan = build_profile_plan(profile, K, xi, scenario)
    return plan, snr_model(K, xi, plan, scenario.radio, scenario.worst, scenario.faps)


def test_snr_model_baseline(scenario):
    plan, m = _model(scenario, 6, 44)
    rho = 0.5 * dbm_to_watt(5) / (885e3 * dbm_to_watt(-174))
    assert m.rho == pytest.approx(rho)
    assert m.rho_p == pytest.approx(44 * rho)
    assert m.rho_hat == pytest.approx(rho / (6 / 44 + 1))
    assert m.diversity_order == 10
    assert m.sigma_w2 == pytest.approx(1 / (44 * rho * scenario.worst.path_loss + 1))
    assert 0 < m.sigma_w2 < 1


def test_snr_model_rejects_k_above_l(scenario):
    plan, _ = _model(scenario, 6, 44)
    with pytest.raises(InfeasibleError):
        snr_model(16, 44, plan, scenario.radio, scenario.worst, 15)


def test_ls_threshold_forms(scenario):
    plan, _ = _model(scenario, 6, 44)
    eb = EBResult(0.06, 1.0)
    v = gamma_th_ls(scenario.ls, plan, eb, scenario.radio)
    e = gamma_th_ls(scenario.ls, plan, eb, scenario.radio, exact=True)
    expo = 1000 * 0.06 * math.log(2) / (88.5 - 44)
    assert v == pytest.approx(1.5 * math.exp(expo))
    assert v - e == pytest.approx(1.5)


def test_ms_threshold(scenario):
    plan, _ = _model(scenario, 6, 44)
    eb = EBResult(0.4, 1.0)
    split = QosSplit(0.4e-3, 5e-6, 5e-6)
    g = gamma_th_ms(scenario.ms, split, plan, eb, scenario.radio)
    n_data = 885e3 * 1e-4 - 44
    ref = math.exp(160 * 0.4 * math.log(2) / n_data + inverse_q(5e-6) / math.sqrt(n_data)) - 1
    assert g == pytest.approx(ref)


def test_ms_threshold_warns_on_large_eps(scenario):
    plan, _ = _model(scenario, 6, 44)
    with pytest.warns(UserWarning):
        gamma_th_ms(scenario.ms, QosSplit(0.4e-3, 0.1, 0.6), plan, EBResult(0.4, 1.0),
                    scenario.radio)


def test_thresholds_overflow_to_inf(scenario):
    plan, _ = _model(scenario, 6, 44)
    assert gamma_th_ls(scenario.ls, plan, EBResult(1e3, 1.0), scenario.radio) == math.inf


@pytest.mark.parametrize("csi, scale", [("perfect", 1.0), ("mmse-orthogonal", 0.8),
                                        ("literal-subtraction", 1.2)])
def test_mc_matches_closed_form(csi, scale):
    fading = FadingSpec(mu=1)
    model = SnrModel(1.0, 1.0, 1.0, 1.0, 3, 0.2)
    mc = TailEstimator(fading, csi, "mc", 200_000, seed=2)
    for x in (0.5, 2.0, 5.0):
        p, hw = mc.tail(model, x)
        assert abs(p - upper_reg_gamma(3, x / scale)) <= 4 * hw


def test_plain_mc_matches_closed_form():
    model = SnrModel(1.0, 1.0, 1.0, 1.0, 5, 0.0)
    p, hw = tail_probability(model, 4.0, FadingSpec(), "perfect", 200_000, RngStream(8))
    assert abs(p - upper_reg_gamma(15, 12.0)) <= 4 * hw


def test_estimator_guards():
    with pytest.raises(ConfigError):
        TailEstimator(FadingSpec(kappa=1.0), method="analytic")
    with pytest.raises(ConfigError):
        TailEstimator(FadingSpec(mu=3), "literal-subtraction", method="analytic")
    assert TailEstimator(FadingSpec(kappa=1.0)).uses_mc
    assert not TailEstimator(FadingSpec()).uses_mc


def test_tail_edge_thresholds():
    est = TailEstimator(FadingSpec())
    m = SnrModel(1.0, 1.0, 1.0, 1.0, 3, 0.1)
    assert est.tail(m, 0.0) == (1.0, 0.0)
    assert est.tail(m, math.inf) == (0.0, 0.0)


def test_mc_common_random_numbers():
    m = SnrModel(1.0, 1.0, 1.0, 1.0, 4, 0.1)
    a = TailEstimator(FadingSpec(), method="mc", trials=50_000, seed=5)
    b = TailEstimator(FadingSpec(), method="mc", trials=50_000, seed=5)
    assert a.tail(m, 2.5) == b.tail(m, 2.5)
    # nested thresholds on a common pool give ordered estimates
    assert a.tail(m, 2.0)[0] >= a.tail(m, 2.5)[0] >= a.tail(m, 3.0)[0]


def test_na_factors_multiply(scenario, analytic):
    e = na_lower_bound(heterogeneity_profile("S4", 6, scenario), 6, 44, scenario, analytic)
    assert e.feasible and e.estimator == "analytic"
    assert [f.kind for f in e.factors] == ["U_I"] + ["U_II"] * 5
    assert e.value == pytest.approx(e.recompute(), rel=1e-15)
    assert all(e.value <= f.tail for f in e.factors)
    assert e.factors[1].exponent == 62


def test_na_infeasible_rows(scenario, analytic):
    p = heterogeneity_profile("S4", 3, scenario)
    e = na_lower_bound(p, 16, 44, scenario, analytic)
    assert e.value == 0 and not e.feasible and "K = 16" in e.reason
    e = na_lower_bound(p, 6, 200, scenario, analytic)
    assert e.value == 0 and "xi_max" in e.reason


def test_strict_mode_rejects_k6(analytic):
    sc = Scenario(mode="strict")
    e = na_lower_bound(heterogeneity_profile("S4", 2, sc), 6, 44, sc, analytic)
    assert not e.feasible
    assert "B = 885 kHz > B_C = 500 kHz" in e.violations


def test_relaxed_mode_reports_violations(scenario, analytic):
    e = na_lower_bound(heterogeneity_profile("S4", 2, scenario), 6, 44, scenario, analytic)
    assert e.feasible
    assert "B = 885 kHz > B_C = 500 kHz" in e.violations


@given(st.sampled_from(["S1", "S2", "S3", "S4"]), st.integers(1, 11),
       st.sampled_from([(6, 44), (3, 20), (10, 40)]))
def test_adding_a_composition_never_helps(source, U, alloc):
    sc = Scenario()
    est = TailEstimator(sc.fading, method="analytic")
    K, xi = alloc
    a = na_lower_bound(heterogeneity_profile(source, U, sc), K, xi, sc, est).value
    b = na_lower_bound(heterogeneity_profile(source, U + 1, sc), K, xi, sc, est).value
    assert 0 <= b <= a <= 1


def test_composition_thresholds(scenario):
    p = heterogeneity_profile("S4", 3, scenario)
    plan = build_profile_plan(p, 6, 44, scenario)
    ths = composition_thresholds(p, plan, scenario)
    assert [t.tag for t in ths] == ["MS", "LS", "LS"]
    assert [t.quasi_static for t in ths] == [True, False, False]
    # tighter delay and faster UE in the second LS entry: higher threshold
    assert ths[2].gamma_th > ths[1].gamma_th


def test_si_literal_zeroes_everything(analytic):
    sc = Scenario(eb_unit="si-literal")
    e = na_lower_bound(heterogeneity_profile("S1", 2, sc), 6, 44, sc, analytic)
    assert e.value == 0.0


def test_trajectory_reduces_to_product_when_uncorrelated():
    fading = FadingSpec(mu=1)
    m = SnrModel(1.0, 1.0, 1.0, 1.0, 2, 0.0)
    p = upper_reg_gamma(2, 0.6)
    q, hw = trajectory_oracle(m, 0.6, 3, 0.0, fading, "perfect", 100_000, RngStream(1))
    assert abs(q - p ** 3) <= 4 * hw


def test_trajectory_fully_correlated_is_single_interval():
    fading = FadingSpec(mu=1)
    m = SnrModel(1.0, 1.0, 1.0, 1.0, 2, 0.0)
    q, hw = trajectory_oracle(m, 0.6, 5, 1.0, fading, "perfect", 100_000, RngStream(2))
    assert abs(q - upper_reg_gamma(2, 0.6)) <= 4 * hw


def test_product_form_is_conservative_under_correlation():
    fading = FadingSpec(mu=1)
    m = SnrModel(1.0, 1.0, 1.0, 1.0, 2, 0.0)
    p = upper_reg_gamma(2, 0.6)
    q, hw = trajectory_oracle(m, 0.6, 4, 0.9, fading, "perfect", 100_000, RngStream(3))
    assert q >= p ** 4 - 4 * hw
