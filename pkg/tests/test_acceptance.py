"""Acceptance criteria, one test each.

Every test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line with the
measured numbers before asserting, so ``pytest -v`` output doubles as the
acceptance report.
"""

import csv
import io
import subprocess
import sys
import time

import numpy as np
import pytest

from aerial_na.availability import SnrModel, TailEstimator, build_profile_plan, snr_model
from aerial_na.channel import FadingSpec, Radio
from aerial_na.numerics import bessel_j0, inverse_q, q_function, upper_reg_gamma
from aerial_na.optimizer import (POLICIES, heterogeneity_profile, joint_optimize,
                                 max_heterogeneity, policy_curve)
from aerial_na.scenario import Scenario
from aerial_na.traffic import eb_poisson, queueing_oracle
from aerial_na.ura import (build_plan, cluster_bounds, feasibility, per_ue_bandwidth,
                           resource_bounds, slot_structure, subchannel_bounds)

TRIALS = 10**6
SOURCES = ("S1", "S2", "S3", "S4")


@pytest.fixture
def report(request):
    reporter = request.config.pluginmanager.getplugin("terminalreporter")

    def emit(n, ok, detail):
        line = f"ACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}"
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(line)
        else:
            print(line)
    return emit


def test_1_analytic_tail_oracle(report):
    sc = Scenario()
    profile = heterogeneity_profile("S4", 1, sc)
    K, xi = 11, 40
    plan = build_profile_plan(profile, K, xi, sc)
    model = snr_model(K, xi, plan, sc.radio, sc.worst, sc.faps)
    assert model.diversity_order == 5
    start = time.perf_counter()
    est = TailEstimator(FadingSpec(mu=3), "perfect", "mc", TRIALS, seed=1)
    gaps = []
    for x in (0.5, 1.0, 1.5):
        p, hw = est.tail(model, x * model.gain)
        gaps.append((x, p, upper_reg_gamma(15, 3 * x), hw))
    elapsed = time.perf_counter() - start
    ok = all(abs(p - ref) <= 4 * hw for _, p, ref, hw in gaps) and elapsed < 10
    detail = "; ".join(f"x={x}: mc {p:.6f} vs {ref:.6f} (hw {hw:.1e})" for x, p, ref, hw in gaps)
    report(1, ok, f"{detail}; {elapsed:.1f} s")
    assert ok


def test_2_estimation_error_oracle(report):
    model = SnrModel(1.0, 1.0, 1.0, 1.0, 3, 0.2)
    lines = []
    ok = True
    for csi, scale in (("mmse-orthogonal", 0.8), ("literal-subtraction", 1.2)):
        est = TailEstimator(FadingSpec(mu=1), csi, "mc", TRIALS, seed=1)
        for x in (0.5, 1.0, 2.0, 4.0):
            p, hw = est.tail(model, x)
            ref = upper_reg_gamma(3, x / scale)
            ok &= abs(p - ref) <= 4 * hw
            lines.append(f"{csi[:4]} x={x}: {abs(p - ref) / hw:.2f} hw")
    report(2, ok, "; ".join(lines))
    assert ok


def _baseline_curves(est, sc):
    out = {}
    for s in SOURCES:
        out[s] = [r.na_value for r in policy_curve(s, "baseline", sc, est, 6)]
    return out


def _trend_ok(curves):
    mono = all(all(b <= a for a, b in zip(v, v[1:])) for v in curves.values())
    dom = all(curves["S4"][u] <= min(curves[s][u] for s in ("S1", "S2", "S3"))
              for u in range(1, 6))
    return mono, dom


def test_3_heterogeneity_trend(report):
    sc = Scenario(baseline_k=6, mode="relaxed", eb_unit="verbatim")
    assert sc.radio.frame_ctrl == 0.05e-3
    start = time.perf_counter()
    mc = _baseline_curves(TailEstimator(sc.fading, method="mc", trials=TRIALS, seed=1, L=sc.faps), sc)
    an = _baseline_curves(TailEstimator(sc.fading, method="analytic", L=sc.faps), sc)
    elapsed = time.perf_counter() - start
    (m1, d1), (m2, d2) = _trend_ok(mc), _trend_ok(an)
    ok = m1 and d1 and m2 and d2 and elapsed < 300
    report(3, ok, f"mc monotone={m1} S4-dominated={d1}; analytic monotone={m2} "
                  f"S4-dominated={d2}; S4 U=6: mc {mc['S4'][-1]:.6f}, analytic "
                  f"{an['S4'][-1]:.6f}; {elapsed:.0f} s")
    assert ok


def test_4_policy_ordering(report):
    sc = Scenario()
    est = TailEstimator(sc.fading, method="mc", trials=TRIALS, seed=1, L=sc.faps)
    start = time.perf_counter()
    table = {}
    for s in SOURCES:
        table[s] = {p: max_heterogeneity(s, 0.98, p, sc, est, 12) for p in POLICIES}
    elapsed = time.perf_counter() - start
    ordered = all(t["joint"] >= t["opt-K"] and t["joint"] >= t["opt-xi"]
                  and min(t["opt-K"], t["opt-xi"], t["joint"]) >= t["baseline"]
                  for t in table.values())
    strict = any(t["joint"] > t["baseline"] for t in table.values())
    ok = ordered and strict and elapsed < 1800
    detail = "; ".join(f"{s}: " + "/".join(str(t[p]) for p in POLICIES) for s, t in table.items())
    report(4, ok, f"max_U baseline/opt-K/opt-xi/joint {detail}; {elapsed:.0f} s")
    assert ok


def test_5_complexity_formula(report):
    radio = Radio(total_bandwidth=200e3, subcarrier_spacing=100e3, coherence_bandwidth=150e3)
    sc = Scenario(radio=radio, ues=5, faps=4, baseline_k=3, mode="paper-faithful")
    b = resource_bounds(sc.ues, sc.faps, sc.radio)
    k1, k2 = b.k_min, b.k_max
    bws = {per_ue_bandwidth(k, sc.ues, radio.total_bandwidth, radio.subcarrier_spacing)[2]
           for k in range(k1, k2 + 1)}
    profile = heterogeneity_profile("S1", 2, sc)
    xi_max = build_profile_plan(profile, k1, k1, sc).xi_max
    r = joint_optimize(profile, sc, TailEstimator(sc.fading, method="analytic", L=sc.faps))
    formula = (xi_max + 1) * (k2 - k1 + 1) - 0.5 * (k2 + k1) * (k2 - k1 + 1)
    ok = len(bws) == 1 and r.visited == formula
    report(5, ok, f"K in [{k1}, {k2}], B = {bws}, xi_max = {xi_max}: visited {r.visited}, "
                  f"formula {formula:g}")
    assert ok


def test_6_queue_consistency(report):
    start = time.perf_counter()
    frame = 1e-4
    eb = eb_poisson(500, 10e-3, 1e-2, 1, frame, "verbatim").eb
    rate = eb / frame
    v0 = queueing_oracle(500, rate, 10e-3, TRIALS, seed=1)
    rates = [rate * f for f in (1.0, 1.05, 1.1, 1.2, 1.4)]
    vs = [queueing_oracle(500, r, 10e-3, TRIALS, seed=2).violation for r in rates]
    elapsed = time.perf_counter() - start
    mono = all(b <= a for a, b in zip(vs, vs[1:]))
    ok = 0 < v0.violation <= 0.05 and mono and elapsed < 60
    report(6, ok, f"EB = {eb:.5f} pkt/frame ({rate:.1f} pkt/s): violation {v0.violation:.4f} "
                  f"+- {v0.ci_halfwidth:.4f}; over 5 rates {[round(v, 4) for v in vs]}; "
                  f"{elapsed:.1f} s")
    assert ok


def test_7_constraint_arithmetic(report):
    r = Radio()
    n = subchannel_bounds(r.total_bandwidth, r.coherence_bandwidth, r.subcarrier_spacing)
    k = cluster_bounds(1000, 15, *n)
    b3 = per_ue_bandwidth(3, 1000, r.total_bandwidth, r.subcarrier_spacing)[2]
    b6 = per_ue_bandwidth(6, 1000, r.total_bandwidth, r.subcarrier_spacing)[2]
    plan = build_plan(6, 44, 1000, r, slot_structure([(0.5e-3, 30.0)], r))
    flags = feasibility(plan, resource_bounds(1000, 15, r), r, 15, "strict")
    ok = (n == (300, 10000) and k == (1, 4) and b3 == 435e3 and b6 == 885e3
          and any(f.startswith("B = 885 kHz > B_C") for f in flags))
    report(7, ok, f"(N_I, N_II) = {n}, (K_I, K_II) = {k}, B(3) = {b3:g}, B(6) = {b6:g}, "
                  f"strict K = 6 flags: {flags}")
    assert ok


def test_8_special_functions(report):
    import math

    def series(x):
        return math.fsum((-1) ** m * (x / 2) ** (2 * m) / math.factorial(m) ** 2
                         for m in range(80))
    j_err = max(abs(bessel_j0(x) - series(x)) for x in np.linspace(0, 10, 2001))
    q_err = max(abs(inverse_q(q_function(x)) - x) for x in np.linspace(-6, 6, 1201))
    g = upper_reg_gamma(3, 3.6)
    ok = j_err < 1e-9 and q_err < 1e-9 and abs(g - 0.302747) < 1e-5
    report(8, ok, f"J0 max err {j_err:.1e}; Q round trip max err {q_err:.1e}; "
                  f"Q(3, 3.6) = {g:.6f}")
    assert ok


def _sweep(cfg, *flags):
    r = subprocess.run([sys.executable, "-m", "aerial_na", "sweep-u", cfg, "--u-max", "6",
                        "--no-cache", *flags], capture_output=True, check=True)
    return r.stdout


def test_9_determinism(report, tmp_path):
    cfg = tmp_path / "scenario.ini"
    cfg.write_text("")
    cfg = str(cfg)
    mc = ("--estimator", "mc", "--trials", str(TRIALS))
    a = _sweep(cfg, "--seed", "1", *mc)
    b = _sweep(cfg, "--seed", "1", *mc)
    c = _sweep(cfg, "--seed", "2", *mc)
    an1 = _sweep(cfg, "--seed", "1", "--estimator", "analytic")
    an2 = _sweep(cfg, "--seed", "2", "--estimator", "analytic")
    ra = list(csv.DictReader(io.StringIO(a.decode())))
    rc = list(csv.DictReader(io.StringIO(c.decode())))
    changed = sum(x["na_value"] != y["na_value"] for x, y in zip(ra, rc))
    within = all(abs(float(x["na_value"]) - float(y["na_value"]))
                 <= float(x["ci"]) + float(y["ci"]) for x, y in zip(ra, rc))
    ok = a == b and within and changed > 0 and an1 == an2
    report(9, ok, f"same seed byte-identical={a == b}; seed change moved {changed}/{len(ra)} "
                  f"MC rows, all within CI={within}; analytic identical={an1 == an2}")
    assert ok
