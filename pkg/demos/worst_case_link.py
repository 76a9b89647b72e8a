"""
Worst-case link budget and SNR thresholds
=========================================

Walks one allocation (K = 6 FAPs per UE, xi = 44 pilot symbols) through the
pipeline: geometry, per-UE bandwidth, SNR lower bound, effective bandwidth
and the SNR each service class needs.
"""

import math

from aerial_na.availability import build_profile_plan, composition_thresholds, snr_model
from aerial_na.optimizer import heterogeneity_profile
from aerial_na.scenario import Scenario

sc = Scenario()
w = sc.worst
print(f"worst-case distance {w.distance:.1f} m, large-scale gain {w.path_loss:.3e}")

# MS composition plus the first two S4 compositions
profile = heterogeneity_profile("S4", 3, sc)
plan = build_profile_plan(profile, 6, 44, sc)
print(f"K = 6: N = {plan.N} groups, B = {plan.bandwidth / 1e3:g} kHz, xi_max = {plan.xi_max}")

m = snr_model(6, 44, plan, sc.radio, w, sc.faps)
print(f"rho = {10 * math.log10(m.rho):.1f} dB, pilot-error variance {m.sigma_w2:.3f}, "
      f"diversity order {m.diversity_order}")
print(f"mean SNR over {m.diversity_order} FAPs: "
      f"{10 * math.log10(m.gain * m.diversity_order * (1 - m.sigma_w2)):.1f} dB")

for t in composition_thresholds(profile, plan, sc):
    kind = "quasi-static" if t.quasi_static else f"{t.blocks} coherence intervals"
    print(f"  {t.tag} D = {t.delay * 1e3:5.1f} ms, v = {t.velocity:4.0f} m/s: "
          f"EB {t.eb:.4f} pkt/slot, gamma_th {10 * math.log10(t.gamma_th):.2f} dB ({kind})")
