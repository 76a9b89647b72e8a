"""
Joint (K, xi) optimization against single-variable policies
===========================================================

S4 heterogeneity, target NA 0.98. The joint search visits every
(K, xi) with K <= xi <= xi_max(K); opt-K keeps the control part at 0.05 ms
and opt-xi keeps K = 6. Takes about 20 s with the analytic tails.
"""

import csv
import io

from aerial_na.harness import default_config, emit_svg, run_policy_comparison

cfg = default_config()
text = run_policy_comparison(cfg, "S4", 0.98, 12)

best = {}
for row in csv.DictReader(io.StringIO(text)):
    best[row["policy"]] = row["max_U"]
    print(f"{row['policy']:>8} U={row['U']:>2} K={row['K']:>2} xi={row['xi']:>3} "
          f"NA={float(row['na_value']):.6f}")
print("max U at eta = 0.98:", best)

with open("policy_comparison.svg", "w") as fh:
    fh.write(emit_svg(text, "compare"))
