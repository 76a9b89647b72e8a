"""
Cross-checks of the estimator
=============================

1. Monte Carlo tails against the incomplete-gamma closed form.
2. A FCFS queue served at the effective-bandwidth rate.
3. The product-form U_II factor against a correlated-fading trajectory.
"""

import sys

from aerial_na.harness import default_config
from aerial_na.harness.experiments import oracle_queue, oracle_tail, oracle_trajectory

cfg = default_config().with_overrides({("estimator", "trials"): 200_000})

sys.stdout.write(oracle_tail(cfg, "S4", 4))
print()
sys.stdout.write(oracle_queue(cfg))
print()
# AR(1) fading with Jakes correlation from one coherence interval to the next
sys.stdout.write(oracle_trajectory(cfg, "S4", 3, trials=10_000))
