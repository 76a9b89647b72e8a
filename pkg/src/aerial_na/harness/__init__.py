"""Scenario files, experiments, result cache and SVG output."""

from .cache import cached, digest
from .config import ScenarioConfig, default_config, load_scenario, parse_text, serialize
from .experiments import (COMPARE_COLUMNS, SWEEP_COLUMNS, run_policy_comparison, run_sweep_u)
from .svg import emit_svg

__all__ = ["ScenarioConfig", "default_config", "load_scenario", "parse_text", "serialize",
           "run_sweep_u", "run_policy_comparison", "SWEEP_COLUMNS", "COMPARE_COLUMNS",
           "emit_svg", "cached", "digest"]
