"""Exhaustive (K, xi) search, single-variable policies and max-heterogeneity scans."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .availability import (HeterogeneityProfile, Composition, NaEstimate, TailEstimator,
                           build_profile_plan, na_lower_bound)
from .errors import ConfigError, InfeasibleError
from .scenario import Scenario
from .ura import fixed_pilot_length, k_range, resource_bounds

log = logging.getLogger(__name__)

POLICIES = ("baseline", "opt-K", "opt-xi", "joint")

# delay bound (ms), relative velocity (m/s) of the LS compositions
SOURCES = {
    "S1": ("55:5:105", "30"),
    "S2": ("55", "30:-2:10"),
    "S3": ("55:5:105", "30:-2:10"),
    "S4": ("55:-5:5", "30:2:50"),
}


def parse_range(text: str) -> list[float]:
    """MATLAB-style ``start:step:end`` (inclusive) or a single value."""
    parts = [float(p) for p in str(text).split(":")]
    if len(parts) == 1:
        return parts
    if len(parts) != 3 or parts[1] == 0:
        raise ConfigError(f"bad range '{text}', expected start:step:end")
    start, step, end = parts
    n = int(np.floor((end - start) / step + 1e-9)) + 1
    if n < 1:
        raise ConfigError(f"empty range '{text}'")
    return [start + i * step for i in range(n)]


def source_entries(source, custom=None) -> list[tuple[float, float]]:
    """``(delay_s, v_r)`` pairs of a heterogeneity source, in listed order.

    Scalar columns are broadcast against the ranged one.
    """
    if source in SOURCES:
        d_text, v_text = SOURCES[source]
    elif source == "custom" and custom is not None:
        d_text, v_text = custom
    else:
        raise ConfigError(f"unknown heterogeneity source '{source}'", key="source")
    ds, vs = parse_range(d_text), parse_range(v_text)
    n = max(len(ds), len(vs))
    if len(ds) == 1:
        ds = ds * n
    if len(vs) == 1:
        vs = vs * n
    if len(ds) != len(vs):
        raise ConfigError(f"delay and velocity ranges of '{source}' differ in length")
    return [(d * 1e-3, v) for d, v in zip(ds, vs)]


def heterogeneity_profile(source, U: int, scenario: Scenario, custom=None) -> HeterogeneityProfile:
    """MS composition first, then the first U - 1 LS compositions of the source."""
    if U < 1:
        raise ConfigError("U must be at least 1")
    entries = source_entries(source, custom)
    if U - 1 > len(entries):
        raise ConfigError(f"source {source} provides at most U = {len(entries) + 1}")
    comps = [Composition(scenario.ms, scenario.ms_velocity)]
    comps += [Composition(scenario.ls.with_delay(d), v) for d, v in entries[:U - 1]]
    return HeterogeneityProfile(tuple(comps))


def max_u(source, custom=None) -> int:
    return len(source_entries(source, custom)) + 1


@dataclass(frozen=True)
class PolicyResult:
    policy: str
    K_star: int | None
    xi_star: int | None
    na_value: float
    visited: int
    estimate: NaEstimate | None = None
    expected_visits: float | None = None

    @property
    def feasible(self) -> bool:
        return self.K_star is not None


def _better(a: NaEstimate, b: NaEstimate | None) -> bool:
    # strict improvement only: enumeration runs K then xi ascending, so ties keep
    # the smaller K, then the smaller xi
    return b is None or a.value > b.value


def _search(profile, scenario, estimator, pairs, policy) -> PolicyResult:
    best = None
    visited = 0
    for K, xi in pairs:
        est = na_lower_bound(profile, K, xi, scenario, estimator)
        visited += 1
        if est.feasible and _better(est, best):
            best = est
    if best is None:
        return PolicyResult(policy, None, None, 0.0, visited)
    return PolicyResult(policy, best.K, best.xi, best.value, visited, best)


def _xi_max(profile, K, scenario) -> int | None:
    try:
        return build_profile_plan(profile, K, K, scenario).xi_max
    except InfeasibleError:
        return None


def _fixed_xi(profile, K, scenario) -> int | None:
    try:
        plan = build_profile_plan(profile, K, K, scenario)
    except InfeasibleError:
        return None
    return fixed_pilot_length(plan.bandwidth, plan.slot.frames_per_slot, scenario.radio.frame_ctrl)


def search_ks(scenario: Scenario) -> list[int]:
    bounds = resource_bounds(scenario.ues, scenario.faps, scenario.radio)
    return list(k_range(bounds, scenario.faps, scenario.radio, scenario.ues, scenario.mode))


def complexity_formula(k_min: int, k_max: int, xi_max: int) -> float:
    n_k = k_max - k_min + 1
    return (xi_max + 1) * n_k - 0.5 * (k_max + k_min) * n_k


def joint_optimize(profile: HeterogeneityProfile, scenario: Scenario,
                   estimator: TailEstimator, ks=None) -> PolicyResult:
    """Exhaustive search over K in the mode's range and xi in [K, xi_max(K)]."""
    ks = search_ks(scenario) if ks is None else list(ks)
    if not ks:
        raise InfeasibleError("empty cluster-count range")
    pairs = []
    xi_maxes = []
    for K in ks:
        xm = _xi_max(profile, K, scenario)
        if xm is None:
            continue
        xi_maxes.append(xm)
        pairs.extend((K, xi) for xi in range(K, xm + 1))
    res = _search(profile, scenario, estimator, pairs, "joint")
    expected = None
    if xi_maxes and len(set(xi_maxes)) == 1 and len(xi_maxes) == len(ks):
        expected = complexity_formula(ks[0], ks[-1], xi_maxes[0])
    else:
        log.info("xi_max varies with K; counted %d evaluations (no closed form)", res.visited)
    return PolicyResult(res.policy, res.K_star, res.xi_star, res.na_value, res.visited,
                        res.estimate, expected)


def optimize_k_only(profile, scenario, estimator, ks=None) -> PolicyResult:
    """Sweep K; the pilot length follows the fixed control duration, B(K) N_f T_f^(c)."""
    ks = search_ks(scenario) if ks is None else list(ks)
    pairs = []
    for K in ks:
        xi = _fixed_xi(profile, K, scenario)
        if xi is not None:
            pairs.append((K, xi))
    return _search(profile, scenario, estimator, pairs, "opt-K")


def optimize_xi_only(profile, scenario, estimator, K=None) -> PolicyResult:
    K = scenario.baseline_k if K is None else K
    xm = _xi_max(profile, K, scenario)
    pairs = [] if xm is None else [(K, xi) for xi in range(K, xm + 1)]
    return _search(profile, scenario, estimator, pairs, "opt-xi")


def evaluate_baseline(profile, scenario, estimator, K=None) -> PolicyResult:
    K = scenario.baseline_k if K is None else K
    xi = _fixed_xi(profile, K, scenario)
    if xi is None:
        return PolicyResult("baseline", None, None, 0.0, 0)
    est = na_lower_bound(profile, K, xi, scenario, estimator)
    if not est.feasible:
        return PolicyResult("baseline", None, None, 0.0, 1, est)
    return PolicyResult("baseline", K, xi, est.value, 1, est)


def run_policy(policy: str, profile, scenario, estimator) -> PolicyResult:
    if policy == "baseline":
        return evaluate_baseline(profile, scenario, estimator)
    if policy == "opt-K":
        return optimize_k_only(profile, scenario, estimator)
    if policy == "opt-xi":
        return optimize_xi_only(profile, scenario, estimator)
    if policy == "joint":
        return joint_optimize(profile, scenario, estimator)
    raise ConfigError(f"unknown policy '{policy}', expected one of {POLICIES}", key="policy")


def policy_curve(source, policy, scenario, estimator, U_limit, custom=None) -> list[PolicyResult]:
    return [run_policy(policy, heterogeneity_profile(source, U, scenario, custom), scenario,
                       estimator)
            for U in range(1, U_limit + 1)]


def max_heterogeneity(source, eta_target: float, policy: str, scenario: Scenario,
                      estimator: TailEstimator, U_limit: int, custom=None,
                      curve: list[PolicyResult] | None = None) -> int:
    """Largest U whose NA lower bound reaches ``eta_target`` (0 if none).

    Every U up to the limit is evaluated; a non-monotone curve is logged
    rather than assumed away.
    """
    if not 0 < eta_target <= 1:
        raise ConfigError("eta target must lie in (0, 1]", key="eta")
    if curve is None:
        curve = policy_curve(source, policy, scenario, estimator, U_limit, custom)
    values = [r.na_value for r in curve]
    if any(b > a for a, b in zip(values, values[1:])):
        log.warning("%s/%s: NA not monotone in U: %s", source, policy, values)
    best = 0
    for U, v in enumerate(values, start=1):
        if v >= eta_target:
            best = U
    return best
