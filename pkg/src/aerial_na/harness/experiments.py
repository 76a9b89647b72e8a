"""Figure reproduction and ad-hoc experiments, each returning CSV text."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import replace

from .. import channel
from ..availability import build_profile_plan, composition_thresholds, na_lower_bound, \
    snr_model, tail_probability, trajectory_oracle
from ..errors import ConfigError
from ..numerics import RngStream
from ..optimizer import POLICIES, heterogeneity_profile, max_heterogeneity, max_u, \
    policy_curve, run_policy
from ..traffic import eb_poisson, qos_split, queueing_oracle
from ..ura import fixed_pilot_length, slot_structure
from .config import ScenarioConfig

SWEEP_COLUMNS = ("source", "U", "K", "xi", "na_value", "ci", "n_factors", "estimator", "reason")
COMPARE_COLUMNS = ("policy", "U", "K", "xi", "na_value", "max_U", "eta_target")

# stream ids of the oracle subcommands; the fading pool owns stream 0
_TAIL_STREAM, _QUEUE_STREAM, _TRAJ_STREAM = 11, 12, 13


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ("inf" if value > 0 else "-inf")
    return str(value)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def _sources(source) -> list[str]:
    names = source.split(",") if isinstance(source, str) else list(source)
    return [s.strip() for s in names if s.strip()]


def _u_limit(cfg: ScenarioConfig, source, U_limit) -> int:
    n = cfg.u_max if U_limit is None else U_limit
    top = max_u(source, cfg.custom)
    if not 1 <= n <= top:
        raise ConfigError(f"U must lie in [1, {top}] for source {source}", key="u_max")
    return n


def _profile(cfg, source, U):
    return heterogeneity_profile(source, U, cfg.scenario, cfg.custom)


def sweep_rows(cfg: ScenarioConfig, source, policy="baseline", U_limit=None, estimator=None):
    if policy not in POLICIES:
        raise ConfigError(f"unknown policy '{policy}', expected one of {POLICIES}", key="policy")
    est = estimator or cfg.estimator.make(cfg.scenario)
    rows = []
    for src in _sources(source):
        n = _u_limit(cfg, src, U_limit)
        for U, r in enumerate(policy_curve(src, policy, cfg.scenario, est, n, cfg.custom), 1):
            e = r.estimate
            rows.append({
                "source": src, "U": U, "K": r.K_star, "xi": r.xi_star, "na_value": r.na_value,
                "ci": e.ci_halfwidth if e is not None and e.feasible else 0.0,
                "n_factors": len(e.factors) if e is not None else 0,
                "estimator": "mc" if est.uses_mc else "analytic",
                "reason": "" if r.feasible else (e.reason if e is not None else "no feasible allocation"),
            })
    return rows


def run_sweep_u(cfg: ScenarioConfig, source, policy="baseline", U_limit=None, estimator=None) -> str:
    """NA lower bound against U for each source under one policy."""
    return to_csv(SWEEP_COLUMNS, sweep_rows(cfg, source, policy, U_limit, estimator))


def comparison_rows(cfg: ScenarioConfig, source, eta_target=None, U_limit=None, policies=POLICIES,
                    estimator=None):
    """NA curve of each policy over U = 1..U_limit, tagged with its max_U at the target."""
    eta = cfg.eta if eta_target is None else eta_target
    est = estimator or cfg.estimator.make(cfg.scenario)
    n = _u_limit(cfg, source, U_limit)
    rows = []
    for policy in policies:
        if policy not in POLICIES:
            raise ConfigError(f"unknown policy '{policy}', expected one of {POLICIES}", key="policy")
        curve = policy_curve(source, policy, cfg.scenario, est, n, cfg.custom)
        top = max_heterogeneity(source, eta, policy, cfg.scenario, est, n, cfg.custom, curve)
        rows += [{"policy": policy, "U": U, "K": r.K_star, "xi": r.xi_star,
                  "na_value": r.na_value, "max_U": top, "eta_target": eta}
                 for U, r in enumerate(curve, start=1)]
    return rows


def run_policy_comparison(cfg: ScenarioConfig, source, eta_target=None, U_limit=None,
                          policies=POLICIES, estimator=None) -> str:
    return to_csv(COMPARE_COLUMNS,
                  comparison_rows(cfg, source, eta_target, U_limit, policies, estimator))


def optimize_table(cfg: ScenarioConfig, source, U, policies=POLICIES) -> str:
    est = cfg.estimator.make(cfg.scenario)
    profile = _profile(cfg, source, U)
    rows = []
    for policy in policies:
        r = run_policy(policy, profile, cfg.scenario, est)
        rows.append({"policy": policy, "K": r.K_star, "xi": r.xi_star, "na_value": r.na_value,
                     "visited": r.visited, "expected_visits": r.expected_visits})
    return to_csv(("policy", "K", "xi", "na_value", "visited", "expected_visits"), rows)


def eb_table(cfg: ScenarioConfig, tag: str, source=None, U=None) -> str:
    """Effective bandwidth of every composition of class ``tag`` in a profile."""
    if tag not in ("LS", "MS"):
        raise ConfigError(f"class tag must be LS or MS, got '{tag}'", key="class")
    src = source or cfg.source
    U = U or min(2, max_u(src, cfg.custom))
    profile = _profile(cfg, src, U)
    radio = cfg.scenario.radio
    slot = slot_structure(profile.pairs(), radio)
    rows = []
    for i, comp in enumerate(profile.compositions):
        cls = comp.service
        if cls.tag != tag:
            continue
        split = qos_split(cls, radio.frame)
        eb = eb_poisson(cls.arrival_rate, split.queue_delay, split.eps_queue,
                        slot.frames_per_slot, radio.frame, cfg.scenario.eb_unit)
        rows.append({"index": i, "tag": tag, "delay_bound": cls.delay_bound,
                     "queue_delay": split.queue_delay, "eps_queue": split.eps_queue,
                     "frames_per_slot": slot.frames_per_slot, "eb": eb.eb,
                     "theta_exp": eb.theta_exp, "unit": cfg.scenario.eb_unit})
    return to_csv(("index", "tag", "delay_bound", "queue_delay", "eps_queue", "frames_per_slot",
                   "eb", "theta_exp", "unit"), rows)


def thresholds_table(cfg: ScenarioConfig, K: int, xi: int, source=None, U=None) -> str:
    src = source or cfg.source
    U = U or cfg.u_max
    profile = _profile(cfg, src, U)
    plan = build_profile_plan(profile, K, xi, cfg.scenario)
    rows = [{"index": t.index, "tag": t.tag, "delay": t.delay, "velocity": t.velocity,
             "eb": t.eb, "gamma_th": t.gamma_th, "blocks": t.blocks,
             "quasi_static": int(t.quasi_static)}
            for t in composition_thresholds(profile, plan, cfg.scenario)]
    return to_csv(("index", "tag", "delay", "velocity", "eb", "gamma_th", "blocks",
                   "quasi_static"), rows)


def na_table(cfg: ScenarioConfig, source, U, K, xi):
    """Per-factor breakdown followed by the product row; also returns the estimate."""
    est = cfg.estimator.make(cfg.scenario)
    e = na_lower_bound(_profile(cfg, source, U), K, xi, cfg.scenario, est)
    base = {"source": source, "U": U, "K": K, "xi": xi}
    rows = [dict(base, part=f.kind, members=" ".join(map(str, f.members)), gamma_th=f.gamma_th,
                 value=f.tail, ci=f.ci_halfwidth, exponent=f.exponent, reason="")
            for f in e.factors]
    rows.append(dict(base, part="NA", members="", gamma_th=None, value=e.value,
                     ci=e.ci_halfwidth, exponent=1, reason=e.reason))
    cols = ("source", "U", "K", "xi", "part", "members", "gamma_th", "value", "ci", "exponent",
            "reason")
    return to_csv(cols, rows), e


def _baseline_allocation(cfg, profile):
    radio = cfg.scenario.radio
    K = cfg.scenario.baseline_k
    plan = build_profile_plan(profile, K, 1, cfg.scenario)
    xi = fixed_pilot_length(plan.bandwidth, plan.slot.frames_per_slot, radio.frame_ctrl)
    return K, xi


def oracle_tail(cfg: ScenarioConfig, source=None, U=None, K=None, xi=None) -> str:
    """Plain (unpooled) Monte Carlo tails against the closed form at each threshold."""
    src = source or cfg.source
    profile = _profile(cfg, src, U or cfg.u_max)
    if K is None or xi is None:
        K, xi = _baseline_allocation(cfg, profile)
    sc = cfg.scenario
    plan = build_profile_plan(profile, K, xi, sc)
    model = snr_model(K, xi, plan, sc.radio, sc.worst, sc.faps)
    closed = cfg.estimator.make(sc)
    analytic = replace(cfg.estimator, method="analytic").make(sc) \
        if closed.analytic_available else None
    stream = RngStream(cfg.estimator.seed, _TAIL_STREAM)
    rows = []
    for t in composition_thresholds(profile, plan, sc):
        p, hw = tail_probability(model, t.gamma_th, sc.fading, cfg.estimator.csi,
                                 cfg.estimator.trials, stream.substream(t.index))
        ref = analytic.tail(model, t.gamma_th)[0] if analytic is not None else None
        rows.append({"index": t.index, "x": t.gamma_th / model.gain, "analytic": ref, "mc": p,
                     "ci": hw, "within_4ci": "" if ref is None else int(abs(p - ref) <= 4 * hw)})
    return to_csv(("index", "x", "analytic", "mc", "ci", "within_4ci"), rows)


def oracle_queue(cfg: ScenarioConfig, n_arrivals=None) -> str:
    """Simulated delay-violation probability when served at the EB rate.

    The single-slot (N_f = 1) effective bandwidth is converted to a rate in
    packets per second before it drives the queue.
    """
    radio = cfg.scenario.radio
    n = n_arrivals or cfg.estimator.trials
    rows = []
    for i, cls in enumerate((cfg.scenario.ms, cfg.scenario.ls)):
        split = qos_split(cls, radio.frame)
        eb = eb_poisson(cls.arrival_rate, split.queue_delay, split.eps_queue, 1, radio.frame,
                        cfg.scenario.eb_unit)
        rate = eb.eb if cfg.scenario.eb_unit == "si-literal" else eb.eb / radio.frame
        q = queueing_oracle(cls.arrival_rate, rate, split.queue_delay, n, cfg.estimator.seed,
                            _QUEUE_STREAM + i)
        rows.append({"tag": cls.tag, "arrival_rate": cls.arrival_rate, "service_rate": rate,
                     "queue_delay": split.queue_delay, "eps_queue": split.eps_queue,
                     "violation": q.violation, "ci": q.ci_halfwidth})
    return to_csv(("tag", "arrival_rate", "service_rate", "queue_delay", "eps_queue", "violation",
                   "ci"), rows)


def oracle_trajectory(cfg: ScenarioConfig, source=None, U=None, K=None, xi=None,
                      trials=None) -> str:
    """Product-form factor tail^N_C against a correlated-fading trajectory simulation."""
    src = source or cfg.source
    profile = _profile(cfg, src, U or cfg.u_max)
    if K is None or xi is None:
        K, xi = _baseline_allocation(cfg, profile)
    sc = cfg.scenario
    plan = build_profile_plan(profile, K, xi, sc)
    model = snr_model(K, xi, plan, sc.radio, sc.worst, sc.faps)
    est = cfg.estimator.make(sc)
    n = trials or min(cfg.estimator.trials, 20_000)
    stream = RngStream(cfg.estimator.seed, _TRAJ_STREAM)
    rows = []
    for t in composition_thresholds(profile, plan, sc):
        if t.quasi_static:
            continue
        p, _ = est.tail(model, t.gamma_th)
        e_c = channel.temporal_correlation(t.velocity, sc.radio)
        q, hw = trajectory_oracle(model, t.gamma_th, t.blocks, e_c, sc.fading,
                                  cfg.estimator.csi, n, stream.substream(t.index))
        product = p ** t.blocks
        rows.append({"index": t.index, "e_c": e_c, "blocks": t.blocks, "product": product,
                     "trajectory": q, "ci": hw, "gap": q - product})
    return to_csv(("index", "e_c", "blocks", "product", "trajectory", "ci", "gap"), rows)
