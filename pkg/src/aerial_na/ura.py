"""Unified resource allocation arithmetic: subchannels, clusters, pilots, slots."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

from .channel import Radio, coherence_time
from .errors import ConfigError, InfeasibleError

FEASIBILITY_MODES = ("strict", "paper-faithful", "relaxed")

# Relative slack when snapping float ratios onto integer grids
# (0.5e-3 / 1e-4 evaluates to 4.999999999999999).
_GRID_EPS = 1e-9


def _floor(x: float) -> int:
    return math.floor(x + _GRID_EPS * max(1.0, abs(x)))


def _ceil(x: float) -> int:
    return math.ceil(x - _GRID_EPS * max(1.0, abs(x)))


@dataclass(frozen=True)
class ResourceBounds:
    n_min: int
    n_max: int
    k_min: int
    k_max: int


@dataclass(frozen=True)
class SlotStructure:
    slot: float  # T_S
    frames_per_slot: int  # N_f
    slots_per_coherence: dict = field(default_factory=dict)  # v_r -> N_s
    coherence_blocks: tuple = ()  # N_C per composition, in profile order


@dataclass(frozen=True)
class ResourcePlan:
    K: int
    xi: int
    N: int
    N0: int
    bandwidth: float
    xi_max: int
    slot: SlotStructure

    def data_uses(self, frame: float) -> float:
        return self.bandwidth * self.slot.frames_per_slot * frame - self.xi


def subchannel_bounds(total_bandwidth: float, coherence_bandwidth: float,
                      subcarrier_spacing: float) -> tuple[int, int]:
    if not (0 < subcarrier_spacing <= coherence_bandwidth <= total_bandwidth):
        raise ConfigError("need B_0 <= B_C <= B_tot", key="coherence_bandwidth")
    return (_floor(total_bandwidth / coherence_bandwidth),
            _floor(total_bandwidth / subcarrier_spacing))


def cluster_bounds(M: int, L: int, n_min: int, n_max: int) -> tuple[int, int]:
    if M < 1 or L < 1:
        raise ConfigError("need at least one UE and one FAP", key="ues")
    k_min = max(1, math.ceil(M / n_max))
    k_max = min(L, math.ceil(M / n_min))
    if k_min > k_max:
        raise InfeasibleError(
            f"no admissible cluster count: K_I = {k_min} > K_II = {k_max} "
            f"(M = {M}, L = {L}, N in [{n_min}, {n_max}])")
    return k_min, k_max


def resource_bounds(M: int, L: int, radio: Radio) -> ResourceBounds:
    n_min, n_max = subchannel_bounds(radio.total_bandwidth, radio.coherence_bandwidth,
                                     radio.subcarrier_spacing)
    k_min, k_max = cluster_bounds(M, L, n_min, n_max)
    return ResourceBounds(n_min, n_max, k_min, k_max)


def per_ue_bandwidth(K: int, M: int, total_bandwidth: float,
                     subcarrier_spacing: float) -> tuple[int, int, float]:
    """Returns ``(N, N_0, B)`` for K UEs per group."""
    if not 1 <= K <= M:
        raise InfeasibleError(f"K = {K} outside [1, M = {M}]")
    N = math.ceil(M / K)
    N0 = _floor(total_bandwidth / (subcarrier_spacing * N))
    if N0 < 1:
        raise InfeasibleError(f"{N} subchannels do not fit in the band (N_0 = {N0})")
    return N, N0, N0 * subcarrier_spacing


def _to_grid(duration: float, frame: float, what: str) -> int:
    units = _floor(duration / frame)
    if units < 1:
        raise ConfigError(f"{what} = {duration:g} s is shorter than one frame ({frame:g} s)")
    return units


def slot_structure(compositions, radio: Radio) -> SlotStructure:
    """Slot length as the gcd of delay bounds and coherence times on the TTI grid.

    ``compositions`` is a sequence of ``(delay_bound, v_r)`` pairs. Coherence
    times are floored onto the frame grid before taking the gcd, so the slot
    never exceeds any coherence time.
    """
    frame = radio.frame
    if not compositions:
        return SlotStructure(frame, 1, {}, ())
    units = []
    tc_units = {}
    for delay, v in compositions:
        units.append(_to_grid(delay, frame, "delay bound"))
        if v not in tc_units:
            tc_units[v] = _to_grid(coherence_time(v, radio), frame, "coherence time")
    g = reduce(math.gcd, units + list(tc_units.values()))
    slots_per_tc = {v: u // g for v, u in tc_units.items()}
    blocks = tuple(coherence_blocks(d, v, radio) for d, v in compositions)
    return SlotStructure(g * frame, g, slots_per_tc, blocks)


def coherence_blocks(delay: float, v_r: float, radio: Radio) -> int:
    if not delay > 0:
        raise ConfigError("delay bound must be positive")
    return max(1, _ceil(delay / coherence_time(v_r, radio)))


def pilot_bounds(K: int, bandwidth: float, frames_per_slot: int, frame: float) -> tuple[int, int]:
    """``(xi_min, xi_max)``; pilot lengths are whole channel uses."""
    xi_max = _floor(bandwidth * frames_per_slot * frame) - 1
    if K > xi_max:
        raise InfeasibleError(f"pilot length range empty: K = {K} > xi_max = {xi_max}")
    return K, xi_max


def fixed_pilot_length(bandwidth: float, frames_per_slot: int, frame_ctrl: float) -> int:
    """Pilot length implied by a fixed control-part duration, B N_f T_f^(c)."""
    return _floor(bandwidth * frames_per_slot * frame_ctrl)


def build_plan(K: int, xi: int, M: int, radio: Radio, slot: SlotStructure) -> ResourcePlan:
    """Derived quantities of a (K, xi) choice. Pilot bounds are not enforced here."""
    N, N0, B = per_ue_bandwidth(K, M, radio.total_bandwidth, radio.subcarrier_spacing)
    xi_max = _floor(B * slot.frames_per_slot * radio.frame) - 1
    return ResourcePlan(K, int(xi), N, N0, B, xi_max, slot)


def feasibility(plan: ResourcePlan, bounds: ResourceBounds, radio: Radio, L: int,
                mode: str) -> list[str]:
    """Every violated constraint for ``plan``, as readable strings.

    ``paper-faithful`` checks the closed-form bounds on N, K and xi; ``strict``
    additionally checks B(K) <= B_C. ``relaxed`` reports the same list as
    ``strict``; callers decide what to enforce.
    """
    if mode not in FEASIBILITY_MODES:
        raise ConfigError(f"unknown feasibility mode '{mode}'", key="mode")
    out = []
    K, xi = plan.K, plan.xi
    if plan.N < bounds.n_min:
        out.append(f"N = {plan.N} < N_I = {bounds.n_min}")
    if plan.N > bounds.n_max:
        out.append(f"N = {plan.N} > N_II = {bounds.n_max}")
    if K < bounds.k_min:
        out.append(f"K = {K} < K_I = {bounds.k_min}")
    if K > bounds.k_max:
        out.append(f"K = {K} > K_II = {bounds.k_max}")
    if K > L:
        out.append(f"K = {K} > L = {L}")
    if xi < K:
        out.append(f"xi = {xi} < K = {K}")
    if xi > plan.xi_max:
        out.append(f"xi = {xi} > xi_max = {plan.xi_max}")
    if mode != "paper-faithful" and plan.bandwidth > radio.coherence_bandwidth:
        out.append(f"B = {plan.bandwidth / 1e3:g} kHz > B_C = {radio.coherence_bandwidth / 1e3:g} kHz")
    return out


def hard_violations(plan: ResourcePlan, L: int) -> list[str]:
    """Constraints without which the SNR model itself is undefined."""
    out = []
    if plan.K > L:
        out.append(f"K = {plan.K} > L = {L}")
    if plan.xi < plan.K:
        out.append(f"xi = {plan.xi} < K = {plan.K}")
    if plan.xi > plan.xi_max:
        out.append(f"xi = {plan.xi} > xi_max = {plan.xi_max}")
    return out


def k_range(bounds: ResourceBounds, L: int, radio: Radio, M: int, mode: str) -> range | list:
    """Cluster counts the optimizers search under a feasibility mode."""
    if mode == "relaxed":
        return range(bounds.k_min, L + 1)
    ks = range(bounds.k_min, bounds.k_max + 1)
    if mode == "strict":
        return [k for k in ks
                if per_ue_bandwidth(k, M, radio.total_bandwidth, radio.subcarrier_spacing)[2]
                <= radio.coherence_bandwidth]
    return ks
