"""QoS splitting, effective bandwidth and a FCFS queueing check."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .numerics import RngStream, sample_poisson_interarrivals, wilson_halfwidth

# verbatim:            closed form with time measured in frames (packets/slot)
# si-literal:          the same expression fed SI seconds
# per-slot-normalized: si-literal at N_f = 1, times T_S
EB_UNIT_MODES = ("verbatim", "per-slot-normalized", "si-literal")


@dataclass(frozen=True)
class ServiceClass:
    tag: str  # "LS" or "MS"
    delay_bound: float  # D_max, s
    eps_max: float
    packet_bits: float
    arrival_rate: float  # packets/s
    arrival_variance: float | None = None
    queue_share: float | None = None  # eps_q / eps_max for MS; None -> 1/2

    def __post_init__(self):
        if self.tag not in ("LS", "MS"):
            raise ConfigError(f"service tag must be LS or MS, got '{self.tag}'", key="tag")
        if not (0 < self.eps_max < 1):
            raise ConfigError("eps_max must lie in (0, 1)", key="eps_max")
        if not self.packet_bits >= 1:
            raise ConfigError("packet_bits must be at least 1", key="packet_bits")
        if not self.arrival_rate > 0:
            raise ConfigError("arrival_rate must be positive", key="arrival_rate")
        if not self.delay_bound > 0:
            raise ConfigError("delay_bound must be positive", key="delay_bound")
        if self.queue_share is not None and not (0 < self.queue_share < 1):
            raise ConfigError("queue_share must lie in (0, 1)", key="queue_share")

    def with_delay(self, delay_bound: float) -> "ServiceClass":
        return ServiceClass(self.tag, delay_bound, self.eps_max, self.packet_bits,
                            self.arrival_rate, self.arrival_variance, self.queue_share)


@dataclass(frozen=True)
class QosSplit:
    queue_delay: float  # D_max^q
    eps_queue: float
    eps_decoding: float


@dataclass(frozen=True)
class EBResult:
    eb: float
    theta_exp: float


def qos_split(cls: ServiceClass, frame: float) -> QosSplit:
    """One uplink transmission occupies one frame; the rest is queueing budget."""
    if cls.delay_bound <= frame * (1 + 1e-12):
        raise ConfigError(f"delay bound {cls.delay_bound:g} s does not exceed the frame "
                          f"duration {frame:g} s", key="delay_bound")
    dq = cls.delay_bound - frame
    if cls.tag == "LS":
        return QosSplit(dq, cls.eps_max, 0.0)
    share = 0.5 if cls.queue_share is None else cls.queue_share
    eps_q = cls.eps_max * share
    return QosSplit(dq, eps_q, cls.eps_max - eps_q)


def _closed_form(theta, dq, eps, n_f, frame):
    # N_f T_f ln(1/eps) / (D_q ln[T_f ln(1/eps) / (theta D_q) + 1])
    ln_e = math.log(1 / eps)
    return n_f * frame * ln_e / (dq * math.log1p(frame * ln_e / (theta * dq)))


def eb_poisson(theta: float, queue_delay: float, eps_q: float, frames_per_slot: int,
               frame: float, unit_mode: str = "verbatim") -> EBResult:
    """Effective bandwidth of Poisson arrivals under a queueing-delay target.

    In ``verbatim`` mode the closed form is evaluated with durations in
    frames and rates in packets per frame, which yields packets per slot and
    coincides with the log-MGF definition (see :func:`eb_generic_poisson`).
    ``si-literal`` feeds the same expression seconds and packets/s.
    """
    for name, v in (("theta", theta), ("queue_delay", queue_delay), ("frame", frame)):
        if not v > 0:
            raise DomainError(f"{name} must be positive")
    if not (0 < eps_q < 1):
        raise DomainError("eps_q must lie in (0, 1)")
    if frames_per_slot < 1:
        raise DomainError("frames_per_slot must be at least 1")
    slot = frames_per_slot * frame
    if unit_mode == "verbatim":
        eb = _closed_form(theta * frame, queue_delay / frame, eps_q, frames_per_slot, 1.0)
    elif unit_mode == "si-literal":
        eb = _closed_form(theta, queue_delay, eps_q, frames_per_slot, frame)
    elif unit_mode == "per-slot-normalized":
        eb = _closed_form(theta, queue_delay, eps_q, 1, frame) * slot
    else:
        raise ConfigError(f"unknown eb unit mode '{unit_mode}'", key="eb_unit")
    theta_exp = math.log(1 / eps_q) / (eb * queue_delay / slot)
    return EBResult(eb, theta_exp)


def eb_generic_poisson(theta_exp: float, arrival_rate: float) -> float:
    """Per-second EB of unit-size Poisson arrivals at QoS exponent ``theta_exp``."""
    if not theta_exp > 0:
        raise DomainError("QoS exponent must be positive")
    return arrival_rate * math.expm1(theta_exp) / theta_exp


@dataclass(frozen=True)
class QueueCheck:
    violation: float
    ci_halfwidth: float
    n_arrivals: int


def queueing_oracle(theta: float, service_rate: float, queue_delay: float,
                    n_arrivals: int = 10**6, seed: int = 0, stream_id: int = 0) -> QueueCheck:
    """Fraction of packets whose sojourn in a FCFS queue exceeds ``queue_delay``.

    Poisson arrivals at ``theta`` packets/s, deterministic service time
    1/service_rate. Waiting times follow the Lindley recursion, written as
    the random walk minus its running minimum. For a fixed seed the arrival
    sequence is shared across service rates.
    """
    if not service_rate > theta:
        raise DomainError(f"unstable queue: service rate {service_rate} <= arrival rate {theta}")
    gaps = sample_poisson_interarrivals(RngStream(seed, stream_id), theta, n_arrivals)
    s = 1.0 / service_rate
    # walk[n] = sum_{i<n} (s - gap_i); W_0 = 0 so the walk starts at zero
    walk = np.concatenate(([0.0], np.cumsum(s - gaps[1:])))
    wait = walk - np.minimum.accumulate(np.minimum(walk, 0.0))
    late = int(np.count_nonzero(wait + s > queue_delay))
    return QueueCheck(late / n_arrivals, wilson_halfwidth(late, n_arrivals), n_arrivals)
