"""Post-processing SNR model, SNR thresholds and the NA lower bound."""

from __future__ import annotations

import math
import warnings
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import channel
from .channel import CSI_MODES, FadingSpec, Radio, WorstCase, coherence_time
from .errors import ConfigError, DomainError, InfeasibleError
from .numerics import RngStream, inverse_q, sample_complex_normal, upper_reg_gamma, wilson_halfwidth
from .scenario import Scenario
from .traffic import EBResult, QosSplit, ServiceClass, eb_poisson, qos_split
from .ura import (ResourcePlan, build_plan, feasibility, hard_violations, resource_bounds,
                  slot_structure)

ESTIMATOR_METHODS = ("auto", "analytic", "mc")
_LN2 = math.log(2.0)
_TAIL_STREAM = 1
_TRAJECTORY_STREAM = 2


@dataclass(frozen=True)
class SnrModel:
    rho: float
    rho_p: float
    rho_hat: float
    beta_tilde: float
    diversity_order: int
    sigma_w2: float

    @property
    def gain(self) -> float:
        """rho_hat * beta_tilde: the SNR per unit of summed fading power."""
        return self.rho_hat * self.beta_tilde


def snr_model(K: int, xi: float, plan: ResourcePlan, radio: Radio, worst: WorstCase,
              L: int) -> SnrModel:
    if K > L:
        raise InfeasibleError(f"K = {K} exceeds the number of FAPs L = {L}; no diversity left")
    if not xi > 0:
        raise InfeasibleError("pilot length must be positive")
    rho = radio.fronthaul_loss * radio.tx_power / (plan.bandwidth * radio.noise_psd)
    rho_p = rho * xi
    return SnrModel(rho, rho_p, rho / (K / xi + 1), worst.path_loss, L - K + 1,
                    channel.estimation_error_variance(rho_p, worst.path_loss))


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def _data_uses(plan: ResourcePlan, radio: Radio) -> float:
    data = plan.bandwidth * plan.slot.frames_per_slot * radio.frame - plan.xi
    if not data > 0:
        raise InfeasibleError(f"pilot length xi = {plan.xi} leaves no data resources")
    return data


def gamma_th_ls(cls: ServiceClass, plan: ResourcePlan, eb: EBResult, radio: Radio,
                exact: bool = False) -> float:
    """SNR threshold for a less stringent service.

    By default this is phi * exp(...) as printed; ``exact=True`` instead
    inverts the Shannon-rate expression, giving phi * (exp(...) - 1).
    """
    expo = cls.packet_bits * eb.eb * _LN2 / _data_uses(plan, radio)
    phi = radio.blocklength_loss
    if exact:
        return phi * (math.expm1(expo) if expo < 709 else math.inf)
    return phi * _safe_exp(expo)


def gamma_th_ms(cls: ServiceClass, split: QosSplit, plan: ResourcePlan, eb: EBResult,
                radio: Radio) -> float:
    """SNR threshold for a more stringent service, normal approximation with V = 1."""
    data = _data_uses(plan, radio)
    eps_uc = split.eps_decoding
    if not 0 < eps_uc < 1:
        raise DomainError("decoding error target must lie in (0, 1)")
    if eps_uc >= 0.5:
        warnings.warn("decoding error target >= 0.5 makes the dispersion correction negative",
                      stacklevel=2)
    blocklength = plan.bandwidth * (radio.frame - plan.xi / (plan.bandwidth * plan.slot.frames_per_slot))
    expo = cls.packet_bits * eb.eb * _LN2 / data + inverse_q(eps_uc) / math.sqrt(blocklength)
    return _safe_exp(expo) - 1.0


# --------------------------------------------------------------------------
# tail probabilities


class _FadingPool:
    """Common random numbers for tail estimates.

    Holds ``trials`` draws of the unit-mean fading power for each of ``L``
    FAPs, generated batch by batch from independent substreams. Sums over the
    first n FAPs are sorted once so that any threshold costs a binary search.
    """

    def __init__(self, fading: FadingSpec, csi_mode: str, seed: int, trials: int, L: int,
                 batch: int, workers: int):
        self.fading, self.csi_mode, self.seed = fading, csi_mode, seed
        self.trials, self.L, self.batch, self.workers = trials, L, batch, workers
        self._sorted: dict[int, np.ndarray] = {}
        self._cumsum = None
        self._literal: dict[tuple, np.ndarray] = {}

    def _batches(self):
        root = RngStream(self.seed, _TAIL_STREAM)
        sizes = [min(self.batch, self.trials - s) for s in range(0, self.trials, self.batch)]
        return [(root.substream(i), n) for i, n in enumerate(sizes)]

    def _map(self, fn):
        jobs = self._batches()
        if self.workers > 1:
            with ThreadPoolExecutor(self.workers) as ex:
                parts = list(ex.map(lambda j: fn(*j), jobs))
        else:
            parts = [fn(*j) for j in jobs]
        return np.concatenate(parts, axis=0)

    def _powers(self, stream, n):
        return channel.sample_fading_power(self.fading, stream, n * self.L).reshape(n, self.L)

    def sorted_sums(self, n: int) -> np.ndarray:
        if n not in self._sorted:
            if self._cumsum is None:
                self._cumsum = np.cumsum(self._map(self._powers), axis=1)
            self._sorted[n] = np.sort(self._cumsum[:, n - 1])
        return self._sorted[n]

    def literal_sums(self, n: int, sigma_w2: float) -> np.ndarray:
        key = (n, sigma_w2)
        if key not in self._literal:
            def draw(stream, size):
                p = self._powers(stream, size)[:, :n]
                phase = stream.generator.uniform(0, 2 * math.pi, p.shape)
                w = sample_complex_normal(stream, sigma_w2, p.shape)
                return np.sum(np.abs(np.sqrt(p) * np.exp(1j * phase) - w) ** 2, axis=1)
            if len(self._literal) > 8:
                self._literal.clear()
            self._literal[key] = np.sort(self._map(draw))
        return self._literal[key]


_POOLS: "OrderedDict[tuple, _FadingPool]" = OrderedDict()


def _pool(fading, csi_mode, seed, trials, L, batch, workers) -> _FadingPool:
    key = (fading, csi_mode, seed, trials, L, batch)
    if key not in _POOLS:
        _POOLS[key] = _FadingPool(fading, csi_mode, seed, trials, L, batch, workers)
        while len(_POOLS) > 2:
            _POOLS.popitem(last=False)
    _POOLS.move_to_end(key)
    return _POOLS[key]


@dataclass
class TailEstimator:
    """Evaluates P(gain * sum_{l<=n} |psi_hat_l|^2 >= gamma_th).

    ``method='analytic'`` uses the regularized incomplete gamma function
    (Nakagami fading with perfect or MMSE-orthogonal CSI, or Rayleigh with
    literal subtraction). ``'mc'`` counts exceedances in a shared pool of
    fading draws, so every (K, xi, threshold) sees the same random numbers.
    ``'auto'`` picks analytic whenever it applies.
    """

    fading: FadingSpec = field(default_factory=FadingSpec)
    csi_mode: str = "mmse-orthogonal"
    method: str = "auto"
    trials: int = 10**6
    seed: int = 0
    L: int = 15
    batch: int = 1 << 16
    memoize: bool = True
    workers: int = 1
    _memo: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.csi_mode not in CSI_MODES:
            raise ConfigError(f"csi mode must be one of {CSI_MODES}", key="csi")
        if self.method not in ESTIMATOR_METHODS:
            raise ConfigError(f"estimator must be one of {ESTIMATOR_METHODS}", key="method")
        if self.method == "analytic" and not self.analytic_available:
            raise ConfigError("no closed-form tail for this fading spec and CSI mode", key="method")
        if self.trials < 1:
            raise ConfigError("trials must be positive", key="trials")

    @property
    def analytic_available(self) -> bool:
        if not self.fading.is_nakagami:
            return False
        return self.csi_mode != "literal-subtraction" or self.fading.mu == 1

    @property
    def uses_mc(self) -> bool:
        return self.method == "mc" or (self.method == "auto" and not self.analytic_available)

    def _analytic(self, model: SnrModel, x: float) -> float:
        mu = self.fading.mu
        n = model.diversity_order
        s2 = model.sigma_w2
        if self.csi_mode == "perfect":
            scale = 1.0
        elif self.csi_mode == "mmse-orthogonal":
            scale = 1.0 - s2
        else:
            scale = 1.0 + s2
        return float(upper_reg_gamma(n * mu, mu * x / scale))

    def _mc_count(self, model: SnrModel, x: float) -> int:
        n = model.diversity_order
        if n > self.L:
            raise DomainError(f"diversity order {n} exceeds pool width L = {self.L}")
        pool = _pool(self.fading, self.csi_mode, self.seed, self.trials, self.L, self.batch,
                     self.workers)
        if self.csi_mode == "literal-subtraction" and model.sigma_w2 > 0:
            sums = pool.literal_sums(n, model.sigma_w2)
        else:
            sums = pool.sorted_sums(n)
            if self.csi_mode == "mmse-orthogonal":
                x = x / (1.0 - model.sigma_w2)
        return self.trials - int(np.searchsorted(sums, x, side="left"))

    def tail(self, model: SnrModel, gamma_th: float) -> tuple[float, float]:
        """``(probability, 95% half-width)``; the half-width is 0 on the analytic path."""
        if gamma_th <= 0:
            return 1.0, 0.0
        if math.isinf(gamma_th):
            return 0.0, 0.0
        x = gamma_th / model.gain
        key = (model.diversity_order, model.sigma_w2, x)
        if self.memoize and key in self._memo:
            return self._memo[key]
        if self.uses_mc:
            c = self._mc_count(model, x)
            out = (c / self.trials, wilson_halfwidth(c, self.trials))
        else:
            out = (self._analytic(model, x), 0.0)
        if self.memoize:
            self._memo[key] = out
        return out


def tail_probability(model: SnrModel, gamma_th: float, fading: FadingSpec, csi_mode: str,
                     trials: int, stream: RngStream) -> tuple[float, float]:
    """Plain Monte Carlo tail estimate from a dedicated stream (no pooling)."""
    n = model.diversity_order
    total = np.zeros(trials)
    for _ in range(n):
        total += channel.sample_estimated_fading_power(fading, model.sigma_w2, csi_mode,
                                                       stream, trials)
    c = int(np.count_nonzero(model.gain * total >= gamma_th))
    return c / trials, wilson_halfwidth(c, trials)


# --------------------------------------------------------------------------
# heterogeneity and the NA lower bound


@dataclass(frozen=True)
class Composition:
    service: ServiceClass
    velocity: float

    @property
    def delay(self) -> float:
        return self.service.delay_bound


@dataclass(frozen=True)
class HeterogeneityProfile:
    compositions: tuple = ()

    @property
    def U(self) -> int:
        return len(self.compositions)

    def quasi_static(self, radio: Radio) -> list[bool]:
        """Per composition, whether the delay bound fits in one coherence interval."""
        return [c.delay <= coherence_time(c.velocity, radio) for c in self.compositions]

    def partition(self, radio: Radio) -> tuple[list[int], list[int]]:
        qs = self.quasi_static(radio)
        return ([i for i, q in enumerate(qs) if q], [i for i, q in enumerate(qs) if not q])

    def pairs(self) -> list[tuple[float, float]]:
        return [(c.delay, c.velocity) for c in self.compositions]


@dataclass(frozen=True)
class Factor:
    kind: str  # "U_I" or "U_II"
    members: tuple
    gamma_th: float
    tail: float
    ci_halfwidth: float
    exponent: int


@dataclass(frozen=True)
class NaEstimate:
    value: float
    ci_halfwidth: float
    trials: int
    factors: tuple = ()
    K: int | None = None
    xi: int | None = None
    feasible: bool = True
    reason: str = ""
    violations: tuple = ()
    estimator: str = "analytic"

    def recompute(self) -> float:
        v = 1.0
        for f in self.factors:
            v *= f.tail ** f.exponent
        return v


@dataclass(frozen=True)
class CompositionThreshold:
    index: int
    tag: str
    delay: float
    velocity: float
    eb: float
    gamma_th: float
    blocks: int
    quasi_static: bool


def build_profile_plan(profile: HeterogeneityProfile, K: int, xi: int,
                       scenario: Scenario) -> ResourcePlan:
    slot = slot_structure(profile.pairs(), scenario.radio)
    return build_plan(K, xi, scenario.ues, scenario.radio, slot)


def composition_thresholds(profile: HeterogeneityProfile, plan: ResourcePlan,
                           scenario: Scenario) -> list[CompositionThreshold]:
    radio = scenario.radio
    n_f = plan.slot.frames_per_slot
    out = []
    for i, (comp, qs) in enumerate(zip(profile.compositions, profile.quasi_static(radio))):
        cls = comp.service
        split = qos_split(cls, radio.frame)
        eb = eb_poisson(cls.arrival_rate, split.queue_delay, split.eps_queue, n_f, radio.frame,
                        scenario.eb_unit)
        if cls.tag == "LS":
            g = gamma_th_ls(cls, plan, eb, radio, exact=scenario.ls_threshold == "exact")
        else:
            g = gamma_th_ms(cls, split, plan, eb, radio)
        out.append(CompositionThreshold(i, cls.tag, comp.delay, comp.velocity, eb.eb, g,
                                        plan.slot.coherence_blocks[i], qs))
    return out


def case_lower_bound(threshold: CompositionThreshold, model: SnrModel,
                     estimator: TailEstimator) -> float:
    """NA lower bound of a single composition.

    Quasi-static compositions need the threshold met once; otherwise it must
    be met in each of the N_C coherence intervals, which are identically
    distributed, so the single-interval tail is raised to N_C.
    """
    p, _ = estimator.tail(model, threshold.gamma_th)
    return p if threshold.quasi_static else p ** threshold.blocks


def _infeasible(K, xi, estimator, reason, violations=()) -> NaEstimate:
    return NaEstimate(0.0, 0.0, 0, (), K, xi, False, reason, tuple(violations),
                      "mc" if estimator.uses_mc else "analytic")


def na_lower_bound(profile: HeterogeneityProfile, K: int, xi: int, scenario: Scenario,
                   estimator: TailEstimator) -> NaEstimate:
    """Worst-case NA lower bound for a profile under the (K, xi) allocation.

    The quasi-static group contributes one probability at its largest
    threshold; every other composition contributes its own tail raised to
    its number of coherence intervals. Infeasible allocations come back
    with value 0 and a reason instead of raising.
    """
    method = "mc" if estimator.uses_mc else "analytic"
    if not profile.compositions:
        return NaEstimate(1.0, 0.0, 0, (), K, xi, True, "", (), method)
    radio = scenario.radio
    try:
        plan = build_profile_plan(profile, K, xi, scenario)
        bounds = resource_bounds(scenario.ues, scenario.faps, radio)
    except InfeasibleError as exc:
        return _infeasible(K, xi, estimator, str(exc))
    violations = feasibility(plan, bounds, radio, scenario.faps, scenario.mode)
    hard = hard_violations(plan, scenario.faps)
    if hard or (violations and scenario.mode != "relaxed"):
        return _infeasible(K, xi, estimator, "; ".join(hard or violations), violations)
    try:
        model = snr_model(K, xi, plan, radio, scenario.worst, scenario.faps)
        ths = composition_thresholds(profile, plan, scenario)
    except InfeasibleError as exc:
        return _infeasible(K, xi, estimator, str(exc), violations)

    factors = []
    static = [t for t in ths if t.quasi_static]
    if static:
        g = max(t.gamma_th for t in static)
        p, hw = estimator.tail(model, g)
        factors.append(Factor("U_I", tuple(t.index for t in static), g, p, hw, 1))
    for t in ths:
        if not t.quasi_static:
            p, hw = estimator.tail(model, t.gamma_th)
            factors.append(Factor("U_II", (t.index,), t.gamma_th, p, hw, t.blocks))

    value = 1.0
    upper = 1.0
    lower = 1.0
    for f in factors:
        value *= f.tail ** f.exponent
        upper *= min(1.0, f.tail + f.ci_halfwidth) ** f.exponent
        lower *= max(0.0, f.tail - f.ci_halfwidth) ** f.exponent
    ci = max(upper - value, value - lower)
    trials = estimator.trials if estimator.uses_mc else 0
    return NaEstimate(value, ci, trials, tuple(factors), K, xi, True, "", tuple(violations),
                      method)


# --------------------------------------------------------------------------
# correlated-trajectory check of the product form


def trajectory_oracle(model: SnrModel, gamma_th: float, blocks: int, e_c: float,
                      fading: FadingSpec, csi_mode: str, trials: int,
                      stream: RngStream) -> tuple[float, float]:
    """Probability that the SNR clears ``gamma_th`` in all ``blocks`` intervals.

    Each FAP's fading is carried as mu complex cluster components whose
    scattered parts evolve by AR(1) with coefficient ``e_c`` from one
    coherence interval to the next; dominant components and shadowing are
    held for the whole trajectory. With kappa = 0 and e_c = 0 the intervals
    are independent and the result reduces to tail ** blocks.
    """
    n = model.diversity_order
    mu = int(fading.mu)
    var = 1.0 / (mu * (1 + fading.kappa))
    scatter, dominant = channel.sample_cluster_components(fading, stream, (trials, n))
    phase = stream.generator.uniform(0, 2 * math.pi, (trials, n))
    ok = np.ones(trials, dtype=bool)
    for j in range(blocks):
        if j:
            scatter = channel.evolve_ar1(scatter, e_c, stream, var)
        power = np.sum(np.abs(scatter + dominant) ** 2, axis=-1)
        if csi_mode == "perfect":
            est = power
        elif csi_mode == "mmse-orthogonal":
            est = (1 - model.sigma_w2) * power
        else:
            w = sample_complex_normal(stream, model.sigma_w2, power.shape)
            est = np.abs(np.sqrt(power) * np.exp(1j * phase) - w) ** 2
        ok &= model.gain * est.sum(axis=1) >= gamma_th
    c = int(np.count_nonzero(ok))
    return c / trials, wilson_halfwidth(c, trials)
