"""Worst-case geometry, path loss, Doppler quantities and fading samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .numerics import RngStream, bessel_j0, sample_complex_normal

CSI_MODES = ("mmse-orthogonal", "literal-subtraction", "perfect")


def dbm_to_watt(dbm: float) -> float:
    return 10 ** (dbm / 10) / 1e3


@dataclass(frozen=True)
class Geometry:
    disaster_radius: float = 3000.0
    flight_radius: float = 500.0
    fap_altitude: float = 200.0
    aue_min_altitude: float = 100.0
    aue_max_altitude: float = 400.0

    def __post_init__(self):
        for name in ("disaster_radius", "flight_radius", "fap_altitude",
                     "aue_min_altitude", "aue_max_altitude"):
            if getattr(self, name) < 0:
                raise ConfigError("must be nonnegative", key=name)
        if self.aue_min_altitude > self.aue_max_altitude:
            raise ConfigError("aue_min_altitude exceeds aue_max_altitude", key="aue_min_altitude")


@dataclass(frozen=True)
class Radio:
    carrier: float = 2e9
    light_speed: float = 3e8
    total_bandwidth: float = 150e6
    subcarrier_spacing: float = 15e3
    coherence_bandwidth: float = 0.5e6
    noise_psd: float = dbm_to_watt(-174.0)  # W/Hz
    tx_power: float = dbm_to_watt(5.0)  # W
    fronthaul_loss: float = 0.5
    blocklength_loss: float = 1.5
    sampling_time: float = 66.66e-6
    frame: float = 1e-4
    frame_ctrl: float = 0.05e-3

    def __post_init__(self):
        if not (0 < self.subcarrier_spacing <= self.coherence_bandwidth <= self.total_bandwidth):
            raise ConfigError("need subcarrier_spacing <= coherence_bandwidth <= total_bandwidth",
                              key="coherence_bandwidth")
        if not (0 < self.fronthaul_loss < 1):
            raise ConfigError("fronthaul_loss must lie in (0,1)", key="fronthaul_loss")
        if not self.blocklength_loss > 1:
            raise ConfigError("blocklength_loss must exceed 1", key="blocklength_loss")
        if not (0 < self.frame_ctrl < self.frame):
            raise ConfigError("frame_ctrl must lie in (0, frame)", key="frame_ctrl")
        for name in ("carrier", "light_speed", "noise_psd", "tx_power", "sampling_time"):
            if not getattr(self, name) > 0:
                raise ConfigError("must be positive", key=name)

    @property
    def wavelength(self) -> float:
        return self.light_speed / self.carrier


@dataclass(frozen=True)
class FadingSpec:
    """kappa-mu shadowed parameters; ``m = inf`` disables shadowing."""

    kappa: float = 0.0
    mu: int = 3
    m: float = math.inf

    def __post_init__(self):
        if self.kappa < 0:
            raise ConfigError("kappa must be nonnegative", key="kappa")
        if int(self.mu) != self.mu or self.mu < 1:
            raise ConfigError("mu must be a positive integer", key="mu")
        if not self.m > 0:
            raise ConfigError("m must be positive (inf allowed)", key="m")

    @property
    def is_nakagami(self) -> bool:
        return self.kappa == 0 and math.isinf(self.m)


@dataclass(frozen=True)
class WorstCase:
    d_horizontal: float
    h_vertical: float
    distance: float
    path_loss: float


def path_loss(d: float, radio: Radio) -> float:
    """Free-space loss A d^-2 with A = (lambda / 4 pi)^2."""
    if d < 1:
        raise DomainError(f"path loss model needs d >= 1 m, got {d}")
    a = (radio.wavelength / (4 * math.pi)) ** 2
    return a / (d * d)


def worst_case(geometry: Geometry, radio: Radio) -> WorstCase:
    dh = 2 * geometry.disaster_radius + 2 * geometry.flight_radius
    h = max(geometry.fap_altitude,
            abs(geometry.fap_altitude - geometry.aue_min_altitude),
            abs(geometry.fap_altitude - geometry.aue_max_altitude))
    d = math.hypot(dh, h)
    return WorstCase(dh, h, d, path_loss(d, radio))


def coherence_time(v_r: float, radio: Radio) -> float:
    if not v_r > 0:
        raise DomainError(f"relative velocity must be positive, got {v_r}")
    return 9 * radio.light_speed / (16 * math.pi * radio.carrier * v_r)


def doppler(v_r: float, radio: Radio) -> float:
    return v_r * radio.carrier / radio.light_speed


def temporal_correlation(v_r: float, radio: Radio) -> float:
    """Jakes correlation J0(2 pi f_D t_s) between adjacent channel samples."""
    if v_r < 0:
        raise DomainError("relative velocity must be nonnegative")
    return bessel_j0(2 * math.pi * doppler(v_r, radio) * radio.sampling_time)


def sample_fading_power(spec: FadingSpec, stream: RngStream, count: int) -> np.ndarray:
    """Unit-mean kappa-mu shadowed power samples.

    Conditional on the shadowing variable the power is a scaled noncentral
    chi-square with 2 mu degrees of freedom.
    """
    g = stream.generator
    mu = int(spec.mu)
    if math.isinf(spec.m):
        shadow = np.ones(count)
    else:
        shadow = g.gamma(spec.m, 1.0 / spec.m, count)
    if spec.kappa == 0:
        chi = g.chisquare(2 * mu, count)
    else:
        chi = g.noncentral_chisquare(2 * mu, 2 * mu * spec.kappa * shadow, count)
    return chi / (2 * mu * (1 + spec.kappa))


def estimation_error_variance(rho_p: float, beta_tilde: float) -> float:
    if rho_p < 0:
        raise DomainError("pilot SNR must be nonnegative")
    x = rho_p * beta_tilde
    if math.isinf(x):
        return 0.0
    return 1.0 / (x + 1.0)


def _check_csi(csi_mode: str):
    if csi_mode not in CSI_MODES:
        raise ConfigError(f"unknown csi mode '{csi_mode}', expected one of {CSI_MODES}", key="csi")


def sample_estimated_fading_power(spec: FadingSpec, sigma_w2: float, csi_mode: str,
                                  stream: RngStream, count: int) -> np.ndarray:
    """|psi_hat|^2 samples under the chosen estimation-error reading.

    ``mmse-orthogonal`` scales an independent fading draw by 1 - sigma_w2;
    ``literal-subtraction`` forms |psi - w|^2 with w ~ CN(0, sigma_w2)
    independent of psi.
    """
    _check_csi(csi_mode)
    if not 0 <= sigma_w2 <= 1:
        raise DomainError("sigma_w2 must lie in [0, 1]")
    power = sample_fading_power(spec, stream, count)
    if csi_mode == "perfect" or sigma_w2 == 0:
        return power
    if csi_mode == "mmse-orthogonal":
        return (1 - sigma_w2) * power
    phase = stream.generator.uniform(0, 2 * math.pi, count)
    psi = np.sqrt(power) * np.exp(1j * phase)
    w = sample_complex_normal(stream, sigma_w2, count)
    return np.abs(psi - w) ** 2


def evolve_ar1(prev, e_c: float, stream: RngStream, variance: float = 1.0):
    """One step of g = e_c g_prev + sqrt(1 - e_c^2) e_unc."""
    if abs(e_c) > 1:
        raise DomainError("|e_c| must not exceed 1")
    prev = np.asarray(prev, dtype=complex)
    innov = sample_complex_normal(stream, variance, prev.shape)
    out = e_c * prev + math.sqrt(1 - e_c * e_c) * innov
    return out[()] if out.ndim == 0 else out


def sample_cluster_components(spec: FadingSpec, stream: RngStream, shape):
    """Complex per-cluster representation of kappa-mu shadowed fading.

    Returns ``(scatter, dominant)`` with trailing axis of length mu such that
    ``sum(|scatter + dominant|^2, axis=-1)`` has the distribution produced by
    :func:`sample_fading_power`. ``scatter`` is circular Gaussian with
    per-component variance 1 / (mu (1 + kappa)), which makes it the part an
    AR(1) recursion can evolve without changing the marginal.
    """
    mu = int(spec.mu)
    shape = tuple(np.atleast_1d(shape))
    var = 1.0 / (mu * (1 + spec.kappa))
    scatter = sample_complex_normal(stream, var, shape + (mu,))
    if spec.kappa == 0:
        return scatter, np.zeros(shape + (mu,), dtype=complex)
    g = stream.generator
    shadow = np.ones(shape) if math.isinf(spec.m) else g.gamma(spec.m, 1.0 / spec.m, shape)
    amp = np.sqrt(spec.kappa * shadow / (mu * (1 + spec.kappa)))[..., None]
    phase = g.uniform(0, 2 * math.pi, shape + (mu,))
    return scatter, amp * np.exp(1j * phase)
