"""Scenario description shared by the evaluation and optimization layers."""

from __future__ import annotations

from dataclasses import dataclass, field

from .channel import FadingSpec, Geometry, Radio, WorstCase, worst_case
from .errors import ConfigError
from .traffic import EB_UNIT_MODES, ServiceClass
from .ura import FEASIBILITY_MODES

LS_THRESHOLD_MODES = ("verbatim", "exact")


def default_ms() -> ServiceClass:
    return ServiceClass("MS", 0.5e-3, 1e-5, 160, 20.0, 20.0, 0.5)


def default_ls() -> ServiceClass:
    return ServiceClass("LS", 55e-3, 1e-5, 1000, 500.0, 500.0, None)


@dataclass(frozen=True)
class Scenario:
    geometry: Geometry = field(default_factory=Geometry)
    radio: Radio = field(default_factory=Radio)
    fading: FadingSpec = field(default_factory=FadingSpec)
    ues: int = 1000
    faps: int = 15
    ms: ServiceClass = field(default_factory=default_ms)
    ls: ServiceClass = field(default_factory=default_ls)
    ms_velocity: float = 30.0
    baseline_k: int = 6
    mode: str = "relaxed"
    eb_unit: str = "verbatim"
    ls_threshold: str = "verbatim"

    def __post_init__(self):
        if self.ues < 1:
            raise ConfigError("need at least one UE", key="ues")
        if self.faps < 1:
            raise ConfigError("need at least one FAP", key="faps")
        if self.mode not in FEASIBILITY_MODES:
            raise ConfigError(f"mode must be one of {FEASIBILITY_MODES}", key="mode")
        if self.eb_unit not in EB_UNIT_MODES:
            raise ConfigError(f"eb_unit must be one of {EB_UNIT_MODES}", key="eb_unit")
        if self.ls_threshold not in LS_THRESHOLD_MODES:
            raise ConfigError(f"ls_threshold must be one of {LS_THRESHOLD_MODES}", key="ls_threshold")
        if self.ms.tag != "MS" or self.ls.tag != "LS":
            raise ConfigError("class templates must be tagged MS and LS", key="tag")
        if not self.ms_velocity > 0:
            raise ConfigError("ms_velocity must be positive", key="ms_velocity")
        if not 1 <= self.baseline_k <= self.faps:
            raise ConfigError("baseline_k must lie in [1, faps]", key="baseline_k")

    @property
    def worst(self) -> WorstCase:
        return worst_case(self.geometry, self.radio)

    def service(self, tag: str) -> ServiceClass:
        return {"MS": self.ms, "LS": self.ls}[tag]
