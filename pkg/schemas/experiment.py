"""Pydantic schemas for experiment configuration files."""

import re
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationInfo, field_validator

from models.chain import ChainSpec
from models.ensemble import DisorderKind, DisorderModel
from models.protocol import FixedInterval, GreedyArrival, ScheduleStrategy

ExperimentName = Literal["fig4", "fig5", "bose", "design"]
DisorderName = Literal["uniform", "gaussian", "onsite"]

FIXED_PATTERN = re.compile(r"^fixed\(\s*([^)]+?)\s*\)$")
RANGE_PATTERN = re.compile(r"^([^:]+):([^:]+):([^:]+)$")


def _float_list(value) -> List[float]:
    if isinstance(value, str):
        return [float(part) for part in value.split(",") if part.strip()]
    return [float(v) for v in value]


class ScheduleSection(BaseModel):
    """Schedule design parameters."""

    strategy: str = "greedy"
    max_steps: int = Field(default=20, ge=1)
    t_max: Optional[float] = Field(default=None, gt=0)
    grid: int = Field(default=2000, ge=2)
    path: Optional[str] = None

    class Config:
        extra = "forbid"

    @field_validator("strategy")
    @classmethod
    def check_strategy(cls, value: str) -> str:
        value = value.strip().lower()
        if value == "greedy":
            return value
        match = FIXED_PATTERN.match(value)
        if match is None:
            raise ValueError("expected 'greedy' or 'fixed(<tau>)'")
        tau = float(match.group(1))
        if not (np.isfinite(tau) and tau > 0):
            raise ValueError("fixed interval must be a positive time")
        return f"fixed({tau!r})"

    def to_strategy(self) -> ScheduleStrategy:
        match = FIXED_PATTERN.match(self.strategy)
        if match is not None:
            return FixedInterval(tau=float(match.group(1)))
        return GreedyArrival(grid=self.grid)


class DisorderSection(BaseModel):
    """Disorder model and strengths."""

    model: DisorderName = "uniform"
    strengths: List[float] = Field(default_factory=lambda: [0.0])

    class Config:
        extra = "forbid"

    @field_validator("strengths", mode="before")
    @classmethod
    def parse_strengths(cls, value):
        """Comma list, or an inclusive start:step:stop range."""
        if isinstance(value, str):
            match = RANGE_PATTERN.match(value.strip())
            if match is not None:
                start, step, stop = (float(g) for g in match.groups())
                if step <= 0:
                    raise ValueError("range step must be positive")
                count = int(np.floor((stop - start) / step + 1e-9)) + 1
                if count < 1:
                    raise ValueError("empty range")
                return [round(start + i * step, 12) for i in range(count)]
            return _float_list(value)
        return value

    @field_validator("strengths")
    @classmethod
    def check_strengths(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("at least one strength is required")
        if any(not np.isfinite(v) or v < 0 for v in value):
            raise ValueError("strengths must be finite and >= 0")
        return value

    def kind(self) -> DisorderKind:
        return DisorderKind(self.model)

    def models(self) -> List[DisorderModel]:
        return [DisorderModel(kind=self.kind(), strength=s) for s in self.strengths]


class BoseSection(BaseModel):
    """Unassisted transfer search parameters."""

    t_max: Optional[float] = Field(default=None, gt=0)
    grid: int = Field(default=2000, ge=2)
    points: int = Field(default=400, ge=2)

    class Config:
        extra = "forbid"


class ExperimentConfig(BaseModel):
    """One experiment run."""

    experiment: ExperimentName = "fig4"
    n_sites: int = Field(default=20, ge=2)
    coupling_profile: Optional[List[float]] = None  # None = uniform
    onsite_profile: Optional[List[float]] = None  # None = zero
    schedule: ScheduleSection = Field(default_factory=ScheduleSection)
    disorder: DisorderSection = Field(default_factory=DisorderSection)
    bose: BoseSection = Field(default_factory=BoseSection)
    samples: int = Field(default=100, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    output_path: Optional[str] = None

    class Config:
        extra = "forbid"

    @field_validator("coupling_profile", mode="before")
    @classmethod
    def parse_couplings(cls, value):
        if isinstance(value, str):
            if value.strip().lower() == "uniform":
                return None
            return _float_list(value)
        return value

    @field_validator("onsite_profile", mode="before")
    @classmethod
    def parse_onsite(cls, value):
        if isinstance(value, str):
            if value.strip().lower() == "zero":
                return None
            return _float_list(value)
        return value

    @field_validator("coupling_profile")
    @classmethod
    def check_couplings(cls, value: Optional[List[float]], info: ValidationInfo):
        if value is None:
            return value
        n_sites = info.data.get("n_sites")
        if n_sites is not None and len(value) != n_sites - 1:
            raise ValueError(f"expected {n_sites - 1} couplings, got {len(value)}")
        if any(not np.isfinite(v) or v <= 0 for v in value):
            raise ValueError("couplings must be finite and strictly positive")
        return value

    @field_validator("onsite_profile")
    @classmethod
    def check_onsite(cls, value: Optional[List[float]], info: ValidationInfo):
        if value is None:
            return value
        n_sites = info.data.get("n_sites")
        if n_sites is not None and len(value) != n_sites:
            raise ValueError(f"expected {n_sites} on-site energies, got {len(value)}")
        if any(not np.isfinite(v) for v in value):
            raise ValueError("on-site energies must be finite")
        return value

    def chain_spec(self) -> ChainSpec:
        return ChainSpec.build(self.n_sites, couplings=self.coupling_profile, onsite=self.onsite_profile)

    def schedule_t_max(self) -> float:
        return self.schedule.t_max if self.schedule.t_max is not None else 2.0 * self.n_sites

    def bose_t_max(self) -> float:
        return self.bose.t_max if self.bose.t_max is not None else 2.0 * self.n_sites
