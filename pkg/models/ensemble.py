"""Disorder ensemble models."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from services.exceptions import InvalidInputError


class DisorderKind(Enum):
    """Supported quasi-static disorder distributions."""
    UNIFORM_COUPLING = "uniform"    # delta_n ~ U[-D, D]
    GAUSSIAN_COUPLING = "gaussian"  # delta_n ~ N(0, D^2)
    UNIFORM_ONSITE = "onsite"       # eps_n ~ U[-D, D]


@dataclass(frozen=True)
class DisorderModel:
    kind: DisorderKind
    strength: float

    def __post_init__(self):
        if not (np.isfinite(self.strength) and self.strength >= 0.0):
            raise InvalidInputError(f"disorder strength must be finite and >= 0, got {self.strength}")

    def with_strength(self, strength: float) -> "DisorderModel":
        return DisorderModel(kind=self.kind, strength=float(strength))


@dataclass(frozen=True, eq=False)
class McSummary:
    """Per-step and per-run statistics over an ensemble of disorder samples (population std)."""
    n_samples: int
    per_step_mean: np.ndarray
    per_step_std: np.ndarray
    mean_of_max: float
    std_of_max: float
    max_of_mean: float
    traces: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))


@dataclass(frozen=True, eq=False)
class BoseSummary:
    """Unassisted transfer statistics at a fixed pickup time."""
    t_star: float
    mean: float
    std: float
    samples: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass(frozen=True, eq=False)
class SweepResult:
    deltas: np.ndarray
    valve_curve: np.ndarray
    valve_std: np.ndarray
    valve_max_of_mean: np.ndarray
    bose_curve: np.ndarray
    bose_std: np.ndarray
    t_star: float
    summaries: Tuple[McSummary, ...] = ()
