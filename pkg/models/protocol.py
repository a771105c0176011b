"""Valve protocol models: gates, schedules, strategies and run traces."""

from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from services.exceptions import InvalidInputError


@dataclass(frozen=True)
class GreedyArrival:
    """Each interval maximizes the amplitude arriving at the chain end."""
    grid: int = 2000

    @property
    def name(self) -> str:
        return "greedy"


@dataclass(frozen=True)
class FixedInterval:
    """Every interval has the same length `tau`."""
    tau: float

    def __post_init__(self):
        if not (np.isfinite(self.tau) and self.tau > 0.0):
            raise InvalidInputError(f"fixed interval must be a positive time, got {self.tau}")

    @property
    def name(self) -> str:
        return f"fixed({self.tau!r})"


ScheduleStrategy = Union[GreedyArrival, FixedInterval]


@dataclass(frozen=True, eq=False)
class ValveGate:
    """
    Two-qubit valve between chain site N and the target.

    `block` acts on the coordinate pair (target amplitude, site-N amplitude),
    i.e. on the span of |01> and |10> in the canonical basis; |00> and |11>
    are left alone.
    """
    block: np.ndarray
    arrival: complex
    f_prev: float
    f_next: float

    def __post_init__(self):
        block = np.array(self.block, dtype=complex, copy=True)
        block.setflags(write=False)
        object.__setattr__(self, "block", block)
        object.__setattr__(self, "arrival", complex(self.arrival))


@dataclass(frozen=True, eq=False)
class ValveStep:
    """Free evolution for `interval`, then `gate`."""
    interval: float
    gate: ValveGate


@dataclass(frozen=True, eq=False)
class ValveSchedule:
    """Gate sequence designed on the ideal chain."""
    n_sites: int
    steps: Tuple[ValveStep, ...] = ()
    strategy_name: str = "greedy"

    @property
    def design_fidelities(self) -> Tuple[float, ...]:
        return tuple(step.gate.f_next for step in self.steps)

    @property
    def intervals(self) -> Tuple[float, ...]:
        return tuple(step.interval for step in self.steps)

    @property
    def total_time(self) -> float:
        return float(sum(self.intervals))

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True, eq=False)
class PhiState:
    """Unnormalized chain state left behind after k valve steps."""
    amplitudes: np.ndarray
    step: int = 0

    @classmethod
    def initial(cls, n_sites: int) -> "PhiState":
        amplitudes = np.zeros(n_sites, dtype=complex)
        amplitudes[0] = 1.0
        return cls(amplitudes=amplitudes, step=0)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def fidelity(self) -> float:
        """F_0^k = 1 - <phi_k|phi_k>."""
        return 1.0 - self.norm_squared


@dataclass(frozen=True, eq=False)
class RunTrace:
    """Target population after each gate of one protocol run."""
    fidelities: np.ndarray
    final_state: np.ndarray
    norms: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def n_steps(self) -> int:
        return int(self.fidelities.size)

    @property
    def best(self) -> float:
        return float(self.fidelities.max()) if self.fidelities.size else 0.0
