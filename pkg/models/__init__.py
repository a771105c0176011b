"""Domain models for the valve-protocol simulator."""

from .chain import (
    ChainSpec,
    DisorderRealization,
    SingleExcMatrix,
    Spectrum,
    Propagator,
)
from .protocol import (
    GreedyArrival,
    FixedInterval,
    ScheduleStrategy,
    ValveGate,
    ValveStep,
    ValveSchedule,
    PhiState,
    RunTrace,
)
from .ensemble import (
    DisorderKind,
    DisorderModel,
    McSummary,
    BoseSummary,
    SweepResult,
)

__all__ = [
    "ChainSpec",
    "DisorderRealization",
    "SingleExcMatrix",
    "Spectrum",
    "Propagator",
    "GreedyArrival",
    "FixedInterval",
    "ScheduleStrategy",
    "ValveGate",
    "ValveStep",
    "ValveSchedule",
    "PhiState",
    "RunTrace",
    "DisorderKind",
    "DisorderModel",
    "McSummary",
    "BoseSummary",
    "SweepResult",
]
