"""Pydantic schemas for experiment configuration."""

from .experiment import (
    ExperimentConfig,
    ScheduleSection,
    DisorderSection,
    BoseSection,
)

__all__ = [
    "ExperimentConfig",
    "ScheduleSection",
    "DisorderSection",
    "BoseSection",
]
