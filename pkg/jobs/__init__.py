"""Experiment jobs for the valve-protocol simulator."""

from .experiment_jobs import run_experiment, EXPERIMENTS

__all__ = [
    "run_experiment",
    "EXPERIMENTS",
]
