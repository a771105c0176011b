"""Experiment jobs: fig4, fig5, bose and design."""

from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd
import structlog

from config import settings
from jobs.artifacts import write_csv, write_text
from models.chain import ChainSpec
from models.ensemble import DisorderModel
from models.protocol import ValveSchedule
from schemas.experiment import ExperimentConfig
from services.chain_service import bloch_average_fidelity, max_bose_fidelity, transfer_curve
from services.disorder_service import (
    disorder_lab,
    find_crossover,
    linear_fit_residuals,
    saturation_step,
)
from services.exceptions import ArtifactIOError, InvalidInputError, ValveSimError
from services.experiment_config import config_fingerprint
from services.schedule_codec import read_schedule, schedule_summary, write_schedule
from services.valve_service import design_schedule

logger = structlog.get_logger()

# Range over which the valve curve is expected to fall off linearly.
LINEAR_RANGE = 0.3


def _comments(config: ExperimentConfig, **extra) -> Dict[str, object]:
    comments: Dict[str, object] = {
        "experiment": config.experiment,
        "seed": config.seed,
        "config_sha256": config_fingerprint(config),
    }
    comments.update(extra)
    return comments


def _strengths_with_zero(config: ExperimentConfig) -> List[float]:
    """Configured strengths plus the ideal reference, ascending."""
    return sorted(set(config.disorder.strengths) | {0.0})


def _output_path(config: ExperimentConfig, output_dir: Optional[Path], default_name: str) -> Path:
    base = output_dir if output_dir is not None else Path(settings.output_dir)
    if config.output_path:
        path = Path(config.output_path)
        return path if path.is_absolute() else base / path
    return base / default_name


def obtain_schedule(config: ExperimentConfig, spec: ChainSpec) -> ValveSchedule:
    """Replay `schedule.path` when given, else design on the ideal chain."""
    if config.schedule.path:
        try:
            text = Path(config.schedule.path).read_text()
        except OSError as e:
            raise ArtifactIOError(f"cannot read schedule {config.schedule.path}: {e}") from e
        schedule = read_schedule(text)
        if schedule.n_sites != spec.n_sites:
            raise InvalidInputError(
                f"schedule {config.schedule.path} is for N={schedule.n_sites}, config has N={spec.n_sites}"
            )
        logger.info("Replaying schedule file", path=config.schedule.path, steps=len(schedule))
        return ValveSchedule(
            n_sites=schedule.n_sites,
            steps=schedule.steps[: config.schedule.max_steps],
            strategy_name=schedule.strategy_name,
        )
    return design_schedule(
        spec,
        config.schedule.to_strategy(),
        config.schedule.max_steps,
        config.schedule_t_max(),
    )


def run_fig4(config: ExperimentConfig, output_dir: Optional[Path] = None) -> List[Path]:
    """Per-step mean and std of the target population for each strength."""
    spec = config.chain_spec()
    schedule = obtain_schedule(config, spec)
    kind = config.disorder.kind()

    frames = []
    for strength in _strengths_with_zero(config):
        summary = disorder_lab.monte_carlo(
            spec, schedule, DisorderModel(kind=kind, strength=strength), config.samples, config.seed
        )
        logger.info(
            "Fig4 curve computed",
            strength=strength,
            final_mean=float(summary.per_step_mean[-1]) if len(schedule) else None,
            saturation_step=saturation_step(summary.per_step_mean, summary.per_step_std),
        )
        frames.append(
            pd.DataFrame(
                {
                    "delta": strength,
                    "k": np.arange(1, len(schedule) + 1),
                    "mean_F": summary.per_step_mean,
                    "std_F": summary.per_step_std,
                }
            )
        )

    frame = pd.concat(frames, ignore_index=True)
    path = _output_path(config, output_dir, "fig4.csv")
    return [write_csv(path, frame, _comments(config, model=config.disorder.model, std="population"))]


def run_fig5(config: ExperimentConfig, output_dir: Optional[Path] = None) -> List[Path]:
    """Best fidelity within the schedule versus strength, against the unassisted chain."""
    spec = config.chain_spec()
    schedule = obtain_schedule(config, spec)
    t_star, f_star = max_bose_fidelity(spec, None, config.bose_t_max(), config.bose.grid)

    sweep = disorder_lab.sweep_delta(
        spec,
        schedule,
        DisorderModel(kind=config.disorder.kind(), strength=0.0),
        _strengths_with_zero(config),
        config.samples,
        config.seed,
        t_star,
    )

    crossover = find_crossover(sweep)
    if np.count_nonzero(sweep.deltas <= LINEAR_RANGE + 1e-12) >= 2:
        slope, _, residuals = linear_fit_residuals(sweep.deltas, sweep.valve_curve, LINEAR_RANGE)
        logger.info("Valve curve linear fit", slope=slope, max_residual=float(np.abs(residuals).max()))
    logger.info("Valve/Bose crossover", crossover=crossover, t_star=t_star, f_star=f_star)

    frame = pd.DataFrame(
        {
            "delta": sweep.deltas,
            "valve_mean_of_max": sweep.valve_curve,
            "valve_std": sweep.valve_std,
            "valve_max_of_mean": sweep.valve_max_of_mean,
            "bose_mean": sweep.bose_curve,
            "bose_std": sweep.bose_std,
        }
    )
    path = _output_path(config, output_dir, "fig5.csv")
    comments = _comments(
        config,
        model=config.disorder.model,
        std="population",
        t_star=f"{t_star:.12g}",
        f_star=f"{f_star:.12g}",
    )
    return [write_csv(path, frame, comments)]


def run_bose(config: ExperimentConfig, output_dir: Optional[Path] = None) -> List[Path]:
    """F_0(t) of the ideal chain, plus its optimum."""
    spec = config.chain_spec()
    t_max = config.bose_t_max()
    times = np.linspace(0.0, t_max, config.bose.points)
    curve = transfer_curve(spec, None, times)
    t_star, f_star = max_bose_fidelity(spec, None, t_max, config.bose.grid)
    logger.info("Bose optimum", t_star=t_star, fidelity=f_star)

    path = _output_path(config, output_dir, "bose.csv")
    comments = _comments(config, t_star=f"{t_star:.12g}", f_star=f"{f_star:.12g}")
    curve_path = write_csv(path, pd.DataFrame({"t": times, "fidelity": curve}), comments)

    optimum = pd.DataFrame(
        {
            "t_star": [t_star],
            "fidelity": [f_star],
            "average_fidelity": [bloch_average_fidelity(np.sqrt(f_star))],
        }
    )
    optimum_path = write_csv(path.with_name(f"{path.stem}_optimum.csv"), optimum, comments)
    return [curve_path, optimum_path]


def run_design(config: ExperimentConfig, output_dir: Optional[Path] = None) -> List[Path]:
    """Design a schedule on the ideal chain and write the schedule file."""
    spec = config.chain_spec()
    schedule = design_schedule(
        spec,
        config.schedule.to_strategy(),
        config.schedule.max_steps,
        config.schedule_t_max(),
    )
    steps, fidelity = schedule_summary(schedule)
    logger.info("Schedule ready", steps=steps, design_fidelity=fidelity)
    path = _output_path(config, output_dir, "schedule.txt")
    return [write_text(path, write_schedule(schedule))]


EXPERIMENTS: Dict[str, Callable[[ExperimentConfig, Optional[Path]], List[Path]]] = {
    "fig4": run_fig4,
    "fig5": run_fig5,
    "bose": run_bose,
    "design": run_design,
}


def run_experiment(config: ExperimentConfig, output_dir: Optional[Path] = None) -> List[Path]:
    """Run the configured experiment; returns the written artifact paths."""
    logger.info(
        "Starting experiment",
        experiment=config.experiment,
        n_sites=config.n_sites,
        seed=config.seed,
        fingerprint=config_fingerprint(config)[:12],
    )
    try:
        paths = EXPERIMENTS[config.experiment](config, output_dir)
    except ValveSimError as e:
        logger.error("Experiment failed", experiment=config.experiment, error=str(e))
        raise
    logger.info("Experiment completed", experiment=config.experiment, artifacts=[str(p) for p in paths])
    return paths
