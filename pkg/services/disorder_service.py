"""
Disorder lab
============
Quasi-static disorder sampling and Monte Carlo ensembles of protocol runs.

Per-sample random streams are split from the master seed with numpy's
SeedSequence: sample i draws from
    default_rng(SeedSequence(entropy=master_seed, spawn_key=(i,)))
so every sample's realization depends only on (master_seed, i), never on
execution order or on how many workers run the ensemble.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import structlog

from config import settings
from models.chain import ChainSpec, DisorderRealization
from models.ensemble import BoseSummary, DisorderKind, DisorderModel, McSummary, SweepResult
from models.protocol import ValveSchedule
from services.chain_service import propagator, spectrum_for, transfer_amplitude
from services.exceptions import InvalidInputError
from services.valve_service import run_composite

logger = structlog.get_logger()

RngStream = np.random.Generator

T = TypeVar("T")


# =============================================================================
# SECTION 1: RANDOM STREAMS AND SAMPLING
# =============================================================================

def stream_for(master_seed: int, index: int) -> RngStream:
    """Independent stream for sample `index`."""
    if master_seed < 0 or index < 0:
        raise InvalidInputError("seed and sample index must be non-negative")
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(index,)))


def sample_disorder(model: DisorderModel, spec: ChainSpec, stream: RngStream) -> DisorderRealization:
    """
    Draw one realization. Uniform and Gaussian coupling models draw N-1 values,
    the on-site model draws N values, whatever the strength.
    """
    n = spec.n_sites
    width = model.strength
    coupling_deltas = np.zeros(n - 1)
    onsite_deltas = np.zeros(n)

    if model.kind is DisorderKind.UNIFORM_COUPLING:
        coupling_deltas = stream.uniform(-width, width, size=n - 1)
    elif model.kind is DisorderKind.GAUSSIAN_COUPLING:
        coupling_deltas = width * stream.standard_normal(n - 1)
    elif model.kind is DisorderKind.UNIFORM_ONSITE:
        onsite_deltas = stream.uniform(-width, width, size=n)
    else:
        raise InvalidInputError(f"Unknown disorder model: {model.kind}")

    if width == 0.0:
        # Zero-width distributions give the ideal chain exactly.
        coupling_deltas = np.zeros(n - 1)
        onsite_deltas = np.zeros(n)
    return DisorderRealization(coupling_deltas=coupling_deltas, onsite_deltas=onsite_deltas)


# =============================================================================
# SECTION 2: STATISTICS
# =============================================================================

def population_stats(values: Sequence[float]) -> Tuple[float, float]:
    """
    Mean and population standard deviation.

    Sums are exactly rounded (math.fsum), so the result does not depend on the
    order of the values; a constant sample returns that value and a std of 0.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0, 0.0
    first = float(values[0])
    if np.all(values == first):
        return first, 0.0
    mean = math.fsum(values) / values.size
    variance = math.fsum((values - mean) ** 2) / values.size
    return mean, math.sqrt(variance)


def summarize_traces(traces: np.ndarray) -> McSummary:
    """Aggregate a (samples x steps) array of per-step fidelities."""
    n_samples, n_steps = traces.shape
    means = np.zeros(n_steps)
    stds = np.zeros(n_steps)
    for k in range(n_steps):
        means[k], stds[k] = population_stats(traces[:, k])

    if n_steps:
        mean_of_max, std_of_max = population_stats(traces.max(axis=1))
        max_of_mean = float(means.max())
    else:
        mean_of_max, std_of_max, max_of_mean = 0.0, 0.0, 0.0

    return McSummary(
        n_samples=n_samples,
        per_step_mean=np.clip(means, 0.0, 1.0),
        per_step_std=np.clip(stds, 0.0, 1.0),
        mean_of_max=min(max(mean_of_max, 0.0), 1.0),
        std_of_max=min(std_of_max, 1.0),
        max_of_mean=min(max(max_of_mean, 0.0), 1.0),
        traces=traces,
    )



# =============================================================================
# SECTION 3: ENSEMBLES
# =============================================================================

def bose_fidelity(spec: ChainSpec, real: Optional[DisorderRealization], t_star: float) -> float:
    """|<N|U(t*)|1>|^2 on the given chain."""
    u = propagator(spectrum_for(spec, real), t_star)
    return min(abs(transfer_amplitude(u)) ** 2, 1.0)


def _check_delta_grid(delta_grid: Sequence[float]) -> np.ndarray:
    deltas = np.asarray(delta_grid, dtype=float)
    if deltas.ndim != 1 or deltas.size == 0:
        raise InvalidInputError("delta grid must be a non-empty list")
    if np.any(~np.isfinite(deltas)) or np.any(deltas < 0.0):
        raise InvalidInputError("delta grid values must be finite and non-negative")
    if np.any(np.diff(deltas) <= 0.0):
        raise InvalidInputError("delta grid must be strictly ascending")
    return deltas


class DisorderLab:
    """Monte Carlo ensembles of valve and unassisted runs over seeded disorder."""

    def __init__(self, workers: Optional[int] = None):
        # None follows settings.workers at call time
        self.workers = workers

    def _map_samples(self, fn: Callable[[int], T], n_samples: int) -> List[T]:
        """fn(0), ..., fn(n_samples - 1) in index order."""
        workers = settings.workers if self.workers is None else self.workers
        if workers <= 1 or n_samples == 1:
            return [fn(i) for i in range(n_samples)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, range(n_samples)))

    def monte_carlo(
        self,
        spec: ChainSpec,
        schedule: ValveSchedule,
        model: DisorderModel,
        n_samples: int,
        master_seed: int,
    ) -> McSummary:
        """Run the fixed schedule on `n_samples` independent disorder realizations."""
        if n_samples < 1:
            raise InvalidInputError(f"n_samples must be >= 1, got {n_samples}")

        logger.info(
            "Starting Monte Carlo ensemble",
            model=model.kind.value,
            strength=model.strength,
            n_samples=n_samples,
            seed=master_seed,
        )

        def run_sample(index: int) -> np.ndarray:
            real = sample_disorder(model, spec, stream_for(master_seed, index))
            return run_composite(spec, real, schedule).fidelities

        traces = np.array(self._map_samples(run_sample, n_samples)).reshape(n_samples, len(schedule))
        summary = summarize_traces(traces)

        logger.info(
            "Monte Carlo ensemble completed",
            strength=model.strength,
            mean_of_max=summary.mean_of_max,
            std_of_max=summary.std_of_max,
        )
        return summary

    def bose_ensemble(
        self,
        spec: ChainSpec,
        model: DisorderModel,
        n_samples: int,
        master_seed: int,
        t_star: float,
    ) -> BoseSummary:
        """Unassisted transfer at fixed t_star over the same per-sample streams as `monte_carlo`."""
        if n_samples < 1:
            raise InvalidInputError(f"n_samples must be >= 1, got {n_samples}")

        def run_sample(index: int) -> float:
            real = sample_disorder(model, spec, stream_for(master_seed, index))
            return bose_fidelity(spec, real, t_star)

        samples = np.array(self._map_samples(run_sample, n_samples))
        mean, std = population_stats(samples)
        return BoseSummary(t_star=t_star, mean=min(max(mean, 0.0), 1.0), std=std, samples=samples)

    def sweep_delta(
        self,
        spec: ChainSpec,
        schedule: ValveSchedule,
        model: DisorderModel,
        delta_grid: Sequence[float],
        n_samples: int,
        master_seed: int,
        t_star: float,
    ) -> SweepResult:
        """
        Valve (mean of per-sample max over k) and Bose curves versus disorder strength.

        `model` fixes the distribution; its strength is replaced by each grid value.
        """
        deltas = _check_delta_grid(delta_grid)
        summaries: List[McSummary] = []
        bose: List[BoseSummary] = []

        for delta in deltas:
            point = model.with_strength(delta)
            summaries.append(self.monte_carlo(spec, schedule, point, n_samples, master_seed))
            bose.append(self.bose_ensemble(spec, point, n_samples, master_seed, t_star))
            logger.info(
                "Sweep point completed",
                strength=float(delta),
                valve=summaries[-1].mean_of_max,
                bose=bose[-1].mean,
            )

        return SweepResult(
            deltas=deltas,
            valve_curve=np.array([s.mean_of_max for s in summaries]),
            valve_std=np.array([s.std_of_max for s in summaries]),
            valve_max_of_mean=np.array([s.max_of_mean for s in summaries]),
            bose_curve=np.array([b.mean for b in bose]),
            bose_std=np.array([b.std for b in bose]),
            t_star=t_star,
            summaries=tuple(summaries),
        )


# Global instance
disorder_lab = DisorderLab()


# =============================================================================
# SECTION 4: CURVE ANALYSIS
# =============================================================================

def find_crossover(sweep: SweepResult) -> Optional[float]:
    """First strength where the valve curve falls below the Bose curve (linear interpolation)."""
    gap = sweep.valve_curve - sweep.bose_curve
    below = np.flatnonzero(gap < 0.0)
    if below.size == 0:
        return None
    i = int(below[0])
    if i == 0:
        return float(sweep.deltas[0])
    d0, d1 = sweep.deltas[i - 1], sweep.deltas[i]
    g0, g1 = gap[i - 1], gap[i]
    return float(d0 + g0 * (d1 - d0) / (g0 - g1))


def linear_fit_residuals(
    deltas: Sequence[float], values: Sequence[float], delta_max: float
) -> Tuple[float, float, np.ndarray]:
    """Least-squares line through the points with delta <= delta_max: (slope, intercept, residuals)."""
    deltas = np.asarray(deltas, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = deltas <= delta_max + 1e-12
    if mask.sum() < 2:
        raise InvalidInputError("need at least two points for a linear fit")
    slope, intercept = np.polyfit(deltas[mask], values[mask], 1)
    residuals = values[mask] - (slope * deltas[mask] + intercept)
    return float(slope), float(intercept), residuals


def saturation_step(per_step_mean: Sequence[float], per_step_std: Sequence[float]) -> int:
    """
    Smallest k* (1-based, 0 meaning every step) such that for all k > k*,
    |mean(k) - mean(K)| < std(K).
    """
    means = np.asarray(per_step_mean, dtype=float)
    if means.size == 0:
        return 0
    final_mean, final_std = means[-1], float(np.asarray(per_step_std)[-1])
    outside = np.flatnonzero(np.abs(means[:-1] - final_mean) >= final_std)
    return int(outside[-1]) + 1 if outside.size else 0
