"""
Valve protocol
==============
Designs the gate sequence on the ideal chain and runs it on any chain:
- valve gate construction
- schedule design (greedy arrival or fixed interval)
- ideal |phi_k> recursion
- composite chain + target simulation
"""

import math
from typing import Dict, List, Optional

import numpy as np
import structlog

from models.chain import ChainSpec, DisorderRealization, Spectrum
from models.protocol import (
    FixedInterval,
    GreedyArrival,
    PhiState,
    RunTrace,
    ScheduleStrategy,
    ValveGate,
    ValveSchedule,
    ValveStep,
)
from services.chain_service import arrival_amplitudes, default_t_max, propagator, spectrum_for
from services.exceptions import DegenerateStepError, InvalidInputError
from services.optimize import maximize_on_grid

logger = structlog.get_logger()

FIDELITY_SLACK = 1e-12


# =============================================================================
# SECTION 1: GATES
# =============================================================================

def build_valve_gate(a_k: complex, f_prev: float) -> ValveGate:
    """
    Valve gate for arrival amplitude a_k after a step that started at fidelity f_prev.

    The block on (target, site N) is
        (F_k)^(-1/2) * [[ F_prev^(1/2), conj(a_k) ],
                        [ -a_k,         F_prev^(1/2) ]]
    with F_k = F_prev + |a_k|^2. It is unitary, regular at F_prev = 0 and the
    identity when a_k = 0. The 0/0 case (a_k = 0, F_prev = 0) is the identity.
    """
    a_k = complex(a_k)
    f_prev = float(f_prev)
    if not (math.isfinite(a_k.real) and math.isfinite(a_k.imag) and math.isfinite(f_prev)):
        raise InvalidInputError("valve gate inputs must be finite")
    if f_prev < -FIDELITY_SLACK or f_prev > 1.0 + FIDELITY_SLACK:
        raise InvalidInputError(f"previous fidelity must lie in [0, 1], got {f_prev}")
    f_prev = min(max(f_prev, 0.0), 1.0)
    arrived = abs(a_k) ** 2
    if f_prev + arrived > 1.0 + FIDELITY_SLACK:
        raise InvalidInputError(f"F_prev + |a|^2 = {f_prev + arrived} exceeds 1")

    f_next = f_prev + arrived
    if f_next == 0.0:
        return ValveGate(block=np.eye(2, dtype=complex), arrival=a_k, f_prev=f_prev, f_next=0.0)

    root_prev = math.sqrt(f_prev)
    block = np.array(
        [[root_prev, a_k.conjugate()],
         [-a_k, root_prev]],
        dtype=complex,
    ) / math.sqrt(f_next)
    return ValveGate(block=block, arrival=a_k, f_prev=f_prev, f_next=min(f_next, 1.0))


def embed_gate(block: np.ndarray) -> np.ndarray:
    """4x4 gate in the basis |00>, |01>, |10>, |11> of (site N, target)."""
    gate = np.eye(4, dtype=complex)
    gate[1:3, 1:3] = block
    return gate


def literal_printed_gate(a_k: complex, f_prev: float, f_next: float) -> np.ndarray:
    """
    The gate matrix with the overall prefactor and -1/2 interior exponents, as it is
    usually printed. It is not unitary; kept to document the discrepancy.
    A zero fidelity gives infinite entries (the first step has F_prev = 0).
    """
    scale = _inverse_root(f_next)
    interior = _inverse_root(f_prev) * scale
    a_k = complex(a_k)
    return np.array(
        [[scale, 0, 0, 0],
         [0, interior, a_k.conjugate() * scale, 0],
         [0, -a_k * scale, interior, 0],
         [0, 0, 0, scale]],
        dtype=complex,
    )


def _inverse_root(x: float) -> float:
    x = float(x)
    return math.inf if x == 0.0 else x ** -0.5


# =============================================================================
# SECTION 2: SCHEDULE DESIGN
# =============================================================================

def _choose_interval(
    strategy: ScheduleStrategy, spectrum: Spectrum, phi: np.ndarray, t_max: float
) -> float:
    if isinstance(strategy, FixedInterval):
        return strategy.tau
    if isinstance(strategy, GreedyArrival):
        t_k, _ = maximize_on_grid(
            lambda times: np.abs(arrival_amplitudes(spectrum, phi, times)), t_max, strategy.grid
        )
        return t_k
    raise InvalidInputError(f"Unknown schedule strategy: {strategy!r}")


def design_schedule(
    spec: ChainSpec,
    strategy: ScheduleStrategy,
    max_steps: int,
    t_max: Optional[float] = None,
    target_fidelity: Optional[float] = None,
) -> ValveSchedule:
    """
    Design the valve sequence on the ideal chain.

    Step k picks t_k per strategy, takes a_k = <N|U(t_k)|phi_{k-1}>, builds V_k and
    sets phi_k = P U(t_k) phi_{k-1}. Design stops early once F_0^k >= target_fidelity.
    """
    if max_steps < 1:
        raise InvalidInputError(f"max_steps must be >= 1, got {max_steps}")
    if t_max is None:
        t_max = default_t_max(spec.n_sites)
    if not (math.isfinite(t_max) and t_max > 0.0):
        raise InvalidInputError(f"t_max must be positive, got {t_max}")

    logger.info(
        "Designing valve schedule",
        n_sites=spec.n_sites,
        strategy=strategy.name,
        max_steps=max_steps,
        t_max=t_max,
    )

    spectrum = spectrum_for(spec, DisorderRealization.zeros(spec))
    phi = PhiState.initial(spec.n_sites).amplitudes
    f_prev = 0.0
    steps: List[ValveStep] = []

    for k in range(1, max_steps + 1):
        t_k = _choose_interval(strategy, spectrum, phi, t_max)
        evolved = propagator(spectrum, t_k).entries @ phi
        a_k = complex(evolved[-1])
        if a_k == 0 and f_prev == 0.0:
            logger.error("Degenerate valve step", step=k, interval=t_k)
            raise DegenerateStepError(k)
        gate = build_valve_gate(a_k, f_prev)
        steps.append(ValveStep(interval=t_k, gate=gate))
        evolved[-1] = 0.0
        phi = evolved
        f_prev = gate.f_next
        logger.debug("Valve step designed", step=k, interval=t_k, arrival=abs(a_k) ** 2, fidelity=f_prev)
        if target_fidelity is not None and f_prev >= target_fidelity:
            break

    schedule = ValveSchedule(n_sites=spec.n_sites, steps=tuple(steps), strategy_name=strategy.name)
    logger.info(
        "Valve schedule designed",
        steps=len(schedule),
        total_time=schedule.total_time,
        design_fidelity=f_prev,
    )
    return schedule


# =============================================================================
# SECTION 3: PROTOCOL RUNS
# =============================================================================

def _check_schedule(spec: ChainSpec, schedule: ValveSchedule) -> None:
    if schedule.n_sites != spec.n_sites:
        raise InvalidInputError(
            f"schedule designed for {schedule.n_sites} sites, chain has {spec.n_sites}"
        )


def run_ideal_recursion(spec: ChainSpec, schedule: ValveSchedule) -> List[float]:
    """Replay |phi_k> = P U_k |phi_{k-1}> on the ideal chain; returns F_0^k = 1 - <phi_k|phi_k>, k = 1..K."""
    _check_schedule(spec, schedule)
    spectrum = spectrum_for(spec, DisorderRealization.zeros(spec))
    phi = PhiState.initial(spec.n_sites)
    fidelities: List[float] = []
    for k, step in enumerate(schedule.steps, start=1):
        amplitudes = propagator(spectrum, step.interval).entries @ phi.amplitudes
        amplitudes[-1] = 0.0
        phi = PhiState(amplitudes=amplitudes, step=k)
        fidelities.append(phi.fidelity)
    return fidelities


def run_composite(
    spec: ChainSpec, real: Optional[DisorderRealization], schedule: ValveSchedule
) -> RunTrace:
    """
    Run the schedule on a (possibly perturbed) chain plus an uncoupled target.

    State index n-1 is chain site n; index N is the target. Each step evolves the
    chain with the target frozen, then applies the gate block to (target, site N).
    """
    _check_schedule(spec, schedule)
    if real is None:
        real = DisorderRealization.zeros(spec)
    spectrum = spectrum_for(spec, real)
    n = spec.n_sites

    state = np.zeros(n + 1, dtype=complex)
    state[0] = 1.0
    fidelities = np.zeros(len(schedule))
    norms = np.zeros(len(schedule))
    cache: Dict[float, np.ndarray] = {}

    for k, step in enumerate(schedule.steps):
        u = cache.get(step.interval)
        if u is None:
            u = cache[step.interval] = propagator(spectrum, step.interval).entries
        state[:n] = u @ state[:n]
        pair = step.gate.block @ np.array([state[n], state[n - 1]])
        state[n], state[n - 1] = pair[0], pair[1]
        fidelities[k] = min(abs(state[n]) ** 2, 1.0)
        norms[k] = float(np.vdot(state, state).real)

    return RunTrace(fidelities=fidelities, final_state=state, norms=norms)
