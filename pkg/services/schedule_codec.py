"""Plain-text schedule files.

    valve-schedule v1 N=<n> strategy=<name>
    <k> <t_k> <re a_k> <im a_k> <F_prev> <F_k>
"""

import re
from typing import List, Tuple

from models.protocol import ValveSchedule, ValveStep
from services.exceptions import ScheduleFormatError
from services.valve_service import build_valve_gate

HEADER_PATTERN = re.compile(r"^valve-schedule v1 N=(\d+) strategy=(\S+)$")

REAL_DIGITS = 17

# Tolerance when checking a stored F_k against F_prev + |a_k|^2.
F_CONSISTENCY_TOL = 1e-12


def _real(x: float) -> str:
    return f"{x:.{REAL_DIGITS}g}"


def write_schedule(schedule: ValveSchedule) -> str:
    lines = [f"valve-schedule v1 N={schedule.n_sites} strategy={schedule.strategy_name}"]
    for k, step in enumerate(schedule.steps, start=1):
        gate = step.gate
        fields = [
            str(k),
            _real(step.interval),
            _real(gate.arrival.real),
            _real(gate.arrival.imag),
            _real(gate.f_prev),
            _real(gate.f_next),
        ]
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def read_schedule(text: str) -> ValveSchedule:
    """Parse a schedule file; gate blocks are rebuilt from (a_k, F_prev)."""
    lines = text.splitlines()
    if not lines:
        raise ScheduleFormatError(1, "empty schedule file")
    header = HEADER_PATTERN.match(lines[0].strip())
    if header is None:
        raise ScheduleFormatError(1, f"bad header: {lines[0]!r}")
    n_sites, strategy_name = int(header.group(1)), header.group(2)

    steps: List[ValveStep] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ScheduleFormatError(line_no, f"expected 6 fields, got {len(parts)}")
        try:
            k = int(parts[0])
            t_k, re_a, im_a, f_prev, f_next = (float(p) for p in parts[1:])
        except ValueError as e:
            raise ScheduleFormatError(line_no, str(e)) from e
        if k != len(steps) + 1:
            raise ScheduleFormatError(line_no, f"step index {k} out of order")
        if not t_k > 0.0:
            raise ScheduleFormatError(line_no, f"interval must be positive, got {t_k}")
        try:
            gate = build_valve_gate(complex(re_a, im_a), f_prev)
        except ValueError as e:
            raise ScheduleFormatError(line_no, str(e)) from e
        if abs(gate.f_next - f_next) > F_CONSISTENCY_TOL:
            raise ScheduleFormatError(
                line_no, f"F_k={f_next!r} disagrees with F_prev + |a_k|^2 = {gate.f_next!r}"
            )
        steps.append(ValveStep(interval=t_k, gate=gate))

    return ValveSchedule(n_sites=n_sites, steps=tuple(steps), strategy_name=strategy_name)


def schedule_summary(schedule: ValveSchedule) -> Tuple[int, float]:
    """(steps, final design fidelity)."""
    fidelities = schedule.design_fidelities
    return len(schedule), (fidelities[-1] if fidelities else 0.0)
