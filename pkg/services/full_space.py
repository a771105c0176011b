"""Brute-force 2^N reference simulation of the XX chain and the valve protocol.

Qubit 1 is the most significant factor of every Kronecker product; |0> is the
ground state and sigma_+ |0> = |1>. Only meant for short chains.
"""

from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import expm

from models.chain import ChainSpec, DisorderRealization
from models.protocol import ValveSchedule
from services.exceptions import InvalidInputError
from services.valve_service import embed_gate

MAX_QUBITS = 12

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
EXCITED = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


def _site_operator(ops: List[Tuple[int, np.ndarray]], n_qubits: int) -> np.ndarray:
    """Kronecker product with ops[(site, matrix)] placed at 1-based sites, identity elsewhere."""
    placed = dict(ops)
    result = np.ones((1, 1), dtype=complex)
    for site in range(1, n_qubits + 1):
        result = np.kron(result, placed.get(site, np.eye(2, dtype=complex)))
    return result


def excitation_index(site: int, n_qubits: int) -> int:
    """Basis index of the state with a single excitation on `site`."""
    return 1 << (n_qubits - site)


def full_hamiltonian(
    spec: ChainSpec, real: Optional[DisorderRealization] = None, extra_qubits: int = 0
) -> np.ndarray:
    """
    sum_n c_n (1 + delta_n) [X_n X_{n+1} + Y_n Y_{n+1}] + sum_n 2 (e_n + eps_n) |1><1|_n,
    optionally tensored with `extra_qubits` uncoupled qubits after the chain.
    """
    if real is None:
        real = DisorderRealization.zeros(spec)
    real.check_matches(spec)
    n_qubits = spec.n_sites + extra_qubits
    if n_qubits > MAX_QUBITS:
        raise InvalidInputError(f"full-space simulation limited to {MAX_QUBITS} qubits")

    hamiltonian = np.zeros((2 ** n_qubits, 2 ** n_qubits), dtype=complex)
    for n in range(1, spec.n_sites):
        strength = spec.couplings[n - 1] * (1.0 + real.coupling_deltas[n - 1])
        hamiltonian += strength * (
            _site_operator([(n, SIGMA_X), (n + 1, SIGMA_X)], n_qubits)
            + _site_operator([(n, SIGMA_Y), (n + 1, SIGMA_Y)], n_qubits)
        )
    for n in range(1, spec.n_sites + 1):
        energy = 2.0 * (spec.onsite[n - 1] + real.onsite_deltas[n - 1])
        if energy:
            hamiltonian += energy * _site_operator([(n, EXCITED)], n_qubits)
    return hamiltonian


def project_single_excitation(hamiltonian: np.ndarray, n_sites: int) -> np.ndarray:
    """Matrix of the full Hamiltonian on the states |1>, ..., |N>."""
    n_qubits = int(round(np.log2(hamiltonian.shape[0])))
    indices = [excitation_index(site, n_qubits) for site in range(1, n_sites + 1)]
    return hamiltonian[np.ix_(indices, indices)]


def full_transfer_amplitude(
    spec: ChainSpec, real: Optional[DisorderRealization], t: float
) -> complex:
    """<N|exp(-iHt)|1> computed in the full 2^N space."""
    hamiltonian = full_hamiltonian(spec, real)
    n = spec.n_sites
    start = np.zeros(2 ** n, dtype=complex)
    start[excitation_index(1, n)] = 1.0
    evolved = expm(-1j * hamiltonian * t) @ start
    return complex(evolved[excitation_index(n, n)])


def full_composite_run(
    spec: ChainSpec, real: Optional[DisorderRealization], schedule: ValveSchedule
) -> np.ndarray:
    """Target population after each gate, simulated on all N+1 qubits."""
    n = spec.n_sites
    n_qubits = n + 1
    hamiltonian = full_hamiltonian(spec, real, extra_qubits=1)
    state = np.zeros(2 ** n_qubits, dtype=complex)
    state[excitation_index(1, n_qubits)] = 1.0
    target = excitation_index(n_qubits, n_qubits)

    fidelities = []
    for step in schedule.steps:
        state = expm(-1j * hamiltonian * step.interval) @ state
        # Gate on the last two qubits (site N, target).
        gate = np.kron(np.eye(2 ** (n - 1), dtype=complex), embed_gate(step.gate.block))
        state = gate @ state
        fidelities.append(abs(state[target]) ** 2)
    return np.array(fidelities)
