"""Cross-checks of the single-excitation simulation against the full 2^N space."""

import numpy as np
import pytest

from conftest import random_realization, random_spec
from models.chain import ChainSpec
from models.protocol import FixedInterval, GreedyArrival
from services.chain_service import propagator, spectrum_for, transfer_amplitude
from services.exceptions import InvalidInputError
from services.full_space import (
    excitation_index,
    full_composite_run,
    full_hamiltonian,
    full_transfer_amplitude,
)
from services.valve_service import design_schedule, run_composite


def test_excitation_index_is_most_significant_first():
    assert excitation_index(1, 3) == 0b100
    assert excitation_index(3, 3) == 0b001


def test_hamiltonian_is_hermitian(rng):
    spec = random_spec(rng, 4)
    h = full_hamiltonian(spec, random_realization(rng, spec))
    np.testing.assert_allclose(h, h.conj().T, atol=1e-14)


def test_excitation_number_conserved():
    h = full_hamiltonian(ChainSpec.uniform(3))
    counts = np.array([bin(i).count("1") for i in range(8)])
    rows, cols = np.nonzero(np.abs(h) > 1e-14)
    assert np.all(counts[rows] == counts[cols])


def test_too_many_qubits():
    with pytest.raises(InvalidInputError):
        full_hamiltonian(ChainSpec.uniform(12), extra_qubits=1)


def test_transfer_amplitude_matches(rng):
    for _ in range(20):
        spec = random_spec(rng, int(rng.integers(2, 5)))
        real = random_realization(rng, spec)
        t = float(rng.uniform(0.0, 10.0))
        reduced = transfer_amplitude(propagator(spectrum_for(spec, real), t))
        assert abs(reduced - full_transfer_amplitude(spec, real, t)) < 1e-9


def test_composite_run_matches(rng):
    for case in range(20):
        spec = random_spec(rng, int(rng.integers(2, 5)))
        strategy = GreedyArrival() if case % 2 else FixedInterval(float(rng.uniform(0.3, 3.0)))
        schedule = design_schedule(spec, strategy, max_steps=3)
        real = random_realization(rng, spec, width=0.2)
        reduced = run_composite(spec, real, schedule).fidelities
        np.testing.assert_allclose(reduced, full_composite_run(spec, real, schedule), atol=1e-9)
