"""Shared pytest fixtures."""

import numpy as np
import pytest

from models.chain import ChainSpec, DisorderRealization
from models.protocol import GreedyArrival
from services.valve_service import design_schedule


def random_spec(rng: np.random.Generator, n_sites: int, with_onsite: bool = True) -> ChainSpec:
    couplings = rng.uniform(0.5, 1.5, size=n_sites - 1)
    onsite = rng.uniform(-0.5, 0.5, size=n_sites) if with_onsite else None
    return ChainSpec.build(n_sites, couplings=couplings, onsite=onsite)


def random_realization(rng: np.random.Generator, spec: ChainSpec, width: float = 0.3) -> DisorderRealization:
    return DisorderRealization(
        coupling_deltas=rng.uniform(-width, width, size=spec.n_sites - 1),
        onsite_deltas=rng.uniform(-width, width, size=spec.n_sites),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def chain2():
    return ChainSpec.uniform(2)


@pytest.fixture
def chain3():
    return ChainSpec.uniform(3)


@pytest.fixture(scope="session")
def chain20():
    return ChainSpec.uniform(20)


@pytest.fixture(scope="session")
def greedy20(chain20):
    """Reference schedule: N=20, 20 greedy steps, t_max = 40."""
    return design_schedule(chain20, GreedyArrival(), max_steps=20, t_max=40.0)
