import os

import hypothesis
import numpy as np
import pytest
from loguru import logger

from kg_currents.experiments.fixtures import load_fixture, random_mode_field, random_state
from kg_currents.physics.params import InnerParams
from kg_currents.physics.spectral_grid import Lattice

np.seterr(all="raise", under="ignore")

hypothesis.settings.register_profile("default", max_examples=20, deadline=None, derandomize=True)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None, derandomize=True)
hypothesis.settings.register_profile("ci", max_examples=100, deadline=None, derandomize=True)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

A_VALUES = (-0.9, -0.5, 0.0, 0.5, 0.9)


@pytest.fixture(autouse=True)
def _quiet_logger():
    logger.remove()
    yield
    logger.remove()


@pytest.fixture
def lattice_1d() -> Lattice:
    return Lattice(dims=1, points=64, box_length=32.0)


@pytest.fixture
def lattice_2d() -> Lattice:
    return Lattice(dims=2, points=16, box_length=8.0)


@pytest.fixture
def lattice_3d() -> Lattice:
    return Lattice(dims=3, points=16, box_length=8.0)


@pytest.fixture
def params() -> InnerParams:
    return InnerParams(a=0.3, kappa=1.2, mass=1.0)


@pytest.fixture
def two_mode():
    return load_fixture("two_mode")


@pytest.fixture
def mixed_four_mode():
    return load_fixture("mixed_four_mode")


@pytest.fixture
def make_state(lattice_1d):
    def _make(seed: int = 0, mode_count: int = 4, lattice: Lattice | None = None, eps: int | None = None, mass: float = 1.0):
        return random_state(lattice or lattice_1d, mass, seed, mode_count, eps=eps)

    return _make


@pytest.fixture
def make_field(lattice_1d):
    def _make(seed: int = 0, mode_count: int = 4, lattice: Lattice | None = None, eps: int | None = None, mass: float = 1.0):
        return random_mode_field(lattice or lattice_1d, mass, seed, mode_count, eps=eps)

    return _make


def max_rel(x, y) -> float:
    x, y = np.asarray(x), np.asarray(y)
    scale = float(max(np.max(np.abs(x)), np.max(np.abs(y)), 1e-300))
    return float(np.max(np.abs(x - y))) / scale
