"""可复现的随机态与随包分发的模式场"""

from __future__ import annotations

import math
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from loguru import logger

from kg_currents.core.basic_dir import FIXTURES_DIR
from kg_currents.core.errors import ParameterError, UsageError
from kg_currents.physics.hilbert_space import normalize
from kg_currents.physics.mode_engine import ModeField, ModeSpec
from kg_currents.physics.params import InnerParams
from kg_currents.physics.spectral_grid import GridState, Lattice, sample
from kg_currents.storage.documents import load_mode_field

Seed = int | Sequence[int]

BUNDLED_FIXTURES = ("two_mode", "degenerate_two_mode", "mixed_four_mode")


def band_limit(lattice: Lattice) -> int:
    """随机模式的最大格点波数; 二次乘积不混叠"""
    return max(1, lattice.points // 4 - 1)


def random_mode_field(
    lattice: Lattice,
    mass: float,
    seed: Seed,
    mode_count: int,
    eps: int | None = None,
    band: int | None = None,
) -> ModeField:
    """格点波矢均匀取于 |n| ≤ band, 振幅复正态, ε 随机 (或固定)"""
    if mode_count < 1:
        raise ParameterError(f"mode_count must be >= 1: {mode_count}")
    nmax = band if band is not None else band_limit(lattice)
    if nmax >= lattice.points // 2:
        raise ParameterError(f"band {nmax} reaches the Nyquist index of N={lattice.points}")
    rng = np.random.default_rng(seed)
    dk = 2.0 * math.pi / lattice.box_length
    modes = []
    for _ in range(mode_count):
        n = rng.integers(-nmax, nmax + 1, size=lattice.dims)
        k = [float(dk * t) for t in n] + [0.0] * (3 - lattice.dims)
        amp = complex(rng.normal(), rng.normal())
        e = eps if eps is not None else int(rng.choice((1, -1)))
        modes.append(ModeSpec(amplitude=amp, wavevec=(k[0], k[1], k[2]), eps=e))
    return ModeField(mass=mass, box_length=lattice.box_length, modes=tuple(modes))


def random_state(
    lattice: Lattice,
    mass: float,
    seed: Seed,
    mode_count: int,
    eps: int | None = None,
) -> GridState:
    """采样后按 (·,·)₀ 归一"""
    f = random_mode_field(lattice, mass, seed, mode_count, eps=eps)
    if not f.modes:
        raise ParameterError(f"random field for seed={seed} is empty")
    return normalize(sample(f, lattice), InnerParams(mass=mass))


def fixture_path(name: str) -> Path:
    return FIXTURES_DIR / f"{name}.json"


def load_fixture(name: str) -> ModeField:
    if name not in BUNDLED_FIXTURES:
        raise UsageError(f"unknown fixture {name!r}; available: {', '.join(BUNDLED_FIXTURES)}")
    logger.debug("loading bundled fixture {}", name)
    return load_mode_field(fixture_path(name))
