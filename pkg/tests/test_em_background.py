import math

import numpy as np
import pytest
from conftest import max_rel

from kg_currents.core.errors import DocumentError, LatticeMismatchError, ParameterError, SpectrumError
from kg_currents.experiments.fixtures import random_state
from kg_currents.physics.em_background import (
    DenseOperator,
    EMConfig,
    ScalarPotential,
    build_Dq,
    dq_power_apply,
    evolve_magnetic,
    free_operator,
    gauge_factor,
    gauge_shift,
    gauge_transform,
    ip_a_magnetic,
    magnetic_field,
    rho_a_magnetic,
)
from kg_currents.physics.hilbert_space import ip_a, rho_a
from kg_currents.physics.params import InnerParams
from kg_currents.physics.spectral_grid import Lattice, apply_D_power, evolve

LAT_1D = Lattice(dims=1, points=64, box_length=32.0)
LAT_2D = Lattice(dims=2, points=8, box_length=8.0)


def _smooth_em(lattice: Lattice, q: float, seed: int = 0) -> EMConfig:
    rng = np.random.default_rng(seed)
    band = np.ones(lattice.shape, dtype=bool)
    for k in lattice.wavevectors():
        band &= np.abs(np.rint(k * lattice.box_length / (2.0 * math.pi))) <= 3
    axes = []
    for _ in range(lattice.dims):
        coeffs = (rng.normal(size=lattice.shape) + 1j * rng.normal(size=lattice.shape)) * band
        axes.append(np.fft.ifftn(coeffs).real * lattice.size / 4.0)
    return EMConfig(lattice=lattice, q=q, vector_potential=tuple(axes))


@pytest.fixture(scope="module")
def magnetic_op() -> DenseOperator:
    return build_Dq(LAT_2D, 1.0, _smooth_em(LAT_2D, 0.5))


def test_free_operator_matches_multipliers():
    op = free_operator(LAT_1D, 1.0)
    expected = np.sort((LAT_1D.k_squared() + 1.0).ravel())
    assert np.allclose(op.eigenvalues(), expected, rtol=1e-12, atol=0.0)
    s = random_state(LAT_1D, 1.0, 3, 4)
    for alpha in (0.5, -0.25):
        assert max_rel(dq_power_apply(op, alpha, s.psi), apply_D_power(s.psi, LAT_1D, 1.0, alpha)) < 1e-11


def test_constant_potential_shifts_the_spectrum():
    q, a0 = 0.5, 0.37
    em = EMConfig(lattice=LAT_1D, q=q, vector_potential=(np.full(64, a0),))
    expected = np.sort(((LAT_1D.wavevectors()[0] - q * a0) ** 2 + 1.0).ravel())
    assert np.allclose(build_Dq(LAT_1D, 1.0, em).eigenvalues(), expected, rtol=1e-10, atol=0.0)


@pytest.mark.parametrize("lattice", [LAT_1D, LAT_2D])
def test_spectrum_is_bounded_by_the_mass(lattice):
    op = build_Dq(lattice, 1.5, _smooth_em(lattice, 0.5, seed=4))
    assert op.hermitian
    assert op.eigenvalues()[0] >= 1.5**2 - 1e-9


def test_dq_powers(magnetic_op):
    s = random_state(LAT_2D, 1.0, 5, 4)
    assert np.array_equal(dq_power_apply(magnetic_op, 0.0, s.psi), s.psi)
    direct = magnetic_op.apply(s.psi)
    assert max_rel(dq_power_apply(magnetic_op, 1.0, s.psi), direct) < 1e-10
    twice = dq_power_apply(magnetic_op, 0.5, dq_power_apply(magnetic_op, 0.5, s.psi))
    assert max_rel(twice, direct) < 1e-10


def test_eigendecomposition_is_cached(magnetic_op):
    assert magnetic_op.eigh() is magnetic_op.eigh()


def test_dense_operator_validation():
    skew = np.eye(8, dtype=complex)
    skew[0, 1] = 2.0
    with pytest.raises(SpectrumError):
        DenseOperator(skew, Lattice(dims=1, points=8, box_length=1.0), 1.0)
    with pytest.raises(LatticeMismatchError):
        DenseOperator(np.eye(4, dtype=complex), Lattice(dims=1, points=8, box_length=1.0), 1.0)
    negative = DenseOperator(-np.eye(8, dtype=complex), Lattice(dims=1, points=8, box_length=1.0), 1.0)
    with pytest.raises(SpectrumError):
        negative.eigh()


def test_build_Dq_preconditions():
    em = EMConfig(
        lattice=LAT_1D,
        q=0.5,
        vector_potential=(np.zeros(64),),
        scalar_potential=ScalarPotential(kind="constant", constant=0.2),
    )
    with pytest.raises(SpectrumError, match="phi"):
        build_Dq(LAT_1D, 1.0, em)
    big = Lattice(dims=2, points=128, box_length=8.0)
    with pytest.raises(SpectrumError):
        build_Dq(big, 1.0, EMConfig.free(big))
    with pytest.raises(LatticeMismatchError):
        build_Dq(LAT_2D, 1.0, EMConfig.free(LAT_1D))


def test_free_magnetic_theory_reduces_to_the_free_one():
    op = free_operator(LAT_1D, 1.0)
    p = InnerParams(a=0.3, kappa=1.2)
    s1, s2 = random_state(LAT_1D, 1.0, 1, 4), random_state(LAT_1D, 1.0, 2, 4)
    expected = ip_a(s1, s2, p)
    assert abs(ip_a_magnetic(s1, s2, p, op) - expected) <= 1e-11 * abs(expected)
    moved = evolve_magnetic(s1, 1.0, op)
    assert max_rel(moved.psi, evolve(s1, 1.0).psi) < 1e-11
    assert max_rel(rho_a_magnetic(s1, p, op), rho_a(s1, p)) < 1e-11


@pytest.mark.parametrize("a", [-0.5, 0.0, 0.5])
def test_magnetic_inner_product_is_positive(magnetic_op, a):
    p = InnerParams(a=a)
    for seed in range(20):
        s = random_state(LAT_2D, 1.0, seed, 4)
        assert ip_a_magnetic(s, s, p, magnetic_op).real > 0.0


def test_magnetic_inner_product_is_conserved(magnetic_op):
    p = InnerParams(a=0.4)
    s = random_state(LAT_2D, 1.0, 9, 4)
    start = ip_a_magnetic(s, s, p, magnetic_op)
    current = s
    for _ in range(50):
        current = evolve_magnetic(current, 0.1, magnetic_op)
        assert abs(ip_a_magnetic(current, current, p, magnetic_op) - start) <= 1e-11 * abs(start)
    assert current.x0 == pytest.approx(5.0)


def test_state_and_operator_must_agree(magnetic_op):
    with pytest.raises(LatticeMismatchError):
        evolve_magnetic(random_state(LAT_1D, 1.0, 0, 4), 1.0, magnetic_op)


def test_pure_gauge_shift_keeps_the_low_spectrum():
    em = _smooth_em(LAT_1D, 0.5)
    base = build_Dq(LAT_1D, 1.0, em).eigenvalues()
    chi = 0.7 * np.sin(2.0 * math.pi * LAT_1D.coordinates()[0] / 32.0)
    shifted = build_Dq(LAT_1D, 1.0, gauge_shift(em, chi)).eigenvalues()
    quarter = LAT_1D.size // 4
    assert np.max(np.abs(shifted[:quarter] - base[:quarter]) / base[:quarter]) <= 1e-9


def test_weak_coupling_is_linear():
    em = _smooth_em(LAT_2D, 1.0)
    free = free_operator(LAT_2D, 1.0).matrix
    diffs = []
    for q in (1e-3, 5e-4):
        weak = EMConfig(lattice=LAT_2D, q=q, vector_potential=em.vector_potential)
        diffs.append(float(np.linalg.norm(build_Dq(LAT_2D, 1.0, weak).matrix - free, 2)))
    assert diffs[0] / diffs[1] == pytest.approx(2.0, abs=1e-2)


def test_magnetic_field():
    x, y = LAT_2D.coordinates()
    k = 2.0 * math.pi / 8.0
    em = EMConfig(lattice=LAT_2D, q=1.0, vector_potential=(-np.sin(k * y), np.sin(k * x)))
    (bz,) = magnetic_field(em)
    assert np.allclose(bz, k * (np.cos(k * x) + np.cos(k * y)), atol=1e-12)
    with pytest.raises(ParameterError):
        magnetic_field(EMConfig.free(LAT_1D))
    assert len(magnetic_field(EMConfig.free(Lattice(dims=3, points=8, box_length=4.0)))) == 3


def test_gauge_factor():
    free = EMConfig.free(LAT_1D)
    assert np.array_equal(gauge_factor(free, 0.0, 3.0), np.ones(64))
    const = EMConfig(
        lattice=LAT_1D, q=0.5, vector_potential=(np.zeros(64),), scalar_potential=ScalarPotential(kind="constant", constant=0.3)
    )
    assert np.max(np.abs(gauge_factor(const, 0.0, 1.5) - np.exp(1j * 0.5 * 0.45))) < 1e-14
    assert np.array_equal(gauge_factor(const, 2.0, 2.0), np.ones(64))

    x = LAT_1D.coordinates()[0]
    profile = ScalarPotential(kind="profile", profile=lambda t: np.cos(t) * np.sin(2.0 * math.pi * x / 32.0))
    varying = EMConfig(lattice=LAT_1D, q=0.5, vector_potential=(np.zeros(64),), scalar_potential=profile)
    u = gauge_factor(varying, 0.0, 1.5)
    assert np.max(np.abs(np.abs(u) - 1.0)) < 1e-14
    assert np.max(np.abs(u - np.exp(0.5j * math.sin(1.5) * np.sin(2.0 * math.pi * x / 32.0)))) < 1e-9
    chi = gauge_transform(np.ones(64), u)
    assert np.array_equal(chi, u)
    with pytest.raises(LatticeMismatchError):
        gauge_transform(np.ones(32), u)


def test_scalar_potential_validation():
    with pytest.raises(ParameterError):
        ScalarPotential(kind="profile")
    with pytest.raises(ParameterError):
        ScalarPotential(kind="constant", constant=math.nan)
    bad = ScalarPotential(kind="profile", profile=lambda t: np.zeros(3))
    with pytest.raises(LatticeMismatchError):
        bad.at(0.0, LAT_1D)


def test_em_config_documents():
    doc = {"q": 0.25, "A": [[0.1] * 64], "phi": {"constant": 0.5}}
    em = EMConfig.from_document(doc, LAT_1D)
    assert em.q == 0.25
    assert em.scalar_potential.constant == 0.5
    assert em.to_document() == doc
    with pytest.raises(DocumentError):
        EMConfig.from_document({"q": 0.25, "A": [[0.1] * 64], "phi": "wave"}, LAT_1D)
    with pytest.raises(DocumentError):
        EMConfig.from_document({"A": [[0.1] * 64]}, LAT_1D)
    with pytest.raises(DocumentError):
        EMConfig.from_document({"q": 0.25, "A": [[0.1] * 10]}, LAT_1D)
    with pytest.raises(ParameterError):
        EMConfig(lattice=LAT_1D, q=0.1, vector_potential=(np.full(64, 1j),))
