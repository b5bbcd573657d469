import math

import numpy as np
import pytest
from conftest import max_rel
from hypothesis import given
from hypothesis import strategies as st

from kg_currents.core.errors import ParameterError
from kg_currents.experiments.fixtures import random_mode_field
from kg_currents.physics.mode_engine import (
    ETA,
    FourVector,
    LorentzBoost,
    ModeField,
    ModeSpec,
    SpacetimePoint,
    J_script_two_mode_closed_form,
    J_two_mode_closed_form,
    K_invariant,
    K_vector,
    boost,
    boost_point,
    boost_vector,
    box_inner_product,
    charge_conjugate,
    decompose_J,
    div_J,
    div_J_script,
    div_J_script_closed_form,
    energy_project,
    eval_field,
    eval_J,
    eval_J_script,
    foldy_residual,
    kg_residual_at,
    omega,
    slice_flux,
    strip_flux,
)
from kg_currents.physics.params import InnerParams
from kg_currents.physics.spectral_grid import Lattice, sample
from kg_currents.physics.hilbert_space import ip_a

P0 = InnerParams(a=0.0, kappa=1.0, mass=1.0)


def _points(count: int, seed: int = 0, box: float = 32.0) -> list[SpacetimePoint]:
    rng = np.random.default_rng(seed)
    return [
        SpacetimePoint(x0=float(t), xvec=(float(x), float(y), float(z)))
        for t, (x, y, z) in zip(rng.uniform(-2.0, 2.0, count), rng.uniform(0.0, box, (count, 3)), strict=True)
    ]


def _field(*modes: tuple[complex, tuple[float, float, float], int], mass: float = 1.0) -> ModeField:
    return ModeField(
        mass=mass,
        box_length=32.0,
        boxed=False,
        modes=tuple(ModeSpec(amplitude=c, wavevec=k, eps=e) for c, k, e in modes),
    )


@pytest.mark.parametrize(
    ("k", "mass", "expected"),
    [((0.0, 0.0, 0.0), 1.0, 1.0), ((3.0, 0.0, 0.0), 4.0, 5.0), ((1.0, 1.0, 1.0), 1.0, 2.0)],
)
def test_omega(k, mass, expected):
    assert omega(k, mass) == pytest.approx(expected, rel=1e-15)


def test_omega_rejects_non_positive_mass():
    with pytest.raises(ParameterError):
        omega((1.0, 0.0, 0.0), 0.0)


def test_eval_field_examples():
    rest = _field((1.0, (0.0, 0.0, 0.0), 1))
    assert abs(eval_field(rest, SpacetimePoint(x0=math.pi)) + 1.0) < 1e-15
    assert eval_field(ModeField.empty(1.0, 32.0), SpacetimePoint()) == 0
    pair = _field((1.0, (0.2, 0.0, 0.0), 1), (1.0, (0.5, 0.0, 0.0), 1))
    assert abs(eval_field(pair, SpacetimePoint()) - 2.0) < 1e-15


def test_modes_merge_and_zero_amplitudes_drop():
    f = _field((1.0, (0.1, 0.0, 0.0), 1), (0.5j, (0.1, 0.0, 0.0), 1), (2.0, (0.1, 0.0, 0.0), -1), (0.0, (0.3, 0.0, 0.0), 1))
    assert len(f.modes) == 2
    merged = next(m for m in f.modes if m.eps == 1)
    assert merged.amplitude == 1.0 + 0.5j


def test_boxed_field_rejects_off_lattice_wavevector():
    with pytest.raises(ValueError, match="off the box lattice"):
        ModeField(mass=1.0, box_length=32.0, modes=(ModeSpec(amplitude=1.0, wavevec=(0.1, 0.0, 0.0)),))


def test_charge_conjugate(make_field):
    f = _field((2.0, (0.3, 0.0, 0.0), -1))
    assert charge_conjugate(f).modes[0].amplitude == -2.0
    positive = _field((1.0 + 1j, (0.3, 0.0, 0.0), 1))
    assert charge_conjugate(positive) == positive
    g = make_field(seed=5, mode_count=5)
    assert charge_conjugate(charge_conjugate(g)) == g


def test_energy_project(mixed_four_mode):
    negative = energy_project(mixed_four_mode, -1)
    assert energy_project(negative, 1).modes == ()
    plus = energy_project(mixed_four_mode, 1)
    assert set(plus.modes) | set(negative.modes) == set(mixed_four_mode.modes)
    for x in _points(10):
        assert foldy_residual(mixed_four_mode, x) < 1e-12


def test_kg_residual_spot_check(mixed_four_mode):
    for x in _points(5, seed=1):
        assert kg_residual_at(mixed_four_mode, x) < 1e-8


def test_single_mode_currents():
    plus = _field((1.0, (0.0, 0.0, 0.0), 1))
    j = eval_J(plus, P0, SpacetimePoint()).as_array()
    assert np.allclose(j, [1.0, 0.0, 0.0, 0.0], atol=1e-15)
    minus = _field((1.0, (0.0, 0.0, 0.0), -1))
    j_half = eval_J(minus, InnerParams(a=0.5), SpacetimePoint(x0=0.7)).as_array()
    assert j_half[0] == pytest.approx(0.5, rel=1e-14)
    script = eval_J_script(plus, P0, SpacetimePoint()).as_array()
    assert script[0].real == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("a", [-0.9, -0.2, 0.0, 0.6])
def test_single_mode_density_is_positive(a):
    for eps in (1, -1):
        c, k = 0.7 - 0.2j, (0.4, -0.1, 0.2)
        f = _field((c, k, eps))
        p = InnerParams(a=a, kappa=1.5)
        j0 = eval_J(f, p, SpacetimePoint(x0=0.3)).components[0]
        expected = p.kappa * (1.0 + a * eps) * omega(k, 1.0) * abs(c) ** 2 / p.mass
        assert j0.real == pytest.approx(expected, rel=1e-13)
        assert expected > 0.0


def test_two_mode_closed_forms(two_mode, params):
    for x in _points(10):
        j = eval_J(two_mode, params, x).as_array()
        assert max_rel(j, J_two_mode_closed_form(two_mode, params, x).as_array()) < 1e-12
        s = eval_J_script(two_mode, params, x).as_array()
        assert max_rel(s, J_script_two_mode_closed_form(two_mode, params, x).as_array()) < 1e-12


def test_script_current_scales_with_one_plus_a_for_positive_fields(make_field):
    f = make_field(seed=3, mode_count=5, eps=1)
    for x in _points(5):
        base = eval_J_script(f, P0, x).as_array()
        scaled = eval_J_script(f, P0.with_a(0.3), x).as_array()
        assert max_rel(scaled, 1.3 * base) < 1e-12


@given(seed=st.integers(0, 2**32 - 1), a=st.floats(-0.95, 0.95))
def test_div_J_vanishes(seed, a):
    lat = Lattice(dims=3, points=16, box_length=8.0)
    f = random_mode_field(lat, 1.0, seed, 8)
    p = InnerParams(a=a, kappa=0.8)
    w_max = max(omega(m.wavevec, 1.0) for m in f.modes)
    # |J| ≤ κ(1+|a|)ω_max(Σ|c|)²/M
    scale = w_max**2 * p.kappa * 2.0 * sum(abs(m.amplitude) for m in f.modes) ** 2 / p.mass
    for x in _points(4, seed=seed % 1000, box=8.0):
        assert abs(div_J(f, p, x)) <= 1e-12 * scale


def test_div_J_empty_field():
    assert div_J(ModeField.empty(1.0, 32.0), P0, SpacetimePoint()) == 0


def test_div_J_script(two_mode, params):
    degenerate = _field((1.0, (0.4, 0.0, 0.0), 1), (0.5 + 0.2j, (-0.4, 0.0, 0.0), 1))
    single = _field((1.0, (0.4, 0.0, 0.0), 1))
    for x in _points(10):
        assert abs(div_J_script(degenerate, params, x)) < 1e-13
        assert abs(div_J_script(single, params, x)) < 1e-13
    values = []
    for x in _points(10, seed=2):
        closed = div_J_script_closed_form(two_mode, params, x)
        assert div_J_script(two_mode, params, x) == pytest.approx(closed, rel=1e-12, abs=1e-15)
        values.append(abs(closed))
    assert max(values) > 1e-4


def test_K_vector_and_invariant():
    k = FourVector.on_shell((0.3, 0.1, 0.0), 1.0)
    assert np.allclose(K_vector(k, k, 1.0).as_array(), 2.0 * k.as_array(), rtol=1e-15)
    assert K_invariant(k, k, 1.0) == pytest.approx(-4.0, rel=1e-14)

    rest = FourVector.on_shell((0.0, 0.0, 0.0), 1.0)
    moving = FourVector.on_shell((0.8, 0.0, 0.0), 1.0)
    w2 = math.sqrt(1.64)
    assert K_invariant(rest, moving, 1.0) == pytest.approx(2.0 * (-w2) - (w2 + 1.0 / w2), rel=1e-14)

    lam = LorentzBoost(velocity=(0.3, 0.0, 0.0))
    boosted = [boost_vector(lam, v) for v in (rest, moving)]
    assert abs(K_invariant(*boosted, 1.0) - K_invariant(rest, moving, 1.0)) > 1e-3


def test_K_vector_rejects_off_shell():
    with pytest.raises(ParameterError):
        K_vector(FourVector.from_array([2.0, 0.0, 0.0, 0.0]), FourVector.on_shell((0.1, 0.0, 0.0), 1.0), 1.0)


def test_boost():
    f = _field((1.0, (0.0, 0.0, 0.0), 1))
    assert boost(f, LorentzBoost()).modes == f.modes
    moved = boost(f, LorentzBoost(velocity=(0.6, 0.0, 0.0)))
    assert moved.modes[0].wavevec[0] == pytest.approx(-0.75, rel=1e-14)
    assert omega(moved.modes[0].wavevec, 1.0) == pytest.approx(1.25, rel=1e-14)
    assert not moved.boxed


@pytest.mark.parametrize("velocity", [(0.6, 0.0, 0.0), (0.1, -0.3, 0.5)])
def test_boost_preserves_the_metric(velocity):
    assert np.array_equal(ETA, np.diag([-1.0, 1.0, 1.0, 1.0]))
    lam = LorentzBoost(velocity=velocity).matrix()
    assert np.allclose(lam.T @ ETA @ lam, ETA, rtol=0.0, atol=1e-14)


def test_boost_rejects_superluminal():
    with pytest.raises(ValueError, match="subluminal"):
        LorentzBoost(velocity=(0.8, 0.7, 0.0))


def test_boost_is_a_scalar_transformation(mixed_four_mode):
    lam = LorentzBoost(velocity=(0.4, -0.2, 0.1))
    moved = boost(mixed_four_mode, lam)
    for x in _points(20):
        assert abs(eval_field(moved, boost_point(lam, x)) - eval_field(mixed_four_mode, x)) < 1e-12


@pytest.mark.parametrize("velocity", [(0.5, 0.0, 0.0), (0.3, 0.4, -0.2), (0.0, 0.0, 0.8)])
def test_J_is_a_four_vector(mixed_four_mode, params, velocity):
    lam = LorentzBoost(velocity=velocity)
    moved = boost(mixed_four_mode, lam)
    for x in _points(8):
        lhs = eval_J(moved, params, boost_point(lam, x)).as_array()
        rhs = boost_vector(lam, eval_J(mixed_four_mode, params, x)).as_array()
        assert max_rel(lhs, rhs) < 1e-12


def test_script_current_is_not_a_four_vector(two_mode, params):
    lam = LorentzBoost(velocity=(0.5, 0.0, 0.0))
    moved = boost(two_mode, lam)
    worst = max(
        max_rel(
            eval_J_script(moved, params, boost_point(lam, x)).as_array(),
            boost_vector(lam, eval_J_script(two_mode, params, x)).as_array(),
        )
        for x in _points(8)
    )
    assert worst > 1e-3


def test_decompose_J(mixed_four_mode, params):
    positive = energy_project(mixed_four_mode, 1)
    for x in _points(5):
        _, im = decompose_J(positive, params, x)
        assert np.max(np.abs(im.as_array())) < 1e-14
        re, im = decompose_J(mixed_four_mode, params, x)
        assert max_rel(re.as_array() + 1j * im.as_array(), eval_J(mixed_four_mode, params, x).as_array()) < 1e-12


def test_real_field_current_is_independent_of_a():
    c, k = 0.6 + 0.3j, (0.2, 0.1, 0.0)
    real_field = _field((c, k, 1), (c.conjugate(), (-k[0], -k[1], -k[2]), -1))
    for x in _points(5):
        j1 = eval_J(real_field, InnerParams(a=0.2), x).as_array()
        j2 = eval_J(real_field, InnerParams(a=-0.7), x).as_array()
        assert max_rel(j1, j2) < 1e-12
        assert np.max(np.abs(j1.imag)) < 1e-14


def test_box_inner_product_matches_grid(mixed_four_mode, params):
    lat = Lattice(dims=1, points=64, box_length=32.0)
    rest = box_inner_product(mixed_four_mode, params, dims=1)
    grid = ip_a(sample(mixed_four_mode, lat), sample(mixed_four_mode, lat), params)
    assert grid.real == pytest.approx(rest, rel=1e-12)


@pytest.mark.parametrize("velocity", [(0.6, 0.0, 0.0), (-0.35, 0.0, 0.0), (0.2, 0.5, 0.0)])
def test_boosted_slice_plus_strip_is_the_rest_charge(mixed_four_mode, params, velocity):
    lam = LorentzBoost(velocity=velocity)
    rest = box_inner_product(mixed_four_mode, params, dims=1)
    moved = slice_flux(mixed_four_mode, params, lam, dims=1) + strip_flux(mixed_four_mode, params, lam, dims=1)
    assert moved == pytest.approx(rest, rel=1e-12)


def test_boosted_slice_in_two_dimensions(params):
    lat = Lattice(dims=2, points=16, box_length=8.0)
    f = random_mode_field(lat, 1.0, 5, 6)
    lam = LorentzBoost(velocity=(0.3, -0.4, 0.0))
    rest = box_inner_product(f, params, dims=2)
    assert slice_flux(f, params, lam, dims=2) + strip_flux(f, params, lam, dims=2) == pytest.approx(rest, rel=1e-12)


def test_slice_flux_matches_quadrature_of_the_boosted_current(mixed_four_mode, params):
    lam = LorentzBoost(velocity=(0.6, 0.0, 0.0))
    moved = boost(mixed_four_mode, lam)
    nodes, weights = np.polynomial.legendre.leggauss(200)
    xs = 16.0 * (nodes + 1.0)
    total = 0.0
    for x, w in zip(xs, weights, strict=True):
        on_slice = boost_point(lam, SpacetimePoint(x0=0.6 * float(x), xvec=(float(x), 0.0, 0.0)))
        assert abs(on_slice.x0) < 1e-12
        total += w * eval_J(moved, params, SpacetimePoint(xvec=on_slice.xvec)).components[0].real
    total *= 16.0 / lam.gamma
    assert slice_flux(mixed_four_mode, params, lam, dims=1) == pytest.approx(total, rel=1e-11)


def test_boosted_slice_alone_differs_from_the_rest_charge(mixed_four_mode, params):
    lam = LorentzBoost(velocity=(0.6, 0.0, 0.0))
    rest = box_inner_product(mixed_four_mode, params, dims=1)
    assert abs(slice_flux(mixed_four_mode, params, lam, dims=1) - rest) > 1e-6 * abs(rest)
    assert abs(strip_flux(mixed_four_mode, params, lam, dims=1)) > 1e-6 * abs(rest)
    assert strip_flux(mixed_four_mode, params, LorentzBoost(), dims=1) == 0.0


def test_slice_flux_preconditions(mixed_four_mode, params):
    lam = LorentzBoost(velocity=(0.6, 0.0, 0.0))
    with pytest.raises(ParameterError):
        slice_flux(boost(mixed_four_mode, lam), params, lam, dims=1)
    off_axis = mixed_four_mode.with_modes([ModeSpec(amplitude=1.0, wavevec=(0.0, 0.19634954084936207, 0.0))])
    with pytest.raises(ParameterError):
        strip_flux(off_axis, params, lam, dims=1)
    assert slice_flux(ModeField.empty(1.0, 32.0), params, lam, dims=1) == 0.0
