import numpy as np
import pytest
from conftest import A_VALUES, max_rel

from kg_currents.core.errors import ParameterError
from kg_currents.experiments.fixtures import load_fixture
from kg_currents.physics.currents import (
    continuity_residual,
    covariance_experiment,
    current_J,
    current_J_script,
    decompose_J_grid,
    default_sample_points,
    density_views,
    divergence_field,
    nonrel_limit_scan,
    probability_identity,
)
from kg_currents.physics.hilbert_space import ip_a, rho_a
from kg_currents.physics.mode_engine import (
    LorentzBoost,
    ModeField,
    ModeSpec,
    SpacetimePoint,
    div_J_script,
    energy_project,
    eval_J,
)
from kg_currents.physics.params import InnerParams
from kg_currents.physics.spectral_grid import GridState, Lattice, sample

P0 = InnerParams()


def _site_points(lattice, x0=0.0):
    (xs,) = lattice.coordinates()
    return [SpacetimePoint(x0=x0, xvec=(float(x), 0.0, 0.0)) for x in xs]


def test_rest_mode_current(lattice_1d):
    f = ModeField(mass=1.0, box_length=32.0, modes=(ModeSpec(amplitude=1.0),))
    j = current_J(sample(f, lattice_1d), P0)
    assert np.allclose(j[0], 1.0, rtol=0.0, atol=1e-14)
    for mu in (1, 2, 3):
        assert np.max(np.abs(j[mu])) < 1e-14


def test_mixed_sector_current_is_complex(mixed_four_mode, lattice_1d, params):
    j = current_J(sample(mixed_four_mode, lattice_1d), params)
    assert np.max(np.abs(j[0].imag)) > 1e-3
    re, mod = density_views(j)
    assert np.all(mod >= np.abs(re))


@pytest.mark.parametrize("form", ["split", "covariant"])
def test_grid_current_matches_mode_oracle(two_mode, mixed_four_mode, lattice_1d, params, form):
    for f in (two_mode, mixed_four_mode):
        j = current_J(sample(f, lattice_1d, x0=0.3), params, form=form).as_array()
        expected = np.array([eval_J(f, params, x).as_array() for x in _site_points(lattice_1d, 0.3)]).T
        assert max_rel(j, expected) < 1e-11


def test_current_forms_agree(make_state, lattice_2d):
    p = InnerParams(a=-0.4, kappa=0.7)
    s = make_state(seed=11, lattice=lattice_2d, mode_count=6)
    assert max_rel(current_J(s, p, "split").as_array(), current_J(s, p, "covariant").as_array()) < 1e-11
    with pytest.raises(ParameterError):
        current_J(s, p, "other")  # type: ignore[arg-type]


@pytest.mark.parametrize("a", A_VALUES)
def test_probability_identity(make_state, a):
    p = InnerParams(a=a, kappa=1.2)
    s = make_state(seed=21, mode_count=6)
    rho_total, j0_total, ip = probability_identity(s, p)
    assert rho_total == pytest.approx(ip.real, rel=1e-12)
    assert j0_total.real == pytest.approx(ip.real, rel=1e-12)
    assert abs(j0_total.imag) <= 1e-12 * ip.real


@pytest.mark.parametrize("a", [-0.5, 0.0, 0.7])
def test_script_density_is_rho_a(make_state, a):
    p = InnerParams(a=a, kappa=1.3)
    for seed in range(20):
        s = make_state(seed=seed)
        assert max_rel(current_J_script(s, p)[0], rho_a(s, p)) < 1e-12


def test_script_current_scales_for_self_conjugate_states(make_state):
    s = make_state(seed=4, eps=1)
    base = current_J_script(s, P0).as_array()
    scaled = current_J_script(s, P0.with_a(0.3)).as_array()
    assert max_rel(scaled, 1.3 * base) < 1e-12


def test_script_current_integrates_to_the_inner_product(make_state):
    p = InnerParams(a=0.25)
    s = make_state(seed=17)
    total = s.lattice.cell_volume * float(np.sum(current_J_script(s, p)[0]))
    assert total == pytest.approx(ip_a(s, s, p).real, rel=1e-12)


def test_decompose_grid(mixed_four_mode, lattice_1d, params):
    s = sample(mixed_four_mode, lattice_1d, x0=-0.6)
    re, im = decompose_J_grid(s, params)
    j = current_J(s, params)
    assert max_rel(re.as_array() + 1j * im.as_array(), j.as_array()) < 1e-11
    pure = sample(energy_project(mixed_four_mode, -1), lattice_1d)
    _, im_pure = decompose_J_grid(pure, params)
    assert im_pure.max_abs() <= 1e-11 * current_J(pure, params).max_abs()


@pytest.mark.parametrize("seed", range(5))
def test_continuity_of_J(make_state, lattice_2d, seed):
    p = InnerParams(a=0.5, kappa=0.9)
    assert continuity_residual(make_state(seed=seed), p) <= 1e-8
    assert continuity_residual(make_state(seed=seed, lattice=lattice_2d), p) <= 1e-8


@pytest.mark.parametrize("descriptor", ["1,256,64.0", "3,32,16.0"])
@pytest.mark.parametrize("seed", range(20))
def test_continuity_of_J_on_acceptance_lattices(make_state, descriptor, seed):
    p = InnerParams(a=-0.4, kappa=1.1)
    s = make_state(seed=(seed, 7), mode_count=6, lattice=Lattice.parse(descriptor))
    assert continuity_residual(s, p) <= 1e-8


def test_script_continuity_of_single_mode(lattice_1d, params):
    f = ModeField(mass=1.0, box_length=32.0, modes=(ModeSpec(amplitude=0.7j, wavevec=(0.39269908169872414, 0.0, 0.0)),))
    assert continuity_residual(sample(f, lattice_1d), params, which="script") <= 1e-8


def test_script_divergence_matches_mode_engine(two_mode, lattice_1d, params):
    grid = divergence_field(sample(two_mode, lattice_1d), params, which="script")
    closed = [div_J_script(two_mode, params, x) for x in _site_points(lattice_1d)]
    assert max_rel(grid, closed) < 1e-6
    assert continuity_residual(sample(two_mode, lattice_1d), params, which="script") > 1e-6


def test_continuity_edge_cases(lattice_1d, make_state):
    zero = GridState.zeros(lattice_1d, 1.0)
    assert continuity_residual(zero, P0) == 0.0
    with pytest.raises(ParameterError):
        divergence_field(make_state(seed=0), P0, h=0.0)


@pytest.mark.parametrize("velocity", [(0.5, 0.0, 0.0), (0.2, -0.3, 0.4)])
def test_J_covariance(mixed_four_mode, params, velocity):
    rows = covariance_experiment(mixed_four_mode, params, LorentzBoost(velocity=velocity), default_sample_points(32.0, 12))
    assert len(rows) == 12
    for row in rows:
        assert row.defect_J <= 1e-12 * row.scale_J


def test_script_covariance_depends_on_frequency_ratio(two_mode, params):
    points = default_sample_points(32.0, 12)
    rows = covariance_experiment(two_mode, params, LorentzBoost(velocity=(0.5, 0.0, 0.0)), points)
    assert max(r.defect_script / r.scale_script for r in rows) > 1e-3
    degenerate = load_fixture("degenerate_two_mode")
    rows = covariance_experiment(degenerate, params, LorentzBoost(velocity=(0.0, 0.5, 0.0)), points)
    for row in rows:
        assert row.defect_script <= 1e-12 * row.scale_script


def test_nonrel_limit(two_mode):
    p = InnerParams.nonrelativistic(0.3)
    scan = nonrel_limit_scan(two_mode, p, [2.0, 4.0, 8.0, 16.0, 32.0])
    deviations = [r.deviation_J for r in scan.rows]
    assert all(later < earlier for earlier, later in zip(deviations, deviations[1:], strict=False))
    assert scan.slope_J == pytest.approx(-2.0, abs=0.1)
    assert scan.slope_script == pytest.approx(-2.0, abs=0.1)
    assert scan.rows[-1].ratio_J == pytest.approx(1.0, abs=1e-2)


def test_nonrel_limit_negative_control(two_mode):
    scan = nonrel_limit_scan(two_mode, InnerParams(a=0.5, kappa=1.0), [2.0, 32.0])
    assert scan.rows[-1].ratio_J == pytest.approx(1.5, rel=1e-2)
    assert scan.rows[-1].deviation_J > 0.4


def test_nonrel_limit_rejects_bad_input(two_mode, mixed_four_mode):
    with pytest.raises(ParameterError):
        nonrel_limit_scan(mixed_four_mode, P0, [2.0, 4.0])
    with pytest.raises(ParameterError):
        nonrel_limit_scan(two_mode, P0, [4.0])
    with pytest.raises(ParameterError):
        nonrel_limit_scan(two_mode, P0, [0.5, 4.0])
