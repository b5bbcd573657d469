import math

import pytest

from kg_currents.core.errors import ParameterError
from kg_currents.physics.special import bessel_K, bessel_k_series, gamma_fn, gamma_quarter, gamma_reflected


@pytest.mark.parametrize("z", [0.5, 1.0, 5.0])
def test_half_order_closed_form(z):
    assert bessel_K(0.5, z) * math.exp(z) * math.sqrt(2.0 * z / math.pi) == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize(("nu", "z"), [(1.25, 1.0), (0.3, 2.0), (2.7, 0.05), (1.75, 0.5)])
def test_bessel_K_matches_series(nu, z):
    assert bessel_K(nu, z) == pytest.approx(bessel_k_series(nu, z), rel=1e-10)


def test_bessel_K_is_even_in_order():
    assert bessel_K(-1.25, 3.0) == bessel_K(1.25, 3.0)


@pytest.mark.parametrize("nu", [0.0, 1.25, 3.0])
def test_bessel_K_decreases(nu):
    values = [bessel_K(nu, z) for z in (0.01, 0.1, 1.0, 5.0, 20.0, 50.0)]
    assert all(b < a for a, b in zip(values, values[1:], strict=False))
    assert values[-1] > 0.0


def test_bessel_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        bessel_K(1.0, 0.0)
    with pytest.raises(ParameterError):
        bessel_k_series(1.0, 1.0)
    with pytest.raises(ParameterError):
        bessel_k_series(0.5, -1.0)


def test_gamma():
    assert gamma_quarter() == pytest.approx(3.6256099082219083, rel=1e-10)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-10)
    assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-10)
    with pytest.raises(ParameterError):
        gamma_fn(-0.5)


def test_reflected_gamma():
    assert gamma_reflected(2.5) == pytest.approx(1.329340388179137, rel=1e-10)
    assert gamma_reflected(-0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-10)
    assert gamma_reflected(-1.5) == pytest.approx(4.0 * math.sqrt(math.pi) / 3.0, rel=1e-10)
    for pole in (0.0, -1.0, -3.0):
        with pytest.raises(ParameterError):
            gamma_reflected(pole)
