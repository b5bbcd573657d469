"""修正 Bessel K 与 Gamma 函数的积分表示, 以及独立的级数 oracle"""

from __future__ import annotations

import math
import warnings
from functools import lru_cache

from loguru import logger
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from kg_currents.core.constants import BESSEL_TRUNCATION, QUADRATURE_RTOL
from kg_currents.core.errors import ParameterError, QuadratureError

_LOG_TRUNCATION = -math.log(BESSEL_TRUNCATION)


def _checked_quad(fn, a: float, b: float, what: str, **kwargs) -> float:  # noqa: ANN001
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, err = quad(fn, a, b, epsabs=0.0, epsrel=QUADRATURE_RTOL, limit=400, **kwargs)
    if not math.isfinite(value) or err > 1e-10 * max(abs(value), 1e-300):
        raise QuadratureError(f"{what} quadrature", error=err, tolerance=1e-10 * abs(value))
    return value


def bessel_K(nu: float, z: float) -> float:
    """K_ν(z) = ∫₀^∞ e^{−z cosh t}cosh(νt) dt

    被积函数按峰值 g* = max_t [νt − z(cosh t − 1)] 归一, 截断在 g(t) ≤ g* − ln(1e18).
    """
    if not math.isfinite(z) or z <= 0.0:
        raise ParameterError(f"bessel_K needs z > 0: z={z}")
    nu = abs(nu)

    def g(t: float) -> float:
        return nu * t - z * (math.cosh(t) - 1.0)

    t_peak = math.asinh(nu / z)
    g_peak = g(t_peak)

    t_hi = max(2.0 * t_peak, 1.0)
    while g(t_hi) > g_peak - _LOG_TRUNCATION:
        t_hi *= 2.0
    t_max = brentq(lambda t: g(t) - (g_peak - _LOG_TRUNCATION), t_peak, t_hi, xtol=1e-12)
    logger.debug("bessel_K truncation: nu={} z={} t_max={:.4f}", nu, z, t_max)

    def integrand(t: float) -> float:
        # cosh(νt)e^{−z(cosh t−1)} / e^{g*}
        return 0.5 * (math.exp(g(t) - g_peak) + math.exp(-2.0 * nu * t + g(t) - g_peak))

    points = [t_peak] if 0.0 < t_peak < t_max else None
    value = _checked_quad(integrand, 0.0, t_max, "bessel_K", points=points)
    return value * math.exp(g_peak - z)


def gamma_fn(x: float) -> float:
    """Γ(x) = ∫₀^∞ t^{x−1}e^{−t} dt, x > 0; [0,1] 段用代数端点权重"""
    if not math.isfinite(x) or x <= 0.0:
        raise ParameterError(f"gamma_fn needs x > 0: x={x}")
    head = _checked_quad(lambda t: math.exp(-t), 0.0, 1.0, "gamma head", weight="alg", wvar=(x - 1.0, 0.0))
    tail = _checked_quad(lambda t: t ** (x - 1.0) * math.exp(-t), 1.0, math.inf, "gamma tail")
    return head + tail


@lru_cache(maxsize=8)
def gamma_quarter() -> float:
    """Γ(1/4)"""
    return gamma_fn(0.25)


def gamma_reflected(x: float) -> float:
    """Γ(x) 对非整数 x < 0 用反射 Γ(x) = π / (sin(πx)·Γ(1−x))"""
    if x > 0.0:
        return gamma_fn(x)
    if abs(x - round(x)) < 1e-12:
        raise ParameterError(f"gamma has a pole at x={x}")
    return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))


def _bessel_I_series(nu: float, z: float) -> float:
    """Σ_k (z/2)^{2k+ν} / (k!·Γ(k+ν+1)), 逐项递推"""
    half = 0.5 * z
    term = half**nu / gamma_reflected(nu + 1.0)
    terms = [term]
    k = 0
    while k <= 5 or abs(term) >= 1e-18 * abs(math.fsum(terms)):
        k += 1
        if k > 500:
            raise QuadratureError("bessel I series did not converge")
        term *= half * half / (k * (k + nu))
        terms.append(term)
    return math.fsum(terms)


def bessel_k_series(nu: float, z: float) -> float:
    """K_ν(z) = (π/2)(I_{−ν} − I_ν)/sin(νπ), ν 非整数"""
    if not math.isfinite(z) or z <= 0.0:
        raise ParameterError(f"bessel_k_series needs z > 0: z={z}")
    if abs(nu - round(nu)) < 1e-12:
        raise ParameterError(f"series oracle is singular at integer order: nu={nu}")
    return 0.5 * math.pi * (_bessel_I_series(-nu, z) - _bessel_I_series(nu, z)) / math.sin(nu * math.pi)
