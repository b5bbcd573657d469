"""Newton-Wigner 型局域态, 离散位置基与位置 / 动量算符"""

from __future__ import annotations

import math
import warnings
from typing import Literal

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict
from scipy.integrate import IntegrationWarning, quad

from kg_currents.core.constants import BOUNDARY_FRACTION, BOUNDARY_NEGLIGIBLE, MAX_DENSE_POINTS, NW_QUADRATURE_TOLERANCE
from kg_currents.core.errors import BoundarySupportError, ParameterError, QuadratureError
from kg_currents.physics.hilbert_space import TwoComponentVector, _check_time, ip_a, map_U_a, map_U_inverse
from kg_currents.physics.mode_engine import SpacetimePoint, Vec3
from kg_currents.physics.params import InnerParams
from kg_currents.physics.spectral_grid import (
    GridState,
    Lattice,
    _multiplier,
    apply_momentum_multiplier,
)
from kg_currents.physics.special import bessel_K, gamma_fn, gamma_quarter

# ∫₀^∞ √k {sin, cos}(wk) dk 的 Abel 正则值 Γ(3/2){sin, cos}(3π/4)/w^{3/2}
_ABEL_SQRT = gamma_fn(1.5) * math.sqrt(0.5)


class LocalizedStateSpec(BaseModel):
    """ψ^{(ε,y⃗)}: 电荷宇称 ε, 中心 y⃗, 参考时间 x⁰₀"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    eps: Literal[1, -1] = 1
    center: Vec3 = (0.0, 0.0, 0.0)
    x0_0: float = 0.0
    params: InnerParams = InnerParams()


def _distance(spec: LocalizedStateSpec, xvec: Vec3) -> float:
    r = math.dist(spec.center, xvec)
    if r == 0.0:
        raise ParameterError("closed form is singular at the center")
    return r


def nw_closed_form(spec: LocalizedStateSpec, xvec: Vec3) -> float:
    """x⁰ = x⁰₀ 处 √(M/κ)·[2^{3/4}π^{3/2}Γ(1/4)]^{−1}·(M/r)^{5/4}·K_{5/4}(Mr), 与 ε 无关"""
    r = _distance(spec, xvec)
    m, kappa = spec.params.mass, spec.params.kappa
    norm = 1.0 / (2.0**0.75 * math.pi**1.5 * gamma_quarter())
    return math.sqrt(m / kappa) * norm * (m / r) ** 1.25 * bessel_K(1.25, m * r)


def _qawf(fn, w: float, kind: Literal["sin", "cos"]) -> tuple[float, float]:  # noqa: ANN001
    """∫₀^∞ fn(k)·{sin, cos}(wk) dk, w ≠ 0"""
    if w == 0.0:
        raise QuadratureError("Fourier weight frequency vanishes (r = |x⁰−x⁰₀|)")
    sign = 1.0 if w > 0.0 or kind == "cos" else -1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, err = quad(fn, 0.0, np.inf, weight=kind, wvar=abs(w), epsabs=1e-15, limlst=200, limit=500)
    return sign * value, err


def _abel_sqrt(w: float, kind: Literal["sin", "cos"]) -> float:
    if kind == "sin":
        return math.copysign(_ABEL_SQRT, w) / abs(w) ** 1.5
    return -_ABEL_SQRT / abs(w) ** 1.5


def nw_quadrature(spec: LocalizedStateSpec, x: SpacetimePoint) -> complex:
    """√(M/κ)/(2π²r)·∫₀^∞ k(k²+M²)^{−1/4}e^{−iεΔω}sin(rk) dk

    发散尾部 √k·e^{−iεΔk} 以 Abel 正则值加回, 余项用 Fourier 权重积分 (QAWF).
    """
    r = _distance(spec, x.xvec)
    m, kappa, eps = spec.params.mass, spec.params.kappa, spec.eps
    delta = x.x0 - spec.x0_0

    def remainder(k: float) -> complex:
        w = math.sqrt(k * k + m * m)
        return k / math.sqrt(w) * complex(math.cos(eps * delta * (w - k)), -math.sin(eps * delta * (w - k))) - math.sqrt(k)

    # e^{−iεΔk}sin(rk) = ½[sin(w₊k)+sin(w₋k)] − (i/2)[cos(w₋k)−cos(w₊k)]
    w_plus, w_minus = r + eps * delta, r - eps * delta
    re_part, im_part = (lambda k: remainder(k).real), (lambda k: remainder(k).imag)

    total = 0j
    abel = 0j
    err_total = 0.0
    for w, coeff, kind in ((w_plus, 0.5, "sin"), (w_minus, 0.5, "sin"), (w_minus, -0.5j, "cos"), (w_plus, 0.5j, "cos")):
        if delta == 0.0 and kind == "cos":
            continue
        v_re, e_re = _qawf(re_part, w, kind)
        v_im, e_im = (0.0, 0.0) if delta == 0.0 else _qawf(im_part, w, kind)
        total += coeff * complex(v_re, v_im)
        abel += coeff * _abel_sqrt(w, kind)
        err_total += abs(coeff) * (e_re + e_im)

    integral = total + abel
    allowed = NW_QUADRATURE_TOLERANCE * max(abs(integral), abs(abel))
    if not math.isfinite(abs(integral)) or err_total > allowed:
        raise QuadratureError("radial Newton-Wigner integral", error=err_total, tolerance=allowed)
    logger.debug("nw_quadrature: Mr={:.3f} delta={} err={:.2e}", m * r, delta, err_total)
    return math.sqrt(m / kappa) / (2.0 * math.pi**2 * r) * integral


# ---------------------------------------------------------------- 离散位置基


def localized_basis_grid(
    lattice: Lattice,
    params: InnerParams,
    eps: int,
    y: Vec3 | tuple[float, ...],
    x0_0: float,
    x0: float | None = None,
) -> GridState:
    """ψ = √(M/κ)D^{−1/4}e^{−iε(x⁰−x⁰₀)D^{1/2}}|y⃗⟩, |y⃗⟩ 在格点 y⃗ 处取 (N/L)^d"""
    if eps not in (1, -1):
        raise ParameterError(f"charge parity must be ±1: eps={eps}")
    site = lattice.site_index(tuple(y))
    t = x0_0 if x0 is None else x0
    delta_fn = np.zeros(lattice.shape, dtype=complex)
    delta_fn[site] = 1.0 / lattice.cell_volume
    w = _multiplier(lattice, params.mass, 0.5)
    psi_k = math.sqrt(params.mass / params.kappa) * np.fft.fftn(delta_fn) / np.sqrt(w) * np.exp(-1j * eps * (t - x0_0) * w)
    return GridState(
        lattice=lattice,
        mass=params.mass,
        x0=t,
        psi=np.fft.ifftn(psi_k),
        psidot=np.fft.ifftn(-1j * eps * w * psi_k),
    )


def resolve_identity(s: GridState, params: InnerParams, x0_0: float) -> GridState:
    """Σ_{ε,y⃗} (L/N)^d ψ^{(ε,y⃗)}(ψ^{(ε,y⃗)}, s)₀, 逐个基态显式求和"""
    _check_time(s, x0_0)
    lat = s.lattice
    if lat.size > MAX_DENSE_POINTS:
        raise ParameterError(f"explicit basis sum is limited to {MAX_DENSE_POINTS} sites: {lat.size}")
    p0 = params.with_a(0.0)
    total = GridState.zeros(lat, s.mass, x0_0)
    coords = lat.coordinates()
    for eps in (1, -1):
        for idx in np.ndindex(*lat.shape):
            y = tuple(float(c[idx]) for c in coords)
            basis = localized_basis_grid(lat, p0, eps, y, x0_0)
            total = total + (lat.cell_volume * ip_a(basis, s, p0)) * basis
    return total


# ---------------------------------------------------------------- 位置与动量


def _boundary_ratio(v: TwoComponentVector) -> float:
    lat = v.lattice
    near = np.zeros(lat.shape, dtype=bool)
    for c in lat.coordinates():
        near |= (c < BOUNDARY_FRACTION * lat.box_length) | (c > (1.0 - BOUNDARY_FRACTION) * lat.box_length)
    mag = np.maximum(np.abs(v.xi1), np.abs(v.xi2))
    peak = float(np.max(mag))
    return float(np.max(mag[near])) / peak if peak > 0.0 else 0.0


def apply_position(s: GridState, params: InnerParams, x0_0: float, axis: int) -> GridState:
    """X = U⁻¹(x̂⊗σ₀)U; 坐标乘法作用于 Uψ, 其分量须在边界附近可忽略"""
    lat = s.lattice
    if not 0 <= axis < lat.dims:
        raise ParameterError(f"axis {axis} outside a {lat.dims}d lattice")
    p0 = params.with_a(0.0)
    v = map_U_a(s, p0, x0_0)
    ratio = _boundary_ratio(v)
    if ratio > BOUNDARY_NEGLIGIBLE:
        raise BoundarySupportError(ratio=ratio)
    x = lat.coordinates()[axis]
    return map_U_inverse(TwoComponentVector(lat, x * v.xi1, x * v.xi2), p0, x0_0)


def apply_momentum(s: GridState, axis: int) -> GridState:
    """P = −i∇, 谱乘子 k"""
    lat = s.lattice
    if not 0 <= axis < lat.dims:
        raise ParameterError(f"axis {axis} outside a {lat.dims}d lattice")
    k = lat.wavevectors()[axis]
    return s.replace(psi=apply_momentum_multiplier(s.psi, lat, k), psidot=apply_momentum_multiplier(s.psidot, lat, k))


def newton_wigner_initial(s: GridState, axis: int) -> np.ndarray:
    """𝒳ψ = x̂ψ + i·k/(2(k²+M²))ψ"""
    lat = s.lattice
    k = lat.wavevectors()[axis]
    symbol = 1j * k / (2.0 * (lat.k_squared() + s.mass**2))
    return lat.coordinates()[axis] * s.psi + apply_momentum_multiplier(s.psi, lat, symbol)


def position_expectation(s: GridState, params: InnerParams, x0_0: float, axis: int) -> float:
    """(ψ, Xψ)₀ / (ψ, ψ)₀"""
    p0 = params.with_a(0.0)
    norm = ip_a(s, s, p0).real
    if norm == 0.0:
        raise ParameterError("position expectation of the zero state")
    return ip_a(s, apply_position(s, params, x0_0, axis), p0).real / norm
