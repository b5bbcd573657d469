"""内积族 (·,·)_a, 映射 U_a / U⁻¹, 位置波函数与概率密度"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from kg_currents.core.errors import LatticeMismatchError, ParameterError
from kg_currents.physics.params import InnerParams
from kg_currents.physics.spectral_grid import (
    ComplexArray,
    GridState,
    Lattice,
    _multiplier,
    apply_D_power,
    charge_conjugate_grid,
    evolve,
    pairing,
    require_compatible,
    require_shape,
    sector_split,
)


@dataclass(frozen=True, eq=False)
class TwoComponentVector:
    """ξ = (ξ₁, ξ₂) ∈ L² ⊕ L²"""

    lattice: Lattice
    xi1: ComplexArray
    xi2: ComplexArray

    def __post_init__(self) -> None:
        require_shape(self.xi1, self.lattice, "xi1")
        require_shape(self.xi2, self.lattice, "xi2")

    def inner(self, other: TwoComponentVector) -> complex:
        if other.lattice != self.lattice:
            raise LatticeMismatchError("two-component vectors live on different lattices")
        return pairing(self.xi1, other.xi1, self.lattice) + pairing(self.xi2, other.xi2, self.lattice)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """f(ε, x⃗), 记录构造所用的 x⁰₀"""

    eps: int
    values: ComplexArray
    x0_0: float
    lattice: Lattice

    def norm_squared(self) -> float:
        return pairing(self.values, self.values, self.lattice).real


def _check_params(s: GridState, params: InnerParams) -> None:
    if not math.isclose(s.mass, params.mass, rel_tol=1e-14):
        raise ParameterError(f"state mass {s.mass} differs from params mass {params.mass}")


def _check_time(s: GridState, x0_0: float) -> None:
    if not math.isclose(s.x0, x0_0, rel_tol=1e-14, abs_tol=1e-12):
        raise LatticeMismatchError(f"state is at x0={s.x0}, expected x0_0={x0_0}; evolve it first")


# ---------------------------------------------------------------- 内积


def ip_kg(s1: GridState, s2: GridState, g: float) -> complex:
    """ig[⟨ψ₁|ψ̇₂⟩ − ⟨ψ̇₁|ψ₂⟩]"""
    require_compatible(s1, s2)
    lat = s1.lattice
    return 1j * g * (pairing(s1.psi, s2.psidot, lat) - pairing(s1.psidot, s2.psi, lat))


def ip_plain(s1: GridState, s2: GridState) -> complex:
    """(1/2M)[⟨ψ₁|D^{1/2}ψ₂⟩ + ⟨ψ̇₁|D^{−1/2}ψ̇₂⟩]"""
    require_compatible(s1, s2)
    lat, m = s1.lattice, s1.mass
    return (
        pairing(s1.psi, apply_D_power(s2.psi, lat, m, 0.5), lat)
        + pairing(s1.psidot, apply_D_power(s2.psidot, lat, m, -0.5), lat)
    ) / (2.0 * m)


def ip_a(s1: GridState, s2: GridState, params: InnerParams) -> complex:
    """(κ/2M){⟨ψ₁|D^{1/2}ψ₂⟩ + ⟨ψ̇₁|D^{−1/2}ψ̇₂⟩ + ia[⟨ψ₁|ψ̇₂⟩ − ⟨ψ̇₁|ψ₂⟩]}"""
    require_compatible(s1, s2)
    _check_params(s1, params)
    lat, m = s1.lattice, s1.mass
    plain = pairing(s1.psi, apply_D_power(s2.psi, lat, m, 0.5), lat) + pairing(
        s1.psidot, apply_D_power(s2.psidot, lat, m, -0.5), lat
    )
    kg = pairing(s1.psi, s2.psidot, lat) - pairing(s1.psidot, s2.psi, lat)
    return params.kappa / (2.0 * m) * (plain + 1j * params.a * kg)


def ip_a_at(s1: GridState, s2: GridState, params: InnerParams) -> complex:
    """先把 s₂ 演化到 s₁ 的时间"""
    require_compatible(s1, s2, check_time=False)
    return ip_a(s1, evolve(s2, s1.x0 - s2.x0).replace(x0=s1.x0), params)


def norm_a(s: GridState, params: InnerParams) -> float:
    return math.sqrt(max(ip_a(s, s, params).real, 0.0))


def normalize(s: GridState, params: InnerParams) -> GridState:
    n = norm_a(s, params)
    if n == 0.0:
        raise ParameterError("cannot normalize the zero state")
    return s * (1.0 / n)


# ---------------------------------------------------------------- U_a, U⁻¹


def map_U_a(s: GridState, params: InnerParams, x0_0: float) -> TwoComponentVector:
    """ξ₁ = ½√(κ/M)√(1+a)D^{1/4}(ψ+ψ_c), ξ₂ = ½√(κ/M)√(1−a)D^{1/4}(ψ−ψ_c)"""
    _check_params(s, params)
    _check_time(s, x0_0)
    c = charge_conjugate_grid(s)
    pref = 0.5 * math.sqrt(params.kappa / params.mass)
    lat, m = s.lattice, s.mass
    return TwoComponentVector(
        lattice=lat,
        xi1=pref * math.sqrt(1.0 + params.a) * apply_D_power(s.psi + c.psi, lat, m, 0.25),
        xi2=pref * math.sqrt(1.0 - params.a) * apply_D_power(s.psi - c.psi, lat, m, 0.25),
    )


def map_U_inverse(v: TwoComponentVector, params: InnerParams, x0_0: float, x0: float | None = None) -> GridState:
    """ψ(x⁰) = √(M/κ)D^{−1/4}[e^{−iΔD^{1/2}}ξ₁' + e^{iΔD^{1/2}}ξ₂'], ξ' = ξ/√(1±a)"""
    t = x0_0 if x0 is None else x0
    lat, m = v.lattice, params.mass
    w = _multiplier(lat, m, 0.5)
    pref = math.sqrt(m / params.kappa)
    xi1 = np.fft.fftn(v.xi1) / math.sqrt(1.0 + params.a) * np.exp(-1j * w * (t - x0_0))
    xi2 = np.fft.fftn(v.xi2) / math.sqrt(1.0 - params.a) * np.exp(1j * w * (t - x0_0))
    inv_quarter = pref / np.sqrt(w)
    return GridState(
        lattice=lat,
        mass=m,
        x0=t,
        psi=np.fft.ifftn(inv_quarter * (xi1 + xi2)),
        psidot=np.fft.ifftn(inv_quarter * (-1j * w) * (xi1 - xi2)),
    )


# ---------------------------------------------------------------- 波函数与密度


def wavefunction(s: GridState, eps: int, params: InnerParams, x0_0: float) -> WaveFunction:
    """f_a(ε) = √(κ/M)√(1+εa)·D^{1/4}ψ_ε; a=0 即标准位置波函数"""
    if eps not in (1, -1):
        raise ParameterError(f"charge parity must be ±1: eps={eps}")
    _check_params(s, params)
    _check_time(s, x0_0)
    plus, minus = sector_split(s)
    part = plus if eps == 1 else minus
    pref = math.sqrt(params.kappa / params.mass * (1.0 + eps * params.a))
    return WaveFunction(
        eps=eps,
        values=pref * apply_D_power(part.psi, s.lattice, s.mass, 0.25),
        x0_0=x0_0,
        lattice=s.lattice,
    )


def rho_a(s: GridState, params: InnerParams) -> NDArray[np.float64]:
    """(κ/2M){|D^{1/4}ψ|² + |D^{−1/4}ψ̇|² − 2a·Im[(D^{1/4}ψ)*D^{−1/4}ψ̇]}"""
    _check_params(s, params)
    quarter = apply_D_power(s.psi, s.lattice, s.mass, 0.25)
    inv_quarter_dot = apply_D_power(s.psidot, s.lattice, s.mass, -0.25)
    dens = (
        np.abs(quarter) ** 2
        + np.abs(inv_quarter_dot) ** 2
        - 2.0 * params.a * (np.conj(quarter) * inv_quarter_dot).imag
    )
    return params.kappa / (2.0 * params.mass) * dens


def transport(s: GridState, params: InnerParams) -> GridState:
    """ψ'_a = 𝒰_a^{−1}ψ: 扇区 ε 乘以 √(1+εa)"""
    _check_params(s, params)
    ap, am = params.alpha_plus, params.alpha_minus
    lat, m = s.lattice, s.mass
    return s.replace(
        psi=ap * s.psi + 1j * am * apply_D_power(s.psidot, lat, m, -0.5),
        psidot=-1j * am * apply_D_power(s.psi, lat, m, 0.5) + ap * s.psidot,
    )


def total_probability(s: GridState, params: InnerParams) -> float:
    """∫ρ_a"""
    return float(s.lattice.cell_volume * math.fsum(rho_a(s, params).ravel()))


def charge_Q(s: GridState, g: float | None = None) -> float:
    """Q = ip_kg(s, s, g), 默认 g = 1/(2M)"""
    return ip_kg(s, s, g if g is not None else 1.0 / (2.0 * s.mass)).real


def probability_in_region(s: GridState, params: InnerParams, mask: NDArray[np.bool_]) -> float:
    require_shape(mask, s.lattice, "mask")
    dens = rho_a(s, params)
    return float(s.lattice.cell_volume * math.fsum(dens[np.asarray(mask, dtype=bool)].ravel()))
