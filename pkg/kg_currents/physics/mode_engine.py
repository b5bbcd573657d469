"""平面波叠加的解析求值

场、流、散度、boost 等全部由模式求和的闭式微分给出, 作为格点引擎的 oracle.
单位 ħ=c=1, 度规 (−1,1,1,1), 四矢量一律上指标存储.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from kg_currents.core.constants import METRIC_SIGNATURE, ON_SHELL_TOLERANCE
from kg_currents.core.errors import AliasingError, ParameterError
from kg_currents.physics.params import InnerParams, require_mass

ETA = np.diag(METRIC_SIGNATURE)

Vec3 = tuple[float, float, float]


class ModeSpec(BaseModel):
    """单个平面波模式 c·e^{−iεωx⁰}e^{ik·x}"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    amplitude: complex
    wavevec: Vec3 = (0.0, 0.0, 0.0)
    eps: Literal[1, -1] = 1


def _mode_key(m: ModeSpec) -> tuple[int, Vec3]:
    return (-m.eps, m.wavevec)


class ModeField(BaseModel):
    """有限模式叠加; 构造时合并同 (k, ε) 模式并丢弃零振幅"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mass: float
    box_length: float
    modes: tuple[ModeSpec, ...] = ()
    boxed: bool = True

    @model_validator(mode="before")
    @classmethod
    def _merge_modes(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        merged: dict[tuple[Vec3, int], complex] = {}
        for raw in data.get("modes") or ():
            spec = raw if isinstance(raw, ModeSpec) else ModeSpec.model_validate(raw)
            key = (spec.wavevec, spec.eps)
            merged[key] = merged.get(key, 0j) + spec.amplitude
        modes = [ModeSpec(amplitude=c, wavevec=k, eps=e) for (k, e), c in merged.items() if c != 0]
        modes.sort(key=_mode_key)
        return {**data, "modes": tuple(modes)}

    @field_validator("mass")
    @classmethod
    def _check_mass(cls, v: float) -> float:
        return require_mass(v)

    @field_validator("box_length")
    @classmethod
    def _check_length(cls, v: float) -> float:
        if not math.isfinite(v) or v <= 0.0:
            raise ParameterError(f"box length must be positive: L={v}")
        return v

    @model_validator(mode="after")
    def _check_boxed(self) -> ModeField:
        if self.boxed:
            for m in self.modes:
                for k in m.wavevec:
                    n = k * self.box_length / (2.0 * math.pi)
                    if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)):
                        raise AliasingError("boxed mode wavevector is off the box lattice")
        return self

    @classmethod
    def empty(cls, mass: float, box_length: float) -> ModeField:
        return cls(mass=mass, box_length=box_length, modes=())

    def with_modes(self, modes: Sequence[ModeSpec], boxed: bool | None = None) -> ModeField:
        return ModeField(
            mass=self.mass,
            box_length=self.box_length,
            modes=tuple(modes),
            boxed=self.boxed if boxed is None else boxed,
        )

    def __add__(self, other: ModeField) -> ModeField:
        if other.mass != self.mass or other.box_length != self.box_length:
            raise ParameterError("cannot add fields with different mass or box")
        return self.with_modes(self.modes + other.modes, boxed=self.boxed and other.boxed)


class SpacetimePoint(BaseModel):
    """时空点 (x⁰, x⃗)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    x0: float = 0.0
    xvec: Vec3 = (0.0, 0.0, 0.0)

    def as_array(self) -> NDArray[np.float64]:
        return np.array([self.x0, *self.xvec], dtype=float)

    @classmethod
    def from_array(cls, arr: Sequence[float] | NDArray[np.float64]) -> SpacetimePoint:
        v = [float(t) for t in arr]
        return cls(x0=v[0], xvec=(v[1], v[2], v[3]))


class FourVector(BaseModel):
    """上指标四矢量"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    components: tuple[complex, complex, complex, complex]

    @classmethod
    def from_array(cls, arr: Sequence[complex] | NDArray[Any]) -> FourVector:
        c = [complex(t) for t in arr]
        return cls(components=(c[0], c[1], c[2], c[3]))

    @classmethod
    def on_shell(cls, wavevec: Sequence[float], mass: float, eps: int = 1) -> FourVector:
        k = np.asarray(wavevec, dtype=float)
        return cls.from_array([eps * omega(k, mass), *k])

    def as_array(self) -> NDArray[np.complex128]:
        return np.array(self.components, dtype=complex)

    def lower(self) -> NDArray[np.complex128]:
        return ETA @ self.as_array()

    def dot(self, other: FourVector) -> complex:
        """a·b = −a⁰b⁰ + a⃗·b⃗ (无共轭)"""
        return complex(self.lower() @ other.as_array())

    @property
    def real(self) -> FourVector:
        return FourVector.from_array(self.as_array().real)

    @property
    def imag(self) -> FourVector:
        return FourVector.from_array(self.as_array().imag)


class LorentzBoost(BaseModel):
    """速度 β⃗ 的纯 boost"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    velocity: Vec3 = (0.0, 0.0, 0.0)

    @field_validator("velocity")
    @classmethod
    def _check_speed(cls, v: Vec3) -> Vec3:
        if not all(math.isfinite(t) for t in v) or math.fsum(t * t for t in v) >= 1.0:
            raise ParameterError(f"boost must be subluminal: beta={v}")
        return v

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - math.fsum(t * t for t in self.velocity))

    def matrix(self) -> NDArray[np.float64]:
        return lorentz_matrix(self)


def lorentz_matrix(boost_: LorentzBoost) -> NDArray[np.float64]:
    beta = np.asarray(boost_.velocity, dtype=float)
    b2 = float(beta @ beta)
    lam = np.eye(4)
    if b2 == 0.0:
        return lam
    g = boost_.gamma
    lam[0, 0] = g
    lam[0, 1:] = -g * beta
    lam[1:, 0] = -g * beta
    lam[1:, 1:] += (g - 1.0) * np.outer(beta, beta) / b2
    return lam


def boost_point(boost_: LorentzBoost, x: SpacetimePoint) -> SpacetimePoint:
    return SpacetimePoint.from_array(lorentz_matrix(boost_) @ x.as_array())


def boost_vector(boost_: LorentzBoost, v: FourVector) -> FourVector:
    return FourVector.from_array(lorentz_matrix(boost_) @ v.as_array())


def omega(wavevec: Sequence[float] | NDArray[np.float64], mass: float) -> float:
    """ω = √(k²+M²)"""
    m = require_mass(mass)
    k = np.asarray(wavevec, dtype=float)
    return math.sqrt(float(k @ k) + m * m)


# ---------------------------------------------------------------- 模式数组


@dataclass(frozen=True, slots=True)
class _ModeArrays:
    amp: NDArray[np.complex128]
    eps: NDArray[np.float64]
    omega: NDArray[np.float64]
    kmu: NDArray[np.float64]  # (n, 4) 上指标 (εω, k⃗)


def _mode_arrays(f: ModeField) -> _ModeArrays:
    amp = np.array([m.amplitude for m in f.modes], dtype=complex)
    kvec = np.array([m.wavevec for m in f.modes], dtype=float).reshape(-1, 3)
    eps = np.array([m.eps for m in f.modes], dtype=float)
    w = np.sqrt(np.sum(kvec**2, axis=1) + f.mass**2)
    kmu = np.column_stack([eps * w, kvec]) if len(f.modes) else np.zeros((0, 4))
    return _ModeArrays(amp=amp, eps=eps, omega=w, kmu=kmu)


@dataclass(frozen=True, slots=True)
class _Jet:
    value: complex
    grad: NDArray[np.complex128]  # ∂^μ
    hess: NDArray[np.complex128]  # ∂^μ∂_ν

    @property
    def grad_lower(self) -> NDArray[np.complex128]:
        return ETA @ self.grad

    @property
    def box(self) -> complex:
        return complex(np.trace(self.hess))


def _jet(ma: _ModeArrays, x: SpacetimePoint, weights: NDArray[Any] | float = 1.0) -> _Jet:
    """Σ w·c·e^{ik·x} 及其一、二阶导数"""
    xa = x.as_array()
    phase = ma.kmu[:, 1:] @ xa[1:] - ma.kmu[:, 0] * xa[0]
    terms = weights * ma.amp * np.exp(1j * phase)
    ik_up = 1j * ma.kmu
    ik_low = ik_up @ ETA
    return _Jet(
        value=complex(np.sum(terms)),
        grad=terms @ ik_up,
        hess=np.einsum("n,nm,nv->mv", terms, ik_up, ik_low),
    )


# ---------------------------------------------------------------- 场


def eval_field(f: ModeField, x: SpacetimePoint) -> complex:
    ma = _mode_arrays(f)
    xa = x.as_array()
    phase = ma.kmu[:, 1:] @ xa[1:] - ma.kmu[:, 0] * xa[0]
    return complex(np.sum(ma.amp * np.exp(1j * phase)))


def eval_field_gradient(f: ModeField, x: SpacetimePoint) -> NDArray[np.complex128]:
    """∂^μψ, 上指标"""
    return _jet(_mode_arrays(f), x).grad


def charge_conjugate(f: ModeField) -> ModeField:
    """𝒞 = iD^{−1/2}∂₀ 在模式上即乘 ε"""
    return f.with_modes([m.model_copy(update={"amplitude": m.eps * m.amplitude}) for m in f.modes])


def energy_project(f: ModeField, eps: int) -> ModeField:
    if eps not in (1, -1):
        raise ParameterError(f"charge parity must be ±1: eps={eps}")
    return f.with_modes([m for m in f.modes if m.eps == eps])


def foldy_residual(f: ModeField, x: SpacetimePoint) -> float:
    """max_ε |i∂₀ψ_ε − εD^{1/2}ψ_ε|"""
    worst = 0.0
    for eps in (1, -1):
        ma = _mode_arrays(energy_project(f, eps))
        jet = _jet(ma, x)
        half = _jet(ma, x, ma.omega).value
        worst = max(worst, abs(1j * (-jet.grad[0]) - eps * half))
    return worst


def kg_residual_at(f: ModeField, x: SpacetimePoint, h: float | None = None) -> float:
    """二阶差分 Klein-Gordon 残差 (一级 Richardson), 相对 Σ|c|ω²"""
    ma = _mode_arrays(f)
    if not len(f.modes):
        return 0.0
    step = h if h is not None else 1e-2 / f.mass
    xa = x.as_array()

    def _box(hh: float) -> complex:
        center = eval_field(f, x)
        total = 0j
        for mu in range(4):
            e = np.zeros(4)
            e[mu] = hh
            fwd = eval_field(f, SpacetimePoint.from_array(xa + e))
            bwd = eval_field(f, SpacetimePoint.from_array(xa - e))
            total += ETA[mu, mu] * (fwd - 2.0 * center + bwd) / hh**2
        return total - f.mass**2 * center

    res = (4.0 * _box(step / 2.0) - _box(step)) / 3.0
    scale = float(np.sum(np.abs(ma.amp) * ma.omega**2))
    return abs(res) / scale


# ---------------------------------------------------------------- 流


def _prefactor(params: InnerParams) -> float:
    return params.kappa / (2.0 * params.mass)


def _check_mass(f: ModeField, params: InnerParams) -> None:
    if not math.isclose(f.mass, params.mass, rel_tol=1e-14):
        raise ParameterError(f"field mass {f.mass} differs from params mass {params.mass}")


def eval_J(f: ModeField, params: InnerParams, x: SpacetimePoint) -> FourVector:
    """J_a^μ = −(iκ/2M)[ψ*∂^μψ̃_a − (∂^μψ*)ψ̃_a], ψ̃_a = ψ_c + aψ"""
    _check_mass(f, params)
    ma = _mode_arrays(f)
    psi = _jet(ma, x)
    tilde = _jet(ma, x, ma.eps + params.a)
    j = -1j * _prefactor(params) * (np.conj(psi.value) * tilde.grad - np.conj(psi.grad) * tilde.value)
    return FourVector.from_array(j)


def div_J(f: ModeField, params: InnerParams, x: SpacetimePoint) -> complex:
    _check_mass(f, params)
    ma = _mode_arrays(f)
    psi = _jet(ma, x)
    tilde = _jet(ma, x, ma.eps + params.a)
    total = (
        np.conj(psi.grad_lower) @ tilde.grad
        + np.conj(psi.value) * tilde.box
        - np.conj(psi.box) * tilde.value
        - np.conj(psi.grad) @ tilde.grad_lower
    )
    return complex(-1j * _prefactor(params) * total)


def _script_jets(f: ModeField, x: SpacetimePoint) -> tuple[dict[str, _Jet], dict[str, _Jet]]:
    """D^{1/4}u 与 D^{−1/4}v, u, v ∈ {ψ, ψ_c}"""
    ma = _mode_arrays(f)
    up = np.sqrt(ma.omega)
    down = 1.0 / up
    quarter = {"psi": _jet(ma, x, up), "psi_c": _jet(ma, x, ma.eps * up)}
    inv_quarter = {"psi": _jet(ma, x, down), "psi_c": _jet(ma, x, ma.eps * down)}
    return quarter, inv_quarter


_SCRIPT_PAIRS = (("psi", "psi_c", False), ("psi_c", "psi", False), ("psi", "psi", True), ("psi_c", "psi_c", True))


def eval_J_script(f: ModeField, params: InnerParams, x: SpacetimePoint) -> FourVector:
    """𝒥_a^μ = (κ/2M)·Im{z(ψ,ψ_c)+z(ψ_c,ψ)+a[z(ψ,ψ)+z(ψ_c,ψ_c)]}, z(u,v) = (D^{1/4}u)*∂^μD^{−1/4}v"""
    _check_mass(f, params)
    quarter, inv_quarter = _script_jets(f, x)
    z = np.zeros(4, dtype=complex)
    for u, v, weighted in _SCRIPT_PAIRS:
        w = params.a if weighted else 1.0
        z += w * np.conj(quarter[u].value) * inv_quarter[v].grad
    return FourVector.from_array(_prefactor(params) * z.imag)


def div_J_script(f: ModeField, params: InnerParams, x: SpacetimePoint) -> float:
    _check_mass(f, params)
    quarter, inv_quarter = _script_jets(f, x)
    total = 0j
    for u, v, weighted in _SCRIPT_PAIRS:
        w = params.a if weighted else 1.0
        a_u, b_v = quarter[u], inv_quarter[v]
        total += w * (np.conj(a_u.grad_lower) @ b_v.grad + np.conj(a_u.value) * b_v.box)
    return float(_prefactor(params) * total.imag)


def decompose_J(f: ModeField, params: InnerParams, x: SpacetimePoint) -> tuple[FourVector, FourVector]:
    """由 ψ± 计算 Re J 与 Im J"""
    _check_mass(f, params)
    ma = _mode_arrays(f)
    plus = _jet(ma, x, (ma.eps > 0).astype(float))
    minus = _jet(ma, x, (ma.eps < 0).astype(float))
    a = params.a
    cross = np.conj(plus.value) * minus.grad - np.conj(plus.grad) * minus.value
    pref = params.kappa / params.mass
    re = pref * (
        (1.0 + a) * (np.conj(plus.value) * plus.grad).imag
        - (1.0 - a) * (np.conj(minus.value) * minus.grad).imag
        + a * cross.imag
    )
    im = pref * cross.real
    return FourVector.from_array(re), FourVector.from_array(im)


# ---------------------------------------------------------------- 双模式闭式


def _two_positive_modes(f: ModeField) -> tuple[ModeSpec, ModeSpec]:
    if len(f.modes) != 2 or any(m.eps != 1 for m in f.modes):
        raise ParameterError("closed form needs exactly two positive-energy modes")
    return f.modes[0], f.modes[1]


def _cross_phase(m1: ModeSpec, m2: ModeSpec, mass: float, x: SpacetimePoint) -> complex:
    """c₁c₂* e^{i(k₁−k₂)·x}"""
    k1 = FourVector.on_shell(m1.wavevec, mass).as_array().real
    k2 = FourVector.on_shell(m2.wavevec, mass).as_array().real
    dk = ETA @ (k1 - k2)
    return m1.amplitude * np.conj(m2.amplitude) * np.exp(1j * float(dk @ x.as_array()))


def J_two_mode_closed_form(f: ModeField, params: InnerParams, x: SpacetimePoint) -> FourVector:
    m1, m2 = _two_positive_modes(f)
    k1 = FourVector.on_shell(m1.wavevec, f.mass).as_array().real
    k2 = FourVector.on_shell(m2.wavevec, f.mass).as_array().real
    cross = _cross_phase(m1, m2, f.mass, x).real
    j = abs(m1.amplitude) ** 2 * k1 + abs(m2.amplitude) ** 2 * k2 + cross * (k1 + k2)
    return FourVector.from_array(params.kappa * (1.0 + params.a) / params.mass * j)


def K_vector(k1: FourVector, k2: FourVector, mass: float | None = None) -> FourVector:
    """K^μ = √(ω₂/ω₁)k₁^μ + √(ω₁/ω₂)k₂^μ"""
    m = mass if mass is not None else _shell_mass(k1)
    _require_on_shell(k1, m)
    _require_on_shell(k2, m)
    v1, v2 = k1.as_array().real, k2.as_array().real
    w1, w2 = abs(v1[0]), abs(v2[0])
    return FourVector.from_array(math.sqrt(w2 / w1) * v1 + math.sqrt(w1 / w2) * v2)


def K_invariant(k1: FourVector, k2: FourVector, mass: float) -> float:
    """K_μK^μ = 2k₁·k₂ − M²(ω₂/ω₁ + ω₁/ω₂)"""
    _require_on_shell(k1, mass)
    _require_on_shell(k2, mass)
    w1, w2 = abs(k1.components[0].real), abs(k2.components[0].real)
    return 2.0 * k1.dot(k2).real - mass**2 * (w2 / w1 + w1 / w2)


def _shell_mass(k: FourVector) -> float:
    m2 = -k.dot(k).real
    if m2 <= 0.0:
        raise ParameterError("four-vector is not timelike")
    return math.sqrt(m2)


def _require_on_shell(k: FourVector, mass: float) -> None:
    m = require_mass(mass)
    if abs(k.dot(k).real + m * m) > ON_SHELL_TOLERANCE * max(1.0, m * m, abs(k.components[0]) ** 2):
        raise ParameterError(f"four-vector is off shell: k·k={k.dot(k).real} M={m}")


def J_script_two_mode_closed_form(f: ModeField, params: InnerParams, x: SpacetimePoint) -> FourVector:
    m1, m2 = _two_positive_modes(f)
    k1 = FourVector.on_shell(m1.wavevec, f.mass)
    k2 = FourVector.on_shell(m2.wavevec, f.mass)
    big_k = K_vector(k1, k2, f.mass).as_array().real
    cross = _cross_phase(m1, m2, f.mass, x).real
    j = abs(m1.amplitude) ** 2 * k1.as_array().real + abs(m2.amplitude) ** 2 * k2.as_array().real + cross * big_k
    return FourVector.from_array(params.kappa * (1.0 + params.a) / params.mass * j)


def div_J_script_closed_form(f: ModeField, params: InnerParams, x: SpacetimePoint) -> float:
    """(M²+k₁·k₂)(√(ω₁/ω₂)−√(ω₂/ω₁))·ℱ"""
    m1, m2 = _two_positive_modes(f)
    k1 = FourVector.on_shell(m1.wavevec, f.mass)
    k2 = FourVector.on_shell(m2.wavevec, f.mass)
    w1, w2 = k1.components[0].real, k2.components[0].real
    big_f = -params.kappa * (1.0 + params.a) / params.mass * _cross_phase(m1, m2, f.mass, x).imag
    return (f.mass**2 + k1.dot(k2).real) * (math.sqrt(w1 / w2) - math.sqrt(w2 / w1)) * big_f


# ---------------------------------------------------------------- boost / 内积


def boost(f: ModeField, boost_: LorentzBoost) -> ModeField:
    """(εω, k⃗) 整体 boost; ε 与振幅不变, 结果不再属于盒子格点"""
    lam = lorentz_matrix(boost_)
    modes = []
    for m in f.modes:
        k = lam @ FourVector.on_shell(m.wavevec, f.mass, m.eps).as_array().real
        modes.append(ModeSpec(amplitude=m.amplitude, wavevec=(float(k[1]), float(k[2]), float(k[3])), eps=m.eps))
    return ModeField(mass=f.mass, box_length=f.box_length, modes=tuple(modes), boxed=False)


def box_inner_product(f: ModeField, params: InnerParams, dims: int = 3) -> float:
    """盒子静止切片上对角模式流的通量 V·Σ J_m^0"""
    _check_mass(f, params)
    ma = _mode_arrays(f)
    if not len(f.modes):
        return 0.0
    charge = (params.kappa / params.mass) * np.sum(np.abs(ma.amp) ** 2 * (ma.eps + params.a) * ma.kmu[:, 0])
    return float(f.box_length**dims * charge)


def _box_extent(f: ModeField, dims: int) -> NDArray[np.float64]:
    """盒子各轴长度; 盒外轴按单位长度计, 其上波矢须为零"""
    if not f.boxed:
        raise ParameterError("slice flux needs a boxed field")
    if dims not in (1, 2, 3):
        raise ParameterError(f"dims must be 1, 2 or 3: {dims}")
    if any(m.wavevec[j] != 0.0 for m in f.modes for j in range(dims, 3)):
        raise ParameterError("field varies along an axis outside the box")
    return np.array([f.box_length] * dims + [1.0] * (3 - dims))


def _phase_integral(q: NDArray[Any], length: NDArray[np.float64] | float) -> NDArray[np.complex128]:
    """∫_0^ℓ e^{iqx}dx = ℓ·e^{iz/2}·sinc(z/2), z = qℓ"""
    z = q * length
    return length * np.exp(0.5j * z) * np.sinc(z / (2.0 * math.pi))


def _pair_coefficients(ma: _ModeArrays, params: InnerParams) -> NDArray[np.complex128]:
    """流的模式对系数 C^μ_{mn} = (κ/2M)c_m*c_n(ε_n+a)(k_n+k_m)^μ, 形状 (n, n, 4)"""
    weight = np.conj(ma.amp)[:, None] * (ma.amp * (ma.eps + params.a))[None, :]
    return _prefactor(params) * weight[:, :, None] * (ma.kmu[None, :, :] + ma.kmu[:, None, :])


def _pair_gaps(ma: _ModeArrays) -> NDArray[np.float64]:
    """k_n − k_m, 形状 (n, n, 4)"""
    return ma.kmu[None, :, :] - ma.kmu[:, None, :]


def _slice_map(boost_: LorentzBoost) -> NDArray[np.float64]:
    """静止系坐标 x⃗ ↦ boost 系同时面 x'⁰=0 上的 x'⃗"""
    lam = lorentz_matrix(boost_)
    beta = np.asarray(boost_.velocity, dtype=float)
    return lam[1:, 0:1] @ beta[None, :] + lam[1:, 1:]


def slice_flux(f: ModeField, params: InnerParams, boost_: LorentzBoost, dims: int = 3) -> float:
    """boost 系同时面上的全流通量 ∫J'^0 d³x', 区域为静止盒子在该面上的像

    用 boost 后的模式求流 (含交叉项), 面上坐标经 _slice_map 回拉到盒子.
    """
    _check_mass(f, params)
    extent = _box_extent(f, dims)
    if not len(f.modes):
        return 0.0
    moved = _mode_arrays(boost(f, boost_))
    area = _slice_map(boost_)
    coeff = _pair_coefficients(moved, params)[:, :, 0]
    q = _pair_gaps(moved)[:, :, 1:] @ area
    weight = np.prod(_phase_integral(q, extent), axis=-1)
    return float(np.sum(coeff * weight).real * abs(np.linalg.det(area)))


def strip_flux(f: ModeField, params: InnerParams, boost_: LorentzBoost, dims: int = 3) -> float:
    """静止盒子与 boost 同时面之间侧面条带的通量 (静止系)

    周期场上 rest 通量 = slice_flux + strip_flux.
    """
    _check_mass(f, params)
    extent = _box_extent(f, dims)
    if not len(f.modes):
        return 0.0
    ma = _mode_arrays(f)
    beta = np.asarray(boost_.velocity, dtype=float)
    coeff = _pair_coefficients(ma, params)
    gaps = _pair_gaps(ma)
    q = gaps[:, :, 1:] - gaps[:, :, 0:1] * beta
    faces = _phase_integral(q, extent)
    total = 0j
    for i in range(3):
        if beta[i] == 0.0:
            continue
        height = beta[i] * extent[i]
        across = np.prod(np.delete(faces, i, axis=-1), axis=-1)
        total += np.sum(coeff[:, :, 1 + i] * _phase_integral(-gaps[:, :, 0], height) * across)
    return float(total.real)
