"""周期格点上的伪谱表示

D^α = (|k|²+M²)^α 作为 Fourier 乘子; 正变换使用 e^{−ik·x}, 离散积分权重 (L/N)^d.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, field_validator

from kg_currents.core.constants import DEFAULT_TIME_STEP, MIN_POINTS_PER_AXIS
from kg_currents.core.errors import AliasingError, LatticeMismatchError, ParameterError
from kg_currents.physics.mode_engine import ModeField
from kg_currents.physics.params import InnerParams, require_mass

__all__ = [
    "GridState",
    "InnerParams",
    "Lattice",
    "apply_D_power",
    "charge_conjugate_grid",
    "evolve",
    "kg_residual",
    "pairing",
    "sample",
    "sector_split",
    "spectral_gradient",
]

ComplexArray = NDArray[np.complex128]


class Lattice(BaseModel):
    """d 维周期格点, 每轴 N 点, 边长 L"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dims: Literal[1, 2, 3]
    points: int
    box_length: float

    @field_validator("points")
    @classmethod
    def _check_points(cls, v: int) -> int:
        if v < MIN_POINTS_PER_AXIS or v & (v - 1):
            raise ParameterError(f"points per axis must be a power of two >= {MIN_POINTS_PER_AXIS}: N={v}")
        return v

    @field_validator("box_length")
    @classmethod
    def _check_length(cls, v: float) -> float:
        if not math.isfinite(v) or v <= 0.0:
            raise ParameterError(f"box length must be positive: L={v}")
        return v

    @classmethod
    def parse(cls, text: str) -> Lattice:
        """'d,N,L'"""
        try:
            d, n, length = (t.strip() for t in text.split(","))
            return cls(dims=int(d), points=int(n), box_length=float(length))  # type: ignore[arg-type]
        except ValueError as err:
            raise ParameterError(f"lattice must be 'd,N,L': {text!r} ({err})") from err

    @property
    def descriptor(self) -> str:
        return f"{self.dims},{self.points},{self.box_length!r}"

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.dims

    @property
    def size(self) -> int:
        return self.points**self.dims

    @property
    def spacing(self) -> float:
        return self.box_length / self.points

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dims

    @property
    def volume(self) -> float:
        return self.box_length**self.dims

    def coordinates(self) -> tuple[NDArray[np.float64], ...]:
        return _coordinates(self)

    def wavevectors(self) -> tuple[NDArray[np.float64], ...]:
        return _wavevectors(self)

    def k_squared(self) -> NDArray[np.float64]:
        return _k_squared(self)

    def site_index(self, y: tuple[float, ...] | list[float]) -> tuple[int, ...]:
        """格点坐标 -> 数组下标"""
        if len(y) < self.dims or any(abs(t) > 0 for t in y[self.dims :]):
            raise ParameterError(f"site {y} does not live on a {self.dims}d lattice")
        idx = []
        for t in y[: self.dims]:
            n = t / self.spacing
            if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)) or not 0 <= round(n) < self.points:
                raise ParameterError(f"site {y} is off the lattice (spacing={self.spacing})")
            idx.append(round(n))
        return tuple(idx)


@lru_cache(maxsize=32)
def _coordinates(lattice: Lattice) -> tuple[NDArray[np.float64], ...]:
    axis = np.arange(lattice.points) * lattice.spacing
    grids = np.meshgrid(*([axis] * lattice.dims), indexing="ij")
    for g in grids:
        g.setflags(write=False)
    return tuple(grids)


@lru_cache(maxsize=32)
def _wavevectors(lattice: Lattice) -> tuple[NDArray[np.float64], ...]:
    axis = 2.0 * np.pi * np.fft.fftfreq(lattice.points, d=lattice.spacing)
    grids = np.meshgrid(*([axis] * lattice.dims), indexing="ij")
    for g in grids:
        g.setflags(write=False)
    return tuple(grids)


@lru_cache(maxsize=32)
def _k_squared(lattice: Lattice) -> NDArray[np.float64]:
    k2 = sum(k**2 for k in _wavevectors(lattice))
    out = np.asarray(k2, dtype=float)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=128)
def _multiplier(lattice: Lattice, mass: float, alpha: float) -> NDArray[np.float64]:
    mult = (_k_squared(lattice) + mass * mass) ** alpha
    mult.setflags(write=False)
    return mult


def _frozen(arr: NDArray, shape: tuple[int, ...], name: str) -> ComplexArray:
    out = np.array(arr, dtype=complex, copy=True)
    if out.shape != shape:
        if out.size != math.prod(shape):
            raise LatticeMismatchError(f"{name} has {out.size} values, lattice needs {math.prod(shape)}")
        out = out.reshape(shape)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GridState:
    """时间片 x0 上的 (ψ, ψ̇)"""

    lattice: Lattice
    mass: float
    x0: float
    psi: ComplexArray
    psidot: ComplexArray = field(repr=False)

    def __post_init__(self) -> None:
        require_mass(self.mass)
        object.__setattr__(self, "psi", _frozen(self.psi, self.lattice.shape, "psi"))
        object.__setattr__(self, "psidot", _frozen(self.psidot, self.lattice.shape, "psidot"))

    @classmethod
    def zeros(cls, lattice: Lattice, mass: float, x0: float = 0.0) -> GridState:
        z = np.zeros(lattice.shape, dtype=complex)
        return cls(lattice=lattice, mass=mass, x0=x0, psi=z, psidot=z)

    def replace(self, psi: NDArray | None = None, psidot: NDArray | None = None, x0: float | None = None) -> GridState:
        return GridState(
            lattice=self.lattice,
            mass=self.mass,
            x0=self.x0 if x0 is None else x0,
            psi=self.psi if psi is None else psi,
            psidot=self.psidot if psidot is None else psidot,
        )

    def __add__(self, other: GridState) -> GridState:
        require_compatible(self, other)
        return self.replace(psi=self.psi + other.psi, psidot=self.psidot + other.psidot)

    def __sub__(self, other: GridState) -> GridState:
        require_compatible(self, other)
        return self.replace(psi=self.psi - other.psi, psidot=self.psidot - other.psidot)

    def __mul__(self, c: complex) -> GridState:
        return self.replace(psi=c * self.psi, psidot=c * self.psidot)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.psi)), np.max(np.abs(self.psidot))))


def require_compatible(s1: GridState, s2: GridState, check_time: bool = True) -> None:
    if s1.lattice != s2.lattice:
        raise LatticeMismatchError(f"lattice {s1.lattice.descriptor} != {s2.lattice.descriptor}")
    if not math.isclose(s1.mass, s2.mass, rel_tol=1e-14):
        raise LatticeMismatchError(f"mass {s1.mass} != {s2.mass}")
    if check_time and not math.isclose(s1.x0, s2.x0, rel_tol=1e-14, abs_tol=1e-12):
        raise LatticeMismatchError(f"time {s1.x0} != {s2.x0}")


def require_shape(arr: NDArray, lattice: Lattice, name: str = "array") -> None:
    if np.shape(arr) != lattice.shape:
        raise LatticeMismatchError(f"{name} shape {np.shape(arr)} != lattice shape {lattice.shape}")


# ---------------------------------------------------------------- 乘子


def apply_D_power(arr: NDArray, lattice: Lattice, mass: float, alpha: float) -> ComplexArray:
    """(|k|²+M²)^α 乘子"""
    require_shape(arr, lattice)
    if alpha == 0.0:
        return np.array(arr, dtype=complex)
    mult = _multiplier(lattice, require_mass(mass), float(alpha))
    return np.fft.ifftn(np.fft.fftn(arr) * mult)


def spectral_gradient(arr: NDArray, lattice: Lattice, axis: int) -> ComplexArray:
    """∂_axis, ik 乘子"""
    require_shape(arr, lattice)
    if not 0 <= axis < lattice.dims:
        raise ParameterError(f"axis {axis} outside a {lattice.dims}d lattice")
    return np.fft.ifftn(np.fft.fftn(arr) * (1j * _wavevectors(lattice)[axis]))


def apply_momentum_multiplier(arr: NDArray, lattice: Lattice, symbol: NDArray) -> ComplexArray:
    require_shape(arr, lattice)
    return np.fft.ifftn(np.fft.fftn(arr) * symbol)


def pairing(u: NDArray, v: NDArray, lattice: Lattice) -> complex:
    """离散 L² 配对 (L/N)^d Σ u*v"""
    require_shape(u, lattice, "u")
    require_shape(v, lattice, "v")
    return complex(lattice.cell_volume * np.vdot(u, v))


# ---------------------------------------------------------------- 电荷共轭 / 演化


def charge_conjugate_grid(s: GridState) -> GridState:
    """ψ_c = iD^{−1/2}ψ̇, ψ̇_c = −iD^{1/2}ψ"""
    return s.replace(
        psi=1j * apply_D_power(s.psidot, s.lattice, s.mass, -0.5),
        psidot=-1j * apply_D_power(s.psi, s.lattice, s.mass, 0.5),
    )


def sector_split(s: GridState) -> tuple[GridState, GridState]:
    """(ψ₊, ψ₋) = ((ψ+ψ_c)/2, (ψ−ψ_c)/2)"""
    c = charge_conjugate_grid(s)
    return 0.5 * (s + c), 0.5 * (s - c)


def evolve(s: GridState, delta: float) -> GridState:
    """两个扇区分别乘 e^{∓iωΔ}"""
    if delta == 0.0:
        return s
    w = _multiplier(s.lattice, s.mass, 0.5)
    psi_k = np.fft.fftn(s.psi)
    psi_c_k = 1j * np.fft.fftn(s.psidot) / w
    plus = 0.5 * (psi_k + psi_c_k) * np.exp(-1j * w * delta)
    minus = 0.5 * (psi_k - psi_c_k) * np.exp(1j * w * delta)
    return s.replace(
        psi=np.fft.ifftn(plus + minus),
        psidot=np.fft.ifftn(-1j * w * (plus - minus)),
        x0=s.x0 + delta,
    )


# ---------------------------------------------------------------- 采样


def sample(f: ModeField, lattice: Lattice, x0: float = 0.0) -> GridState:
    """在格点上逐点求值 ψ, ψ̇; 超出 Nyquist 的模式直接拒绝"""
    if not f.boxed:
        raise AliasingError("only boxed fields can be sampled")
    if not math.isclose(f.box_length, lattice.box_length, rel_tol=1e-12):
        raise AliasingError(f"field box {f.box_length} != lattice box {lattice.box_length}")
    coords = lattice.coordinates()
    psi = np.zeros(lattice.shape, dtype=complex)
    psidot = np.zeros(lattice.shape, dtype=complex)
    for m in f.modes:
        if any(abs(k) > 0 for k in m.wavevec[lattice.dims :]):
            raise AliasingError(f"mode {m.wavevec} has components outside a {lattice.dims}d lattice")
        for k in m.wavevec[: lattice.dims]:
            n = round(k * lattice.box_length / (2.0 * math.pi))
            if abs(n) >= lattice.points // 2:
                raise AliasingError("mode exceeds the Nyquist index", index=n)
        w = math.sqrt(math.fsum(k * k for k in m.wavevec) + f.mass**2)
        phase = sum(k * x for k, x in zip(m.wavevec, coords, strict=False)) - m.eps * w * x0
        wave = m.amplitude * np.exp(1j * phase)
        psi += wave
        psidot += -1j * m.eps * w * wave
    return GridState(lattice=lattice, mass=f.mass, x0=x0, psi=psi, psidot=psidot)


# ---------------------------------------------------------------- KG 残差


def kg_residual(
    s: GridState,
    delta: float | None = None,
    propagate: Callable[[GridState, float], GridState] | None = None,
) -> float:
    """max(‖ψ̈+Dψ‖/‖Dψ‖, ‖ψ̇_fd−ψ̇‖/‖ψ̇‖); 差分取自演化轨迹, 一级 Richardson"""
    h = delta if delta is not None else DEFAULT_TIME_STEP / s.mass
    if h <= 0.0:
        raise ParameterError(f"difference step must be positive: h={h}")
    prop = propagate or evolve

    def _differences(hh: float) -> tuple[ComplexArray, ComplexArray]:
        fwd = prop(s, hh).psi
        bwd = prop(s, -hh).psi
        return (fwd - 2.0 * s.psi + bwd) / hh**2, (fwd - bwd) / (2.0 * hh)

    acc_h, vel_h = _differences(h)
    acc_half, vel_half = _differences(h / 2.0)
    acc = (4.0 * acc_half - acc_h) / 3.0
    vel = (4.0 * vel_half - vel_h) / 3.0

    d_psi = apply_D_power(s.psi, s.lattice, s.mass, 1.0)
    half_psi = apply_D_power(s.psi, s.lattice, s.mass, 0.5)
    half_dot = apply_D_power(s.psidot, s.lattice, s.mass, 0.5)
    acc_scale = max(float(np.max(np.abs(d_psi))), float(np.max(np.abs(half_dot))))
    vel_scale = max(float(np.max(np.abs(s.psidot))), float(np.max(np.abs(half_psi))))
    if acc_scale == 0.0 or vel_scale == 0.0:
        return 0.0
    r_acc = float(np.max(np.abs(acc + d_psi))) / acc_scale
    r_vel = float(np.max(np.abs(vel - s.psidot))) / vel_scale
    return max(r_acc, r_vel)
