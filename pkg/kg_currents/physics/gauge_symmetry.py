"""由 𝒞+a 生成的整体规范变换 G_a 及其 U(1) / ℝ⁺ 分类"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, Literal, overload

import numpy as np
from loguru import logger
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from kg_currents.core.constants import (
    DEFAULT_GENERATOR_STEP,
    IDENTITY_SCAN_SAMPLES,
    IDENTITY_SCAN_THETA_MAX,
    IDENTITY_SCAN_TOLERANCE,
)
from kg_currents.core.errors import ParameterError, RationalityUndeclaredError
from kg_currents.physics.mode_engine import ModeField
from kg_currents.physics.params import require_a
from kg_currents.physics.spectral_grid import GridState, charge_conjugate_grid


class GaugeElement(BaseModel):
    """g_a(θ); θ 为整体常数, 局域 θ 不被接受"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    theta: float
    a: float = 0.0

    @field_validator("a")
    @classmethod
    def _check_a(cls, v: float) -> float:
        return require_a(v)

    @field_validator("theta")
    @classmethod
    def _check_theta(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ParameterError(f"theta must be finite: {v}")
        return v

    def compose(self, other: GaugeElement) -> GaugeElement:
        if other.a != self.a:
            raise ParameterError("cannot compose elements of different G_a")
        return GaugeElement(theta=self.theta + other.theta, a=self.a)


class RationalParam(BaseModel):
    """a = m/n, gcd(|m|, n) = 1, |m| < n"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    m: int
    n: int

    @model_validator(mode="after")
    def _check(self) -> RationalParam:
        if self.n <= 0:
            raise ParameterError(f"denominator must be positive: n={self.n}")
        if math.gcd(abs(self.m), self.n) != 1:
            raise ParameterError(f"m/n must be in lowest terms: {self.m}/{self.n}")
        if abs(self.m) >= self.n:
            raise ParameterError(f"|a| must be < 1: a={self.m}/{self.n}")
        return self

    @property
    def value(self) -> float:
        return self.m / self.n


class IrrationalParam(BaseModel):
    """声明为无理数的 a, 只存其浮点近似"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    approx: float

    @field_validator("approx")
    @classmethod
    def _check(cls, v: float) -> float:
        return require_a(v)

    @property
    def value(self) -> float:
        return self.approx


# ---------------------------------------------------------------- 作用


@overload
def gauge_apply(f: ModeField, g: GaugeElement) -> ModeField: ...
@overload
def gauge_apply(f: GridState, g: GaugeElement) -> GridState: ...


def gauge_apply(f: ModeField | GridState, g: GaugeElement) -> ModeField | GridState:
    """ψ_ε → e^{−i(a+ε)θ}ψ_ε; 格点上 e^{−iaθ}[cosθ − i sinθ·𝒞]ψ"""
    if isinstance(f, ModeField):
        return f.with_modes(
            [m.model_copy(update={"amplitude": m.amplitude * np.exp(-1j * (g.a + m.eps) * g.theta)}) for m in f.modes]
        )
    if isinstance(f, GridState):
        if g.theta == 0.0:
            return f
        c = charge_conjugate_grid(f)
        phase = np.exp(-1j * g.a * g.theta)
        cos, sin = math.cos(g.theta), math.sin(g.theta)
        return f.replace(
            psi=phase * (cos * f.psi - 1j * sin * c.psi),
            psidot=phase * (cos * f.psidot - 1j * sin * c.psidot),
        )
    raise ParameterError(f"cannot gauge-transform {type(f).__name__}")


def gauge_apply_embedded(s: GridState, g: GaugeElement, phi: float) -> GridState:
    """U(1)×U(1) 元素: e^{−iφ}·gauge_apply(s, g)"""
    return gauge_apply(s, g) * np.exp(-1j * phi)


def generator_check(s: GridState, a: float, dtheta: float = DEFAULT_GENERATOR_STEP) -> float:
    """‖(g(δθ)s − s)/δθ + i(𝒞+a)s‖ / ‖s‖"""
    if dtheta <= 0.0:
        raise ParameterError(f"dtheta must be positive: {dtheta}")
    norm = s.max_abs()
    if norm == 0.0:
        return 0.0
    moved = gauge_apply(s, GaugeElement(theta=dtheta, a=a))
    c = charge_conjugate_grid(s)
    gen = c + a * s
    defect = (moved - s) * (1.0 / dtheta) + 1j * gen
    return defect.max_abs() / norm


def group_matrix(g: GaugeElement) -> NDArray[np.complex128]:
    """diag(e^{−i(a+1)θ}, e^{−i(a−1)θ})"""
    return np.diag([np.exp(-1j * (g.a + 1.0) * g.theta), np.exp(-1j * (g.a - 1.0) * g.theta)])


# ---------------------------------------------------------------- 分类


@dataclass(frozen=True)
class GroupClassification:
    param: RationalParam | IrrationalParam
    group: Literal["U1", "R+"]
    period: float | None
    witness: Callable[[float], complex | float] = field(repr=False)
    scan_min_distance: float | None = None

    def identity_free(self) -> bool:
        """ℝ⁺ 扫描证据: 扫描范围内从未回到单位元"""
        return self.scan_min_distance is not None and self.scan_min_distance > IDENTITY_SCAN_TOLERANCE


def scan_identity_return(
    a: float,
    theta_max: float = IDENTITY_SCAN_THETA_MAX,
    samples: int = IDENTITY_SCAN_SAMPLES,
    chunk: int = 1 << 17,
) -> float:
    """θ ∈ (0, θ_max] 上 max_i|g_a(θ)_ii − 1| 的最小值"""
    require_a(a)
    if samples < 1 or theta_max <= 0.0:
        raise ParameterError("scan needs samples >= 1 and theta_max > 0")
    step = theta_max / samples
    best = math.inf
    for start in range(1, samples + 1, chunk):
        theta = step * np.arange(start, min(start + chunk, samples + 1), dtype=float)
        d_plus = np.abs(np.exp(-1j * (a + 1.0) * theta) - 1.0)
        d_minus = np.abs(np.exp(-1j * (a - 1.0) * theta) - 1.0)
        best = min(best, float(np.min(np.maximum(d_plus, d_minus))))
    return best


def classify_group(a: Any) -> GroupClassification:
    """有理 m/n → U1 (周期 2πn); 声明无理 → R+ 附扫描证据"""
    if isinstance(a, RationalParam):
        period = 2.0 * math.pi * a.n
        check = group_matrix(GaugeElement(theta=period, a=a.value))
        err = float(np.max(np.abs(check - np.eye(2))))
        if err > IDENTITY_SCAN_TOLERANCE:
            raise ParameterError(f"group matrix is not periodic at 2πn: err={err:.3e}")
        n = a.n
        logger.info("classified a={}/{} as U1, period={}", a.m, a.n, period)
        return GroupClassification(param=a, group="U1", period=period, witness=lambda t: np.exp(-1j * t / n))
    if isinstance(a, IrrationalParam):
        dist = scan_identity_return(a.approx)
        logger.info("classified a≈{} as R+, scan min distance={:.3e}", a.approx, dist)
        return GroupClassification(param=a, group="R+", period=None, witness=math.exp, scan_min_distance=dist)
    raise RationalityUndeclaredError


def classification_document(result: GroupClassification) -> dict[str, Any]:
    p = result.param
    a_doc: dict[str, Any] = (
        {"type": "rational", "m": p.m, "n": p.n}
        if isinstance(p, RationalParam)
        else {"type": "irrational", "approx": p.approx}
    )
    return {"a": a_doc, "group": result.group, "period": result.period}
