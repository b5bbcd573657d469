from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, field_validator

from kg_currents.core.errors import ParameterError


def require_mass(mass: float) -> float:
    if not math.isfinite(mass) or mass <= 0.0:
        raise ParameterError(f"mass must be positive: M={mass}")
    return float(mass)


def require_a(a: float) -> float:
    if not math.isfinite(a) or abs(a) >= 1.0:
        raise ParameterError(f"|a| must be < 1: a={a}")
    return float(a)


class InnerParams(BaseModel):
    """内积参数 (a, κ, M, g)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    a: float = 0.0
    kappa: float = 1.0
    mass: float = 1.0
    kg_norm: float | None = None

    @field_validator("a")
    @classmethod
    def _check_a(cls, v: float) -> float:
        return require_a(v)

    @field_validator("kappa")
    @classmethod
    def _check_kappa(cls, v: float) -> float:
        if not math.isfinite(v) or v <= 0.0:
            raise ParameterError(f"kappa must be positive: kappa={v}")
        return v

    @field_validator("mass")
    @classmethod
    def _check_mass(cls, v: float) -> float:
        return require_mass(v)

    @field_validator("kg_norm")
    @classmethod
    def _check_g(cls, v: float | None) -> float | None:
        if v is not None and (not math.isfinite(v) or v <= 0.0):
            raise ParameterError(f"kg_norm must be positive: g={v}")
        return v

    @property
    def g(self) -> float:
        """KG 内积归一化, 默认 1/(2M)"""
        return self.kg_norm if self.kg_norm is not None else 1.0 / (2.0 * self.mass)

    @property
    def alpha_plus(self) -> float:
        return 0.5 * (math.sqrt(1.0 + self.a) + math.sqrt(1.0 - self.a))

    @property
    def alpha_minus(self) -> float:
        return 0.5 * (math.sqrt(1.0 + self.a) - math.sqrt(1.0 - self.a))

    def with_a(self, a: float) -> InnerParams:
        return self.model_copy(update={"a": require_a(a)})

    @classmethod
    def nonrelativistic(cls, a: float, mass: float = 1.0) -> InnerParams:
        """κ = 1/(1+a)"""
        return cls(a=a, kappa=1.0 / (1.0 + require_a(a)), mass=mass)
