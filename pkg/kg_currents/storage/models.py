from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from kg_currents.physics.params import InnerParams
from kg_currents.physics.spectral_grid import Lattice

CURRENT_SCHEMA_VERSION = 1


# ---------------------------------------------------------------- 配置


class GlobalSettings(BaseModel):
    """全局配置"""

    log_level: str = "INFO"
    reports_dir: str = ""
    log_files_kept: int = Field(default=3, ge=1)


class DefaultSettings(BaseModel):
    """实验参数默认值"""

    a: float = 0.0
    kappa: float = 1.0
    mass: float = 1.0
    lattice: str = "1,64,32.0"
    seed: int = 0
    mode_count: int = Field(default=4, ge=1)
    tolerance_scale: float = Field(default=1.0, gt=0.0)

    @field_validator("lattice")
    @classmethod
    def _check_lattice(cls, v: str) -> str:
        Lattice.parse(v)
        return v

    @model_validator(mode="after")
    def _check_params(self) -> DefaultSettings:
        InnerParams(a=self.a, kappa=self.kappa, mass=self.mass)
        return self


class AppSettings(BaseModel):
    """应用配置"""

    model_config = ConfigDict(extra="forbid")
    Global: GlobalSettings = GlobalSettings()
    Defaults: DefaultSettings = DefaultSettings()
    schema_version: int = CURRENT_SCHEMA_VERSION


# ---------------------------------------------------------------- 文档


class ModeDocument(BaseModel):
    """单个模式: 振幅 re + i·im, 波矢 k, 电荷宇称"""

    model_config = ConfigDict(extra="forbid")

    re: float
    im: float = 0.0
    k: tuple[float, float, float] = (0.0, 0.0, 0.0)
    eps: Literal[1, -1] = 1


class FieldDocument(BaseModel):
    """ModeField 文档"""

    model_config = ConfigDict(extra="forbid")

    schema_version: int = CURRENT_SCHEMA_VERSION
    kind: Literal["mode_field"] = "mode_field"
    mass: float
    box_length: float
    boxed: bool = True
    modes: list[ModeDocument] = []


class LatticeDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dims: int
    points: int
    box_length: float


class GridDocument(BaseModel):
    """GridState 文档, 数组按行主序展开"""

    model_config = ConfigDict(extra="forbid")

    schema_version: int = CURRENT_SCHEMA_VERSION
    kind: Literal["grid_state"] = "grid_state"
    lattice: LatticeDocument
    mass: float
    x0: float = 0.0
    psi_re: list[float]
    psi_im: list[float]
    psidot_re: list[float]
    psidot_im: list[float]


class ConstantPhi(BaseModel):
    model_config = ConfigDict(extra="forbid")

    constant: float


class EMDocument(BaseModel):
    """EMConfig 文档"""

    model_config = ConfigDict(extra="forbid")

    q: float
    A: list[list[float]]
    phi: Literal["zero"] | ConstantPhi = "zero"


# ---------------------------------------------------------------- 报告


class ReportRow(BaseModel):
    """报告行; 未用列留空"""

    experiment: str
    a: float | None = None
    kappa: float | None = None
    mass: float | None = None
    g: float | None = None
    lattice: str | None = None
    quantity: str
    value_re: float | None = None
    value_im: float | None = None
    tolerance: float | None = None
    passed: bool | None = None
    tolerance_scale: float | None = None
    beta: float | None = None
    scale_s: float | None = None
    defect: float | None = None
    slope: float | None = None
    eps: int | None = None
    mr: float | None = None
    closed_form: float | None = None
    quadrature: float | None = None
    rel_err: float | None = None


REPORT_COLUMNS: tuple[str, ...] = tuple(ReportRow.model_fields)


class ExperimentReport(BaseModel):
    """一次实验的全部结果"""

    experiment: str
    seed: int
    rows: list[ReportRow] = []

    @property
    def passed(self) -> bool:
        return all(r.passed is not False for r in self.rows)

    @field_validator("experiment")
    @classmethod
    def _check_name(cls, v: str) -> str:
        if not v:
            raise ValueError("experiment name must not be empty")
        return v
