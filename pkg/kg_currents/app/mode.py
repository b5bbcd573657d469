from __future__ import annotations

import argparse
import math
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from kg_currents.core.constants import EXPERIMENTS
from kg_currents.core.errors import UsageError
from kg_currents.physics.mode_engine import LorentzBoost
from kg_currents.physics.params import InnerParams
from kg_currents.physics.spectral_grid import Lattice
from kg_currents.storage.models import AppSettings

SEED_MAX = 2**64 - 1
DEFAULT_SCALES = (2.0, 4.0, 8.0, 16.0, 32.0)


class ExperimentConfig(BaseModel):
    """一次实验运行的全部参数, 分派前完成校验"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: str
    inputs: tuple[Path, ...] = ()
    a: float = 0.0
    kappa: float = 1.0
    kappa_given: bool = False
    mass: float = 1.0
    g: float | None = None
    lattice: Lattice = Lattice(dims=1, points=64, box_length=32.0)
    beta: tuple[float, float, float] = (0.5, 0.0, 0.0)
    scales: tuple[float, ...] = DEFAULT_SCALES
    seed: int = Field(default=0, ge=0, le=SEED_MAX)
    mode_count: int = Field(default=4, ge=1)
    out: Path | None = None
    format: Literal["csv", "json"] = "csv"
    tolerance_scale: float = 1.0
    log_level: str = "INFO"

    @field_validator("experiment")
    @classmethod
    def _check_experiment(cls, v: str) -> str:
        if v not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {v!r}")
        return v

    @field_validator("lattice", mode="before")
    @classmethod
    def _parse_lattice(cls, v: object) -> object:
        return Lattice.parse(v) if isinstance(v, str) else v

    @field_validator("scales")
    @classmethod
    def _check_scales(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if len(v) < 2 or any(not math.isfinite(s) or s <= 1.0 for s in v):
            raise ValueError(f"scales must be at least two values > 1: {v}")
        return v

    @field_validator("tolerance_scale")
    @classmethod
    def _check_tolerance_scale(cls, v: float) -> float:
        if not math.isfinite(v) or v <= 0.0:
            raise ValueError(f"tolerance scale must be positive: {v}")
        return v

    @field_validator("log_level")
    @classmethod
    def _upper(cls, v: str) -> str:
        return v.upper()

    @model_validator(mode="after")
    def _check_physics(self) -> ExperimentConfig:
        # 各模块自己的前置条件
        self.params  # noqa: B018
        self.boost  # noqa: B018
        return self

    @property
    def params(self) -> InnerParams:
        return InnerParams(a=self.a, kappa=self.kappa, mass=self.mass, kg_norm=self.g)

    @property
    def boost(self) -> LorentzBoost:
        return LorentzBoost(velocity=self.beta)

    def tolerance(self, base: float) -> float:
        return base * self.tolerance_scale


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from err


def _beta(text: str) -> tuple[float, float, float]:
    values = _float_list(text)
    if not 1 <= len(values) <= 3:
        raise argparse.ArgumentTypeError(f"beta takes one to three components: {text!r}")
    padded = (*values, 0.0, 0.0)
    return (padded[0], padded[1], padded[2])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kg_currents", description="Klein-Gordon 流与内积的数值验证")
    p.add_argument("experiment", choices=EXPERIMENTS, help="实验名")
    p.add_argument("--in", dest="inputs", action="append", type=Path, default=[], help="输入文档 (可多次)")
    p.add_argument("--a", type=float, help="内积参数 a, |a| < 1")
    p.add_argument("--kappa", type=float)
    p.add_argument("--mass", type=float)
    p.add_argument("--g", type=float, help="KG 内积归一化, 默认 1/(2M)")
    p.add_argument("--beta", type=_beta, help="boost 速度, 'bx[,by[,bz]]'")
    p.add_argument("--scales", type=_float_list, help="非相对论扫描的尺度, 逗号分隔")
    p.add_argument("--seed", type=int)
    p.add_argument("--lattice", help="'d,N,L'")
    p.add_argument("--mode-count", type=int)
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--tolerance-scale", type=float)
    p.add_argument("--log-level")
    return p


def build_config(args: argparse.Namespace, settings: AppSettings) -> ExperimentConfig:
    """命令行 > 配置文件 > 默认值"""
    d = settings.Defaults
    raw: dict[str, object] = {
        "experiment": args.experiment,
        "inputs": tuple(args.inputs),
        "a": d.a if args.a is None else args.a,
        "kappa": d.kappa if args.kappa is None else args.kappa,
        "kappa_given": args.kappa is not None,
        "mass": d.mass if args.mass is None else args.mass,
        "g": args.g,
        "lattice": d.lattice if args.lattice is None else args.lattice,
        "seed": d.seed if args.seed is None else args.seed,
        "mode_count": d.mode_count if args.mode_count is None else args.mode_count,
        "out": args.out,
        "format": args.format,
        "tolerance_scale": d.tolerance_scale if args.tolerance_scale is None else args.tolerance_scale,
        "log_level": args.log_level or settings.Global.log_level,
    }
    if args.beta is not None:
        raw["beta"] = args.beta
    if args.scales is not None:
        raw["scales"] = args.scales
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as err:
        details = "; ".join(f"{'.'.join(map(str, e['loc'])) or 'config'}: {e['msg']}" for e in err.errors())
        raise UsageError(f"invalid experiment configuration: {details}") from err
