"""ModeField / GridState / EMConfig 的 JSON 文档读写

浮点数以 repr 写出, 读回逐位一致.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, TypeVar

import numpy as np
from loguru import logger
from pydantic import BaseModel, ValidationError

from kg_currents.core.basic_dir import atomic_write
from kg_currents.core.errors import DocumentError
from kg_currents.physics.em_background import EMConfig
from kg_currents.physics.mode_engine import ModeField, ModeSpec
from kg_currents.physics.spectral_grid import GridState, Lattice
from kg_currents.storage.models import EMDocument, FieldDocument, GridDocument, LatticeDocument, ModeDocument

M = TypeVar("M", bound=BaseModel)


def _read_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as err:
        logger.error("文档不存在: path={}", str(path))
        raise DocumentError("document not found", path=str(path)) from err
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as err:
        logger.error("文档解析失败: path={} err={}", str(path), str(err))
        raise DocumentError(f"cannot parse document ({err})", path=str(path)) from err


def _validate(model: type[M], raw: Any, path: str) -> M:
    try:
        return model.model_validate(raw)
    except ValidationError as err:
        logger.error("文档校验失败: path={} err={}", path, str(err))
        raise DocumentError(f"invalid {model.__name__}: {err.error_count()} error(s)", path=path) from err


def _build(path: str, fn, *args):  # noqa: ANN001, ANN202
    """领域构造中的参数错误同样视为文档错误"""
    try:
        return fn(*args)
    except DocumentError:
        raise
    except ValueError as err:
        logger.error("文档内容不合法: path={} err={}", path, str(err))
        raise DocumentError(str(err), path=path) from err


def _dump(doc: BaseModel, path: Path) -> None:
    atomic_write(Path(path), json.dumps(doc.model_dump(mode="json"), indent=2) + "\n")


# ---------------------------------------------------------------- ModeField


def field_from_document(doc: FieldDocument) -> ModeField:
    return ModeField(
        mass=doc.mass,
        box_length=doc.box_length,
        boxed=doc.boxed,
        modes=tuple(ModeSpec(amplitude=complex(m.re, m.im), wavevec=m.k, eps=m.eps) for m in doc.modes),
    )


def field_to_document(f: ModeField) -> FieldDocument:
    return FieldDocument(
        mass=f.mass,
        box_length=f.box_length,
        boxed=f.boxed,
        modes=[
            ModeDocument(re=m.amplitude.real, im=m.amplitude.imag, k=m.wavevec, eps=m.eps) for m in f.modes
        ],
    )


def load_mode_field(path: Path) -> ModeField:
    p = str(path)
    doc = _validate(FieldDocument, _read_json(path), p)
    return _build(p, field_from_document, doc)


def save_mode_field(f: ModeField, path: Path) -> None:
    _dump(field_to_document(f), path)


# ---------------------------------------------------------------- GridState


def _grid_from_document(doc: GridDocument) -> GridState:
    lattice = Lattice.model_validate(doc.lattice.model_dump())
    return GridState(
        lattice=lattice,
        mass=doc.mass,
        x0=doc.x0,
        psi=np.array(doc.psi_re) + 1j * np.array(doc.psi_im),
        psidot=np.array(doc.psidot_re) + 1j * np.array(doc.psidot_im),
    )


def load_grid_state(path: Path) -> GridState:
    p = str(path)
    doc = _validate(GridDocument, _read_json(path), p)
    return _build(p, _grid_from_document, doc)


def save_grid_state(s: GridState, path: Path) -> None:
    psi, dot = s.psi.ravel(), s.psidot.ravel()
    doc = GridDocument(
        lattice=LatticeDocument(dims=s.lattice.dims, points=s.lattice.points, box_length=s.lattice.box_length),
        mass=s.mass,
        x0=s.x0,
        psi_re=psi.real.tolist(),
        psi_im=psi.imag.tolist(),
        psidot_re=dot.real.tolist(),
        psidot_im=dot.imag.tolist(),
    )
    _dump(doc, path)


# ---------------------------------------------------------------- EMConfig


def load_em_config(path: Path, lattice: Lattice) -> EMConfig:
    p = str(path)
    doc = _validate(EMDocument, _read_json(path), p)
    return _build(p, EMConfig.from_document, doc.model_dump(mode="python"), lattice, p)


def save_em_config(em: EMConfig, path: Path) -> None:
    _dump(_validate(EMDocument, em.to_document(), str(path)), path)


def is_grid_document(path: Path) -> bool:
    raw = _read_json(path)
    return isinstance(raw, dict) and (raw.get("kind") == "grid_state" or "psi_re" in raw)
