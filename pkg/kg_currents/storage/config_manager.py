from __future__ import annotations

import contextlib
import tomllib
from pathlib import Path
from typing import Any

import tomlkit
from loguru import logger

from kg_currents.core.basic_dir import DATA_DIR, SETTINGS_TOML, atomic_write
from kg_currents.storage.models import CURRENT_SCHEMA_VERSION, AppSettings

_SECTIONS = ("Global", "Defaults")


def _overlay(file_cfg: dict[str, Any]) -> dict[str, Any]:
    """文件中的各节覆盖默认值, 其余键原样保留交给校验"""
    merged = AppSettings().model_dump()
    for key, value in file_cfg.items():
        if key in _SECTIONS and isinstance(value, dict):
            merged[key].update(value)
        else:
            merged[key] = value
    merged["schema_version"] = CURRENT_SCHEMA_VERSION
    return merged


class AppSettingsManager:
    """settings.toml 的读写; 按 mtime 缓存"""

    def __init__(self, toml_path: Path | None = None):
        self.toml_path = toml_path or SETTINGS_TOML
        self._cached: AppSettings | None = None
        self._cache_mtime: float | None = None

    def _mtime(self) -> float | None:
        with contextlib.suppress(OSError):
            return self.toml_path.stat().st_mtime
        return None

    def _read(self) -> dict[str, Any] | None:
        """文件不存在返回 None; 无法解析时返回空表, 文件保持原样"""
        try:
            text = self.toml_path.read_bytes().decode("utf-8")
        except FileNotFoundError:
            return None
        except (OSError, UnicodeDecodeError) as err:
            logger.error("读取配置失败: path={} err={}", str(self.toml_path), str(err))
            return {}
        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as err:
            logger.warning("配置文件无法解析, 使用默认值: path={} err={}", str(self.toml_path), str(err))
            return {}

    def save(self, settings: AppSettings) -> None:
        atomic_write(self.toml_path, tomlkit.dumps(settings.model_dump()))
        self._cached = None

    def load(self) -> AppSettings:
        """缺失时写出默认配置; 校验失败抛 ValidationError"""
        mtime = self._mtime()
        if self._cached is not None and mtime == self._cache_mtime:
            return self._cached
        file_cfg = self._read()
        if file_cfg is None:
            settings = AppSettings()
            try:
                self.save(settings)
            except OSError as err:
                logger.error("写入默认配置失败: path={} err={}", str(self.toml_path), str(err))
        else:
            try:
                settings = AppSettings.model_validate(_overlay(file_cfg))
            except ValueError as err:
                logger.error("配置校验失败: path={} err={}", str(self.toml_path), str(err))
                raise
        self._cached = settings
        self._cache_mtime = self._mtime()
        logger.debug("配置已加载: path={} defaults={}", str(self.toml_path), settings.Defaults.model_dump())
        return settings


_settings_manager: AppSettingsManager | None = None


def load_appsettings_model() -> AppSettings:
    """获取全局配置 (单例)"""
    global _settings_manager  # noqa: PLW0603
    if _settings_manager is None:
        DATA_DIR.mkdir(parents=True, exist_ok=True)
        _settings_manager = AppSettingsManager()
    return _settings_manager.load()
