from __future__ import annotations

import contextlib
import logging
import sys
from datetime import UTC, datetime
from pathlib import Path
from types import FrameType

from loguru import logger

from kg_currents.core.basic_dir import LOGS_DIR

LOG_FORMAT = (
    "<blue>{time:YYYY-MM-DD HH:mm:ss}</blue> | "
    "<level>{level: <7}</level> | "
    "<magenta>{name}</magenta>:<cyan>{function}</cyan> | "
    "{message}"
)


class InterceptHandler(logging.Handler):
    def emit(self, record: logging.LogRecord) -> None:
        level: str | int
        try:
            level = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno
        frame: FrameType | None = logging.currentframe()
        depth = 2
        while frame and frame.f_code.co_filename == logging.__file__:
            frame = frame.f_back
            depth += 1
        logger.opt(depth=depth, exception=record.exc_info).log(level, record.getMessage())


def _prune_logs(logs_dir: Path, keep: int) -> None:
    files = sorted(logs_dir.glob("log_*.log"), key=lambda p: p.stat().st_mtime, reverse=True)
    for p in files[keep:]:
        with contextlib.suppress(OSError):
            p.unlink()


def setup_logging(level: str = "INFO", logs_dir: Path | None = None, files_kept: int = 3) -> None:
    """stderr + 按时间命名的文件日志; 报告走 stdout 或文件, 不与日志混杂"""
    logs_dir = logs_dir or LOGS_DIR
    logs_dir.mkdir(parents=True, exist_ok=True)
    logger.remove()
    logger.add(sys.stderr, level=level, format=LOG_FORMAT, backtrace=True, diagnose=False)
    ts = datetime.now(UTC).astimezone().strftime("%Y-%m-%d-%H-%M")
    logger.add(
        str(logs_dir / f"log_{ts}.log"),
        level="DEBUG",
        encoding="utf-8",
        format=LOG_FORMAT,
        backtrace=True,
        diagnose=False,
    )
    _prune_logs(logs_dir, files_kept)
    _setup_stdlib_logging()


def _setup_stdlib_logging() -> None:
    """numpy / scipy 的 warnings 与标准日志转入 loguru"""
    logging.captureWarnings(True)
    for name in ("py.warnings", "scipy", "numpy"):
        std = logging.getLogger(name)
        std.handlers = [InterceptHandler()]
        std.setLevel(logging.WARNING)
        std.propagate = False


def install_global_handlers() -> None:
    def _excepthook(exc_type, value, tb):  # noqa: ANN001
        if exc_type is None or exc_type is KeyboardInterrupt:
            return
        logger.opt(exception=(exc_type, value, tb)).error("未捕获的异常: {}", value)

    sys.excepthook = _excepthook
