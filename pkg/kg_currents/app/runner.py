from __future__ import annotations

import sys
from pathlib import Path

from loguru import logger
from pydantic import ValidationError

from kg_currents.app.bootstrap import bootstrap
from kg_currents.app.mode import ExperimentConfig, build_config, build_parser
from kg_currents.core.basic_dir import REPORTS_DIR
from kg_currents.core.constants import EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE
from kg_currents.core.errors import (
    AliasingError,
    BoundarySupportError,
    DocumentError,
    LatticeMismatchError,
    ParameterError,
    QuadratureError,
    SpectrumError,
    UsageError,
)
from kg_currents.experiments.suite import run_experiment
from kg_currents.storage import default_report_path, load_appsettings_model, write_report
from kg_currents.storage.models import AppSettings, ExperimentReport

DomainError = (
    AliasingError,
    BoundarySupportError,
    DocumentError,
    LatticeMismatchError,
    ParameterError,
    QuadratureError,
    SpectrumError,
    UsageError,
)


def _report_path(config: ExperimentConfig, settings: AppSettings) -> Path:
    if config.out is not None:
        return config.out
    reports_dir = Path(settings.Global.reports_dir) if settings.Global.reports_dir else REPORTS_DIR
    return default_report_path(reports_dir, config.experiment, config.seed, config.format)


def execute(config: ExperimentConfig, settings: AppSettings) -> tuple[int, ExperimentReport]:
    """运行实验并写出报告; 领域错误向上抛出"""
    report = run_experiment(config)
    path = write_report(report, _report_path(config, settings), config.format)
    logger.info("报告已写入: {}", str(path))
    return (EXIT_OK if report.passed else EXIT_TOLERANCE), report


def run(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as err:
        # argparse 已打印用法
        return int(err.code) if isinstance(err.code, int) else EXIT_USAGE

    try:
        settings = load_appsettings_model()
    except ValidationError as err:
        print(f"settings file is invalid: {err.error_count()} error(s)", file=sys.stderr)
        return EXIT_USAGE

    try:
        config = build_config(args, settings)
    except UsageError as err:
        build_parser().print_usage(sys.stderr)
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code

    bootstrap(settings, config.log_level)
    try:
        code, _ = execute(config, settings)
    except DomainError as err:
        logger.error("{} 失败: {}: {}", config.experiment, type(err).__name__, str(err))
        return err.exit_code
    return code
