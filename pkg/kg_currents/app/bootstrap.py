from loguru import logger

from kg_currents.app.utils import install_global_handlers, setup_logging
from kg_currents.core.basic_dir import LOGS_DIR, ensure_data_dirs
from kg_currents.core.constants import APP_NAME
from kg_currents.storage.models import AppSettings


def bootstrap(settings: AppSettings, log_level: str | None = None) -> None:
    """初始化"""
    ensure_data_dirs()
    setup_logging(log_level or settings.Global.log_level, LOGS_DIR, settings.Global.log_files_kept)
    install_global_handlers()
    logger.debug("{} bootstrap completed", APP_NAME)
