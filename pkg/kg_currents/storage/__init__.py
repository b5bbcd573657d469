from kg_currents.storage.config_manager import load_appsettings_model
from kg_currents.storage.documents import (
    load_em_config,
    load_grid_state,
    load_mode_field,
    save_em_config,
    save_grid_state,
    save_mode_field,
)
from kg_currents.storage.reports import default_report_path, render, write_report

__all__ = [
    "default_report_path",
    "load_appsettings_model",
    "load_em_config",
    "load_grid_state",
    "load_mode_field",
    "render",
    "save_em_config",
    "save_grid_state",
    "save_mode_field",
    "write_report",
]
