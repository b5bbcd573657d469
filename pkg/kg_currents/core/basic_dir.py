import time
from pathlib import Path


def atomic_write(path: Path, data: str, max_retries: int = 3) -> None:
    """原子写入"""
    path.parent.mkdir(parents=True, exist_ok=True)
    for attempt in range(max_retries):
        tmp = path.with_suffix(path.suffix + ".tmp")
        try:
            tmp.write_text(data, encoding="utf-8", newline="\n")
            tmp.replace(path)
        except PermissionError:
            if attempt == max_retries - 1:
                raise
            time.sleep(0.1 * (attempt + 1))
        else:
            return


PACKAGE_ROOT = Path(__file__).resolve().parent.parent
REPO_ROOT = PACKAGE_ROOT.parent
DATA_DIR = REPO_ROOT / "data"
SETTINGS_TOML = DATA_DIR / "settings.toml"
LOGS_DIR = DATA_DIR / "Logs"
REPORTS_DIR = DATA_DIR / "reports"
FIXTURES_DIR = PACKAGE_ROOT / "assets" / "fixtures"


def ensure_data_dirs() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    LOGS_DIR.mkdir(parents=True, exist_ok=True)
    REPORTS_DIR.mkdir(parents=True, exist_ok=True)
