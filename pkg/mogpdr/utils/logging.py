# mogpdr/utils/logging.py
from __future__ import annotations

import logging
import logging.config
from pathlib import Path

from mogpdr.config import settings

LOGGING_INI = Path(__file__).resolve().parent.parent / "logging.ini"


def setup_logging(level: str | None = None) -> None:
    """Configure the root logger once from logging.ini, then apply the level override."""
    if LOGGING_INI.exists():
        logging.config.fileConfig(LOGGING_INI, disable_existing_loggers=False)
    else:
        logging.basicConfig(format="%(asctime)s | %(levelname)s | %(name)s | %(message)s")
    logging.getLogger().setLevel((level or settings.log_level).upper())
