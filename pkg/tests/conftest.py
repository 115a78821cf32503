"""Shared test setup: repo root on sys.path, campaigns in-process, outputs under tmp."""
from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from mogpdr.config import settings  # noqa: E402


@pytest.fixture(autouse=True)
def _isolated_settings(tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "workers", 1)
    monkeypatch.setattr(settings, "output_dir", str(tmp_path / "results"))
    yield
