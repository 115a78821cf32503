# mogpdr/config.py
from __future__ import annotations

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # ---- Output ----
    output_dir: str = "results"
    log_level: str = "INFO"

    # ---- Campaign execution ----
    workers: int = 1  # >1 runs campaign runs in a process pool

    # ---- Conic backend ----
    solver: str = "CLARABEL"
    solver_tol: float = 1e-8

    # ---- DR-CVaR oracle ----
    oracle_grid_points: int = 2001
    oracle_rel_tol: float = 1e-3

    model_config = SettingsConfigDict(
        env_prefix="MOGPDR_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


# Singleton settings object
settings = Settings()
