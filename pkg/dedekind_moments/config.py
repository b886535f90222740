"""Configuration helpers for the moment verification toolkit."""

from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

ROOT_DIR = Path(__file__).resolve().parents[1]

# Load environment variables from .env if present.
load_dotenv(ROOT_DIR / ".env")


class Settings(BaseModel):
    """Centralized toolkit settings."""

    app_name: str = "Dedekind Moment Verifier"
    threads: int = Field(default=int(os.getenv("DM_THREADS", "1")), ge=1)
    default_seed: int = Field(default=int(os.getenv("DM_SEED", "42")))
    shift_gap: float = Field(default=float(os.getenv("DM_SHIFT_GAP", "5e-3")), gt=0)
    report_dir: str = Field(default=os.getenv("DM_REPORT_DIR", "reports"))
    abs_tol: float = Field(default=float(os.getenv("DM_ABS_TOL", "1e-12")), gt=0)
    rel_tol: float = Field(default=float(os.getenv("DM_REL_TOL", "1e-10")), gt=0)
    max_subdivisions: int = Field(default=int(os.getenv("DM_MAX_SUBDIVISIONS", "400")), ge=1)
    kernel_scale: float = Field(default=float(os.getenv("DM_KERNEL_SCALE", "1.0")), gt=0)
    testing: bool = Field(default=os.getenv("TESTING", "0") == "1")

    model_config = ConfigDict(frozen=True)

    @property
    def report_path(self) -> Path:
        """Return the absolute directory used for report files."""
        candidate = Path(self.report_dir)
        if not candidate.is_absolute():
            candidate = ROOT_DIR / candidate
        candidate.mkdir(parents=True, exist_ok=True)
        return candidate.resolve()


@lru_cache
def get_settings() -> Settings:
    """Return a cached settings instance."""
    return Settings()
