"""
Configuration from environment variables.
Uses pydantic-settings: loads from env (prefix ERVO_) and optionally .env, validates types.
Every numerical default the models rely on lives here so runs are reproducible from config alone.
"""
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

BUNDLED_PROFILE = Path(__file__).resolve().parent / "data" / "ervo4.json"


class Settings(BaseSettings):
    """Toolkit settings. All have defaults; override with ERVO_<NAME>."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="ERVO_",
        extra="ignore",
    )

    APP_NAME: str = "ervo"
    LOG_LEVEL: str = "INFO"
    # also write the log to this file when set
    LOG_FILE: Path | None = None
    PROFILE_PATH: Path = BUNDLED_PROFILE
    OUTPUT_DIR: Path = Path("results")
    # CORS for the HTTP surface: comma-separated origins, or "*" for all
    CORS_ORIGINS: str = "*"

    # spin-core
    STRENGTH_FLOOR: float = 1e-6
    CROSSING_SCAN_STEP_T: float = 0.5e-3
    CROSSING_TOLERANCE_T: float = 1e-9
    # roots of one level pair closer than this are the same crossing
    CROSSING_DEDUP_T: float = 1e-5
    MAX_HAMILTONIAN_DIM: int = 64

    # optical-model
    SATURATION_FLOOR: float = 1e-6
    DEFAULT_TEMPERATURE_K: float = 1.0

    # cavity-ensemble
    DEFAULT_GAMMA_HZ: float = 1e3
    QUAD_SPAN_HWHM: float = 40.0
    QUAD_RELATIVE_TOLERANCE: float = 1e-10
    ZERO_CROSSING_ITERATIONS: int = 80

    # estimation (Levenberg-Marquardt schedule)
    LM_LAMBDA0: float = 1e-3
    LM_LAMBDA_UP: float = 10.0
    LM_LAMBDA_DOWN: float = 0.1
    LM_MAX_ITERATIONS: int = 200
    LM_XTOL: float = 1e-10
    LM_GTOL: float = 1e-10
    CONDITION_WARNING: float = 1e10


# Single instance — import and use: from ervo.config import settings
settings = Settings()
