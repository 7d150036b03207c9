from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Project
    PROJECT_NAME: str = "SID-DMD"
    VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "console"  # console, json

    # Runs
    DEFAULT_DT: float = 1.0
    DEFAULT_OUTPUT_DIR: str = "siddmd_out"
    MODEL_SCHEMA_VERSION: int = 1

    # Numerical tolerances
    DEGENERACY_REL_TOL: float = 1e-10
    CONSISTENCY_REL_TOL: float = 1e-8
    FEASIBILITY_REL_TOL: float = 1e-8
    MODE_CONDITION_LIMIT: float = 1e10
    DEFECTIVE_CONDITION_LIMIT: float = 1e10

    # Brute-force oracle
    ALS_MAX_ITERATIONS: int = 50
    ALS_TOL: float = 1e-10
    ORACLE_SAMPLES: int = 10_000
    ORACLE_ALS_STARTS: int = 20

    # Synthetic systems
    SYSTEM_SAMPLING_ATTEMPTS: int = 100
    SYSTEM_CONDITION_LIMIT: float = 100.0

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", case_sensitive=True, extra="ignore")

    @field_validator(
        "DEGENERACY_REL_TOL",
        "CONSISTENCY_REL_TOL",
        "FEASIBILITY_REL_TOL",
        "MODE_CONDITION_LIMIT",
        "DEFECTIVE_CONDITION_LIMIT",
        "ALS_TOL",
        "DEFAULT_DT",
    )
    @classmethod
    def validate_positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("Tolerances, limits and dt must be positive")
        return v

    @field_validator("LOG_FORMAT")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        if v.lower() not in ("console", "json"):
            raise ValueError("LOG_FORMAT must be 'console' or 'json'")
        return v.lower()

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        if v.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Unknown log level {v}")
        return v.upper()


settings = Settings()
