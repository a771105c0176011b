"""Configuration management for the valve-protocol simulator."""

from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Process settings; experiment parameters live in the experiment config file."""

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")
    log_json: bool = Field(default=False, description="Render logs as JSON instead of console text")

    # Execution
    workers: int = Field(default=1, ge=1, description="Threads used for Monte Carlo samples (results do not depend on it)")

    # Artifacts
    output_dir: str = Field(default="results", description="Directory for CSV and schedule artifacts")
    csv_precision: int = Field(default=12, ge=1, le=17, description="Significant digits for CSV reals")

    class Config:
        env_prefix = "VALVE_"
        env_file = ".env"
        case_sensitive = False
        extra = "ignore"  # Ignore extra fields from .env that aren't in the model


# Global settings instance
settings = Settings()
