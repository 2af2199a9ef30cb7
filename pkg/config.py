"""Centralized configuration loaded from environment variables."""

from pydantic_settings import BaseSettings
from pydantic import Field
from functools import lru_cache


class Settings(BaseSettings):
    """Toolkit settings – populated from .env file or environment (prefix ``GEBAYES_``)."""

    # Sampler
    default_r: float = Field(default=1.0, ge=0.0, description="Ratio-of-uniforms exponent r")
    default_m: int = Field(default=10_000, ge=1, description="Posterior draws M")
    default_seed: int = Field(default=42, ge=0, description="Seed used when --seed is omitted")
    default_estimator: str = Field(
        default="median",
        pattern="^(median|mean)$",
        description="Bayes point estimator: posterior median or mean",
    )
    max_proposals: int = Field(
        default=1_000_000,
        ge=1,
        description="Proposals after which a low acceptance rate is an error",
    )
    min_acceptance: float = Field(
        default=1e-4,
        gt=0.0,
        lt=1.0,
        description="Minimum acceptance rate tolerated once max_proposals is reached",
    )

    # Simulation study
    sim_replications: int = Field(default=200, ge=1, description="Replications N per grid cell")
    sim_draws: int = Field(default=10_000, ge=1, description="Posterior draws M per replication")
    sim_workers: int = Field(default=1, ge=1, description="Worker processes (1 = serial)")

    # App
    log_level: str = Field(default="INFO")

    model_config = {
        "env_prefix": "GEBAYES_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": False,
        "extra": "ignore",
    }


@lru_cache()
def get_settings() -> Settings:
    """Return a cached Settings singleton."""
    return Settings()
