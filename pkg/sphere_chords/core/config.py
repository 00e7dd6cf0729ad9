"""System configuration management."""

from functools import lru_cache

from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class QuadratureConfig(BaseModel):
    """Adaptive quadrature configuration."""
    tolerance: float = Field(1e-11, gt=0)
    max_depth: int = Field(50, ge=1)
    # per-piece target when accumulating integrals along a grid
    cumulative_tolerance: float = Field(1e-12, gt=0)


class SamplerConfig(BaseModel):
    """Monte Carlo sampler configuration."""
    inverse_cdf_points: int = Field(4096, ge=16)
    bisection_tolerance: float = Field(1e-12, gt=0)
    probe_batch: int = Field(10000, ge=100)
    min_acceptance_rate: float = Field(1e-4, gt=0, lt=1)
    min_hit_rate: float = Field(1e-5, gt=0, lt=1)
    batch_size: int = Field(65536, ge=1024)
    degenerate_norm: float = Field(1e-8, gt=0)
    bounding_margin: float = Field(1e-9, ge=0)
    max_vertex_combinations: int = Field(20000, ge=1)


class VerificationConfig(BaseModel):
    """Acceptance thresholds for verification checks."""
    ks_coefficient: float = 1.36  # asymptotic 95% KS critical value
    ks_slack: float = 1.5
    se_multiplier: float = 3.0
    bp_relative_tolerance: float = 0.01
    estimated_measures_ks_tolerance: float = 0.02
    density_grid: int = Field(2049, ge=3)
    record_timings: bool = False


class ExecutionConfig(BaseModel):
    """Parallel execution configuration."""
    workers: int = Field(1, ge=1)


class MonitoringConfig(BaseModel):
    """Logging configuration."""
    log_level: str = "WARNING"
    log_json: bool = False

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level: {v}")
        return level


class Settings(BaseSettings):
    """Main application settings."""

    model_config = SettingsConfigDict(
        env_prefix="SPHERE_CHORDS_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Sub-configurations
    quadrature: QuadratureConfig = QuadratureConfig()
    sampler: SamplerConfig = SamplerConfig()
    verification: VerificationConfig = VerificationConfig()
    execution: ExecutionConfig = ExecutionConfig()
    monitoring: MonitoringConfig = MonitoringConfig()


@lru_cache()
def get_settings() -> Settings:
    """Get cached application settings."""
    return Settings()
