from typing import Optional
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Configuration settings for the suprec toolkit"""

    # Reproducibility
    seed: Optional[int] = None  # SUPREC_SEED overrides every run's master seed
    default_seed: int = 20100301

    # Decoder work caps
    decoder_work_cap: int = 100_000_000
    grid_point_cap: int = 2_000_000
    max_exact_subset_k: int = 24
    candidate_chunk_size: int = 4096

    # Distance decoding
    default_epsilon_scale: float = 0.1

    # Monte Carlo
    confidence_level: float = 0.95
    bound_slack_se: float = 3.0
    tail_batch_size: int = 20_000
    outage_batch_size: int = 4_096
    jobs: int = 1

    # Numerics
    power_tolerance: float = 0.05
    count_tolerance: float = 1e-9

    # Output
    results_dir: str = "results"
    log_level: str = "INFO"

    class Config:
        env_file = ".env"
        env_prefix = "suprec_"
        case_sensitive = False


# Global settings instance
settings = Settings()
