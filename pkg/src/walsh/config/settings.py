from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Settings class used to grab environment variables from .env file.
    Variables are read with the WALSH_ prefix, e.g. WALSH_LOG_LEVEL=DEBUG.
    """

    model_config = SettingsConfigDict(
        env_prefix="WALSH_", env_file=".env", extra="ignore"
    )

    log_level: str = "INFO"

    # "auto" verification picks the column-subset scan up to this k,
    # then the subset enumeration while C(n, k) stays under the budget
    exhaustive_max_k: int = Field(default=20, ge=1)
    bruteforce_max_subsets: int = Field(default=1_000_000, ge=1)

    exhaustive_hard_ceiling: int = Field(default=22, ge=1)
    bruteforce_hard_ceiling: int = Field(default=16, ge=1)
    scan_chunk_size: int = Field(default=1 << 16, ge=1)

    default_seed: int = 0
    sim_workers: int = Field(default=1, ge=1)


@lru_cache
def get_settings() -> Settings:
    return Settings()
