import logging
import os

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Settings(BaseModel):
    """Runtime settings read from the environment. Command-line flags override them."""

    model_config = ConfigDict(frozen=True)

    jobs: int = Field(default=1, ge=1)
    seed: int = 0
    log_level: str = 'WARNING'
    tol: float = Field(default=1e-8, gt=0)
    source_date_epoch: int | None = None

    @field_validator('log_level')
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if not isinstance(logging.getLevelName(value), int):
            raise ValueError(f'Unknown logging level {value}!')
        return value

    @classmethod
    def from_env(cls) -> 'Settings':
        """
        Build settings from `LAMESPEC_*` variables and `SOURCE_DATE_EPOCH`.
        Unset or empty variables fall back to the defaults.

        Returns:
            (Settings): The settings.
        """

        env = {
            'jobs': os.getenv('LAMESPEC_JOBS'),
            'seed': os.getenv('LAMESPEC_SEED'),
            'log_level': os.getenv('LAMESPEC_LOG_LEVEL'),
            'tol': os.getenv('LAMESPEC_TOL'),
            'source_date_epoch': os.getenv('SOURCE_DATE_EPOCH'),
        }
        return cls(**{key: value for key, value in env.items() if value})
