import os
from enum import Enum
from pathlib import Path
from typing import Mapping, Optional

import structlog
from pydantic import BaseModel, Field

logger = structlog.get_logger()

ENV_PREFIX = "PM_SCHEME_"

DEFAULT_MAX_ORACLE_N = 8
DEFAULT_MAX_DIAMETER_N = 7


def get_config_path() -> str:
    """Get the path to the config file in the user's home directory."""
    return os.path.expanduser("~/.pm_scheme")


def default_data_dir() -> str:
    return os.path.expanduser("~/.cache/pm_scheme")


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    PRETTY = "pretty"


class Config(BaseModel):
    """
    Settings shared by every command: where oracle tables are cached, the resource guards,
    and the seed that makes oracle runs reproducible.
    """
    data_dir: str = Field(default_factory=default_data_dir)
    max_oracle_n: int = DEFAULT_MAX_ORACLE_N
    max_diameter_n: int = DEFAULT_MAX_DIAMETER_N
    format: OutputFormat = OutputFormat.PRETTY
    seed: int = 1
    workers: int = 1
    retries: int = 8

    def model_post_init(self, __context):
        if self.max_oracle_n < 2 or self.max_diameter_n < 2:
            raise ValueError("Resource guards must be at least 2")
        if self.workers < 1:
            raise ValueError("At least one worker is required")
        if self.retries < 1:
            raise ValueError("At least one retry is required")

    @classmethod
    def load(cls) -> 'Config':
        """Load the config from ~/.pm_scheme or fall back to defaults."""
        config_path = get_config_path()
        if os.path.exists(config_path):
            try:
                with open(config_path, 'r') as f:
                    return cls.model_validate_json(f.read())
            except Exception as error:
                logger.warning("Ignoring unreadable config", path=config_path, error=str(error))
                return cls()
        return cls()

    def save(self) -> None:
        """Save the config to ~/.pm_scheme."""
        with open(get_config_path(), 'w') as f:
            f.write(self.model_dump_json(indent=2))

    def with_environment(self, environ: Optional[Mapping[str, str]] = None) -> 'Config':
        """Apply PM_SCHEME_* overrides for the data directory, guards, seed and workers."""
        environ = os.environ if environ is None else environ
        updates = {}
        for field in ("data_dir", "max_oracle_n", "max_diameter_n", "seed", "workers"):
            value = environ.get(ENV_PREFIX + field.upper())
            if value is not None:
                updates[field] = value
        if not updates:
            return self
        return type(self).model_validate({**self.model_dump(), **updates})

    def with_overrides(self, **overrides) -> 'Config':
        """Apply command-line values; None means the flag was not given."""
        updates = {key: value for key, value in overrides.items() if value is not None}
        if not updates:
            return self
        return type(self).model_validate({**self.model_dump(), **updates})

    @classmethod
    def resolve(cls, **overrides) -> 'Config':
        """Defaults, then the config file, then the environment, then command-line values."""
        return cls.load().with_environment().with_overrides(**overrides)

    @property
    def data_path(self) -> Path:
        return Path(self.data_dir)
