"""Configuration management for minimal autocalibration runs."""

import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from src.errors import ConfigError

load_dotenv()


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from e


@dataclass
class Config:
    """Application configuration."""

    output_dir: Path
    bundle_dir: Path
    threads: int = 1
    seed: int = 0
    log_level: str = "INFO"
    image_width: int = 640
    image_height: int = 480

    @classmethod
    def from_env(cls) -> "Config":
        """Load configuration from environment variables."""
        output_dir = Path(os.getenv("AUTOCAL_OUTPUT_DIR", "./data/runs"))
        bundle_dir = Path(os.getenv("AUTOCAL_BUNDLE_DIR", "./data/bundles"))

        output_dir.mkdir(parents=True, exist_ok=True)
        bundle_dir.mkdir(parents=True, exist_ok=True)

        threads = _int_env("AUTOCAL_THREADS", 1)
        if threads < 1:
            raise ConfigError("AUTOCAL_THREADS must be at least 1")

        return cls(
            output_dir=output_dir,
            bundle_dir=bundle_dir,
            threads=threads,
            seed=_int_env("AUTOCAL_SEED", 0),
            log_level=os.getenv("AUTOCAL_LOG_LEVEL", "INFO").upper(),
            image_width=_int_env("AUTOCAL_IMAGE_WIDTH", 640),
            image_height=_int_env("AUTOCAL_IMAGE_HEIGHT", 480),
        )


config: Config | None = None


def get_config() -> Config:
    """Get the application configuration."""
    global config
    if config is None:
        config = Config.from_env()
    return config
