import os
import logging
from functools import lru_cache
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError

from exceptions import ConfigError

BASE_DIR = Path(__file__).resolve().parent


def _load_env_file(path: str = ".env") -> None:
    try:
        if not os.path.exists(path):
            return
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    continue
                key, value = line.split("=", 1)
                key = key.strip()
                value = value.strip().strip('"').strip("'")
                if key and key not in os.environ:
                    os.environ[key] = value
    except OSError as e:
        logging.error(f"Could not read {path}: {e}")


class Settings(BaseModel):
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    log_level: str = "WARNING"
    corpus_dir: Path = BASE_DIR / "corpus"
    memo_limit: int = Field(default=1 << 24, ge=0)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Build settings from the environment (after reading .env once)."""
    _load_env_file()
    env = {
        "threads": os.environ.get("CRITSET_THREADS"),
        "log_level": os.environ.get("CRITSET_LOG_LEVEL"),
        "corpus_dir": os.environ.get("CRITSET_CORPUS_DIR"),
        "memo_limit": os.environ.get("CRITSET_MEMO_LIMIT"),
    }
    try:
        return Settings(**{k: v for k, v in env.items() if v})
    except ValidationError as e:
        raise ConfigError(f"Invalid CRITSET_* environment: {e}") from e


def configure_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else getattr(logging, get_settings().log_level.upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(module)s: %(message)s")
