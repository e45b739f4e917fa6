import logging
import os
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from .errors import ConfigError
from .models import RunConfig

logger = logging.getLogger(__name__)

# Navigate up from src/gfactor_fidelity/config.py to project root
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.dirname(os.path.dirname(BASE_DIR))

# Standard config location: ~/.config/gfactor_fidelity/run.conf
CONFIG_DIR = os.path.expanduser("~/.config/gfactor_fidelity")
CONFIG_FILE = os.path.join(CONFIG_DIR, "run.conf")
LOCAL_CONFIG_FILE = os.path.join(PROJECT_ROOT, "run.conf")

DEFAULT_CONFIG_FILE = CONFIG_FILE if os.path.exists(CONFIG_FILE) else LOCAL_CONFIG_FILE


def parse_key_values(text: str) -> dict[str, str]:
    """Parses `key = value` lines; `#` starts a comment, blank lines are ignored."""
    values: dict[str, str] = {}
    for number, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {number}: expected 'key = value', got {raw_line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {number}: empty key")
        if key in values:
            raise ConfigError(f"line {number}: duplicate key {key!r}")
        values[key] = value
    return values


def load_config(
    path: str | Path | None = None, overrides: dict[str, Any] | None = None
) -> RunConfig:
    """Loads the run config, then applies non-None overrides (CLI flags).

    Without an explicit path the user config, then the project-root sample, is
    used; if neither exists the defaults apply.
    """
    explicit = path is not None
    config_path = Path(path if explicit else DEFAULT_CONFIG_FILE)

    values: dict[str, Any] = {}
    if config_path.exists():
        try:
            values.update(parse_key_values(config_path.read_text()))
        except OSError as e:
            raise ConfigError(f"cannot read {config_path}: {e}") from e
        logger.info("Loaded config from %s", config_path)
    elif explicit:
        raise ConfigError(f"config file not found: {config_path}")

    values.update({key: value for key, value in (overrides or {}).items() if value is not None})

    try:
        return RunConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigError(f"invalid config: {e}") from e


def dump_config(config: RunConfig) -> str:
    """Inverse of parse_key_values for a RunConfig."""
    lines = []
    for key, value in config.model_dump(mode="json").items():
        if isinstance(value, list):
            value = ", ".join(
                ":".join(str(part) for part in item) if isinstance(item, list) else str(item)
                for item in value
            )
        elif value is None:
            value = "none"
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
