"""Configuration loader for bdk."""

import os
from functools import lru_cache
from pathlib import Path

import yaml
from dotenv import load_dotenv

load_dotenv()

# Project root (parent of src)
PROJECT_ROOT = Path(__file__).resolve().parent.parent


@lru_cache(maxsize=1)
def load_config() -> dict:
    """Load config.yaml from project root."""
    config_path = PROJECT_ROOT / "config.yaml"
    if not config_path.exists():
        raise FileNotFoundError(f"Config not found: {config_path}")
    with open(config_path) as f:
        return yaml.safe_load(f)


def section(name: str) -> dict:
    """Return one top-level section of config.yaml (empty dict if absent)."""
    return dict(load_config().get(name) or {})


def get_output_root() -> Path:
    """Resolve the artifact root: BDK_OUT_DIR wins over paths.output_root."""
    override = get_env("BDK_OUT_DIR").strip()
    if override:
        return Path(override).expanduser().resolve()
    root = Path(section("paths").get("output_root", "runs"))
    return root if root.is_absolute() else PROJECT_ROOT / root


def get_env(key: str, default: str = "") -> str:
    """Get environment variable with optional default."""
    return os.environ.get(key, default)
