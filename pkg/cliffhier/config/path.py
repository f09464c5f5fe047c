# paths.py
import os
from pathlib import Path

BASE_DIR = Path(__file__).parent.parent

# resources
RESOURCES_DIR = BASE_DIR / "resources"
CIRCUITS_DIR = RESOURCES_DIR / "circuits"

# settings YAML
COMMON_SETTINGS_YAML = RESOURCES_DIR / "common_settings_any.yaml"

# class database
CACHE_DIR_ENV = "CLIFFHIER_CACHE_DIR"
DEFAULT_CACHE_DIR = Path.home() / ".cache" / "cliffhier"

def component_yaml_path(component_dir: str, component_name: str) -> Path:
    return BASE_DIR / component_dir / component_name / f"{component_name}.yaml"

def cache_dir(env: str = CACHE_DIR_ENV) -> Path:
    override = os.environ.get(env)
    return Path(override) if override else DEFAULT_CACHE_DIR

def circuit_path(name: str) -> Path:
    return CIRCUITS_DIR / f"{name}.gates"
