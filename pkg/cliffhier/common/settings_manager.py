from pathlib import Path
from typing import Any, Dict, Set
import logging
import threading

from ..config.path import COMMON_SETTINGS_YAML, component_yaml_path
from ..utils.yaml_util import YAMLProcessor

logger = logging.getLogger("SettingsManager")

class SettingsManager:
    _instance = None
    _CACHE_LOCK = threading.RLock()

    _RESOLVED_CACHE: Dict[str, Dict[str, Any]] = {}
    _RAW_DATA_CACHE: Dict[str, Dict[str, Any]] = {}
    _LOADED_COMPONENTS: Set[str] = set()

    @classmethod
    def get_instance(cls):
        if cls._instance is None:
            with cls._CACHE_LOCK:
                if cls._instance is None:
                    cls._instance = cls()
        return cls._instance

    @classmethod
    def reset(cls):
        """Drop the singleton and every cache (tests, profile switches from the CLI)."""
        with cls._CACHE_LOCK:
            cls._instance = None
            cls._RESOLVED_CACHE.clear()
            cls._RAW_DATA_CACHE.clear()
            cls._LOADED_COMPONENTS.clear()
        YAMLProcessor.clear_cache()

    def __init__(self):
        self.profile = "Default"
        self.common_yaml_path = COMMON_SETTINGS_YAML
        self.yaml_processor = YAMLProcessor(str(self.common_yaml_path))
        self._overrides: Dict[str, Any] = {}

    def profiles(self):
        return [k for k, v in self.yaml_processor.yaml_to_dict().items() if isinstance(v, dict)]

    def get_resolved_value(self, name: str, components_dir: str, component_name: str):
        with self._CACHE_LOCK:
            if name in self._overrides:
                return self._overrides[name]

        resolved_data, yaml_path = self.get_resolved_data_and_path(components_dir, component_name)
        value = resolved_data.get(name)
        if value is None:
            value = self.get_default_value(yaml_path, name)
        if value is None:
            logger.warning("Setting '%s' is not defined for component '%s' (%s)", name, component_name, yaml_path)
        return value

    def get_resolved_data_and_path(self, components_dir: str, component_name: str):
        with self._CACHE_LOCK:
            if component_name in self._RESOLVED_CACHE:
                cached = self._RESOLVED_CACHE[component_name]
                return cached["data"], cached["path"]

            yaml_path = component_yaml_path(components_dir, component_name)
            if not Path(yaml_path).exists():
                logger.warning("Settings YAML not found for component '%s': %s", component_name, yaml_path)

            resolved_data = self.yaml_processor.resolve(yaml_path, self.profile)
            self._RESOLVED_CACHE[component_name] = {"data": resolved_data, "path": yaml_path}
            self._LOADED_COMPONENTS.add(component_name)
            logger.debug("Resolved %d settings for %s under profile %s", len(resolved_data), component_name, self.profile)
            return resolved_data, yaml_path

    def get_default_value(self, yaml_path, name: str):
        with self._CACHE_LOCK:
            key = str(yaml_path)
            if key in self._RAW_DATA_CACHE:
                raw_data = self._RAW_DATA_CACHE[key]
            else:
                raw_data = YAMLProcessor(key).yaml_to_dict()
                self._RAW_DATA_CACHE[key] = raw_data

        value = raw_data.get(name)
        if isinstance(value, dict):
            value = value.get("default")
        return value

    def set_profile(self, profile: str = "Default"):
        if self.profile == profile:
            return
        self.yaml_processor.reload()
        if profile not in self.profiles():
            logger.warning("Unknown settings profile '%s'; component defaults apply", profile)
        self.profile = profile
        with self._CACHE_LOCK:
            self._RESOLVED_CACHE.clear()
            self._LOADED_COMPONENTS.clear()

    def override(self, name: str, value: Any):
        with self._CACHE_LOCK:
            self._overrides[name] = value
        logger.debug("Override %s=%r", name, value)

    def clear_overrides(self):
        with self._CACHE_LOCK:
            self._overrides.clear()

    def snapshot(self) -> Dict[str, Any]:
        """Profile and overrides, enough to rebuild this manager in a worker process."""
        with self._CACHE_LOCK:
            return {"profile": self.profile, "overrides": dict(self._overrides)}

    @classmethod
    def restore(cls, snapshot: Dict[str, Any]):
        cls.reset()
        manager = cls.get_instance()
        manager.set_profile(snapshot.get("profile", "Default"))
        for name, value in snapshot.get("overrides", {}).items():
            manager.override(name, value)
