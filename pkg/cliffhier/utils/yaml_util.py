import os
import yaml
import threading
from typing import Any, Dict

_FILE_CACHE: Dict[str, Dict[str, Any]] = {}
_CACHE_LOCK = threading.RLock()

class YAMLProcessor:
    def __init__(self, path: str):
        self.path = str(path)
        self.data = self._load_file_cached(self.path) or {}

#region Cache Helpers
    @staticmethod
    def _get_mtime(path: str) -> float:
        try:
            return os.path.getmtime(path)
        except OSError:
            return 0.0

    @staticmethod
    def _read(path: str) -> Dict[str, Any]:
        try:
            with open(path, "r", encoding="utf-8") as f:
                return yaml.safe_load(f) or {}
        except FileNotFoundError:
            return {}

    @classmethod
    def _load_file_cached(cls, path: str) -> Dict[str, Any]:
        """Re-read a settings file only when its mtime moved."""
        path = str(path)
        with _CACHE_LOCK:
            mtime = cls._get_mtime(path)
            cached = _FILE_CACHE.get(path)
            if cached and cached.get("mtime") == mtime:
                return cached.get("data")
            data = cls._read(path)
            _FILE_CACHE[path] = {"mtime": mtime, "data": data}
            return data

    @classmethod
    def clear_cache(cls):
        with _CACHE_LOCK:
            _FILE_CACHE.clear()

    @classmethod
    def force_reload(cls, path: str) -> Dict[str, Any]:
        """Read ``path`` again even when its mtime did not move."""
        path = str(path)
        with _CACHE_LOCK:
            data = cls._read(path)
            _FILE_CACHE[path] = {"mtime": cls._get_mtime(path), "data": data}
            return data
#endregion

    def reload(self) -> Dict[str, Any]:
        self.data = self._load_file_cached(self.path) or {}
        return self.data

    def yaml_to_dict(self) -> Dict[str, Any]:
        return dict(self._load_file_cached(self.path) or {})

#region Resolving Helpers
    def resolve_value(self, value: Any) -> Any:
        """
        Expand {a.b.c} style tokens against self.data.
        Non-token values come back unchanged, unknown tokens as None.
        """
        if not isinstance(value, str):
            return value
        if value.startswith("{") and value.endswith("}"):
            result = self.data
            for k in value.strip("{}").split("."):
                if isinstance(result, dict) and k in result:
                    result = result[k]
                else:
                    return None
            return result
        return value

    def profile_dict(self, profile: str) -> Dict[str, Any]:
        """Return the dict for a given profile inside self.data, or {}."""
        if not isinstance(self.data, dict):
            return {}
        found = self.data.get(profile)
        if isinstance(found, dict):
            return found
        alt = self.data.get("Profiles")
        if isinstance(alt, dict):
            return alt.get(profile, {}) or {}
        return {}

    def resolve(self, path: str, profile: str = "Default") -> Dict[str, Any]:
        """
        Resolve a component YAML against the settings profile held in self.data.

        A component entry is either a bare literal, a "{a.b}" token, or a mapping
        ``{key: ProfileKey, default: literal}``. Mapping entries take the profile
        value when the profile defines ``ProfileKey`` and fall back to ``default``.
        """
        comp_data = self._load_file_cached(path) or {}
        settings = self.profile_dict(profile)
        resolved: Dict[str, Any] = {}

        for name, entry in (comp_data.items() if isinstance(comp_data, dict) else []):
            if isinstance(entry, dict) and "key" in entry:
                key = self.resolve_value(entry["key"])
                if isinstance(key, str) and key in settings:
                    resolved[name] = settings[key]
                else:
                    resolved[name] = self.resolve_value(entry.get("default"))
            else:
                resolved[name] = self.resolve_value(entry)
        return resolved
#endregion
