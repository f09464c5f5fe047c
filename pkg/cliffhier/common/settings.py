from enum import Enum
from .settings_manager import SettingsManager

class ComponentSettings(Enum):
    def __new__(cls, value, components_dir):
        obj = object.__new__(cls)
        obj._value_ = value
        obj._components_dir = components_dir
        return obj

    HIERARCHY = "hierarchy", "core"
    AFFINE_CLASSIFY = "affine_classify", "core"
    SEARCH_CH3 = "search_ch3", "core"
    CLI = "cli", "."

    def get_value(self, name: str, components_dir: str = None):
        components_dir = self._components_dir if components_dir is None else components_dir
        return SettingsManager.get_instance().get_resolved_value(name, components_dir, self.value)
