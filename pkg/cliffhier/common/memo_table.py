import logging
import threading
from typing import Any, Callable, Dict, Hashable, Optional

logger = logging.getLogger("MemoTable")


class MemoTable:
    """Thread-safe insert-or-get table shared by the level oracle workers."""

    def __init__(self, limit: int = 0):
        self._lock = threading.RLock()
        self._data: Dict[Hashable, Any] = {}
        self.limit = limit
        self.hits = 0
        self.misses = 0

    def __len__(self):
        with self._lock:
            return len(self._data)

    def get(self, key: Hashable) -> Optional[Any]:
        with self._lock:
            value = self._data.get(key)
            if value is None:
                self.misses += 1
            else:
                self.hits += 1
            return value

    def insert_or_get(self, key: Hashable, value: Any) -> Any:
        with self._lock:
            existing = self._data.get(key)
            if existing is not None:
                return existing
            self._evict_if_full()
            self._data[key] = value
            return value

    def update(self, key: Hashable, merge: Callable[[Optional[Any]], Any]) -> Any:
        """Replace the entry for ``key`` by ``merge(old)`` atomically."""
        with self._lock:
            old = self._data.get(key)
            if old is None:
                self._evict_if_full()
            value = merge(old)
            self._data[key] = value
            return value

    def clear(self):
        with self._lock:
            self._data.clear()
            self.hits = self.misses = 0

    def _evict_if_full(self):
        if self.limit and len(self._data) >= self.limit:
            logger.info("Memo table reached %d entries; clearing", self.limit)
            self._data.clear()
