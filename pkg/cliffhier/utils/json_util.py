import json
from pathlib import Path
from typing import Any, Optional, Union

def dumps(obj: Any) -> str:
    """Key-sorted, indented JSON so that artifacts are byte-stable across runs."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

def dump(obj: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(dumps(obj), encoding="utf-8")
    tmp.replace(path)
    return path

def load(path: Union[str, Path]) -> Optional[Any]:
    path = Path(path)
    if not path.exists():
        return None
    return json.loads(path.read_text(encoding="utf-8"))
