import json
from pathlib import Path

from .output import jsonable


class RunLog:
    """Append-only JSON-lines event log kept inside a run directory (no timestamps)."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def write(self, event: str, **fields):
        obj = {"event": event, **jsonable(fields)}
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")
