from __future__ import annotations

import json
import logging
import os
import sys
from typing import Any, Dict

# LogRecord attributes that are not user-supplied `extra=` fields
_RESERVED = set(vars(logging.makeLogRecord({}))) | {"message", "asctime"}


class _PlainFormatter(logging.Formatter):
    """Single-line stderr format; the debug variant adds time, thread and source line."""

    default_fmt = "%(levelname)s %(name)s - %(message)s"
    debug_fmt = (
        "%(asctime)s %(levelname)s %(name)s [%(threadName)s] %(filename)s:%(lineno)d - %(message)s"
    )
    datefmt = "%H:%M:%S"

    def __init__(self, debug: bool = False) -> None:
        super().__init__(fmt=self.debug_fmt if debug else self.default_fmt, datefmt=self.datefmt)


class _JsonFormatter(logging.Formatter):
    """One JSON object per record; `extra=` fields are carried along."""

    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            "ts": self.formatTime(record, datefmt="%Y-%m-%dT%H:%M:%S"),
            "level": record.levelname,
            "logger": record.name,
            "msg": record.getMessage(),
            "thread": record.threadName,
        }
        for key, value in vars(record).items():
            if key not in _RESERVED and not key.startswith("_"):
                payload[key] = value
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False, default=str)


def _coerce_level(level: str | int | None) -> int:
    if isinstance(level, int):
        return level
    if isinstance(level, str):
        upper = level.strip().upper()
        if upper in {"CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG", "NOTSET"}:
            return getattr(logging, upper)
        if upper.isdigit():
            return int(upper)
    return logging.INFO


def level_from_flags(verbose: bool, quiet: bool) -> str | None:
    if verbose:
        return "DEBUG"
    if quiet:
        return "WARNING"
    return None


def setup_logging(level: str | int | None = None, json_logs: bool = False) -> None:
    """
    Configure the root logger once for the process (stderr only).

    Args:
        level: explicit level; falls back to $LOG_LEVEL, then INFO.
        json_logs: emit JSON lines instead of plain text.
    """
    final_level = _coerce_level(level or os.getenv("LOG_LEVEL") or logging.INFO)

    root = logging.getLogger()
    root.setLevel(final_level)
    for h in list(root.handlers):
        root.removeHandler(h)

    handler = logging.StreamHandler(stream=sys.stderr)
    if json_logs:
        handler.setFormatter(_JsonFormatter())
    else:
        handler.setFormatter(_PlainFormatter(debug=final_level <= logging.DEBUG))
    root.addHandler(handler)
