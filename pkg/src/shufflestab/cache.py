"""Content-addressed on-disk cache for CLI results.

An entry is a JSON document holding the payload text and its sha256.  Writes
go to a temporary file in the same directory and are renamed into place, so
concurrent invocations never observe a partial entry.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Mapping

from . import __version__

log = logging.getLogger(__name__)

ENV_VAR = "SHUFFLESTAB_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "shufflestab"


def request_key(command: str, quiver: Mapping, params: Mapping, h_sign: str) -> str:
    """sha256 of the canonical request; the sign convention and version are part of it."""
    doc = {"command": command, "quiver": quiver, "params": params, "h_sign": h_sign, "version": __version__}
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _digest(payload: str) -> str:
    return hashlib.sha256(payload.encode()).hexdigest()


class Cache:
    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> str | None:
        p = self.path(key)
        try:
            doc = json.loads(p.read_text(encoding="utf-8"))
            payload = doc["payload"]
            if doc["checksum"] != _digest(payload) or doc["key"] != key:
                raise ValueError("checksum mismatch")
        except FileNotFoundError:
            return None
        except (OSError, ValueError, KeyError, TypeError) as exc:
            log.warning("discarding corrupted cache entry %s: %s", p, exc)
            return None
        return payload

    def put(self, key: str, payload: str) -> None:
        p = self.path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        doc = {"key": key, "checksum": _digest(payload), "payload": payload}
        fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, sort_keys=True)
            os.replace(tmp, p)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise


__all__ = ["Cache", "ENV_VAR", "default_cache_dir", "request_key"]
