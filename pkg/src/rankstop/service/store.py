"""Append-only session record store.

One JSON document per closed session, written atomically (tmp file +
rename) and never mutated afterwards; an index file maps session id to
path and is rebuilt from a directory scan on startup, so a crash between
write and index update cannot lose a record.
"""

from __future__ import annotations

import json
import os
from pathlib import Path


class SessionStore:
    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.sessions_dir = self.root / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.index_path = self.root / "index.json"
        self._index: dict[str, str] = {}
        self._scan()

    def _scan(self) -> None:
        self._index = {
            p.stem: str(p) for p in sorted(self.sessions_dir.glob("*.json"))
        }
        self._write_index()

    def _write_index(self) -> None:
        tmp = self.index_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(self._index, indent=0, sort_keys=True))
        os.replace(tmp, self.index_path)

    def write_record(self, record: dict) -> Path:
        sid = record["id"]
        path = self.sessions_dir / f"{sid}.json"
        if path.exists():
            raise FileExistsError(f"session record {sid} already stored")
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(record, sort_keys=True))
        os.replace(tmp, path)
        self._index[sid] = str(path)
        self._write_index()
        return path

    def has(self, sid: str) -> bool:
        return sid in self._index

    def read(self, sid: str) -> dict:
        return json.loads(Path(self._index[sid]).read_text())

    def ids(self) -> list[str]:
        return sorted(self._index)

    def read_all(self) -> list[dict]:
        return [self.read(sid) for sid in self.ids()]
