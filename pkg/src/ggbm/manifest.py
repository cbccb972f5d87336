"""Run manifests and round-trip output writers.

Floats are written with ``repr``, the shortest decimal string that parses
back to the same double, in both CSV and JSON.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
import os
import secrets
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__ as TOOL_VERSION


def fresh_seed() -> int:
    return secrets.randbits(64)


def utc_timestamp() -> str:
    """Now in UTC, or SOURCE_DATE_EPOCH when set (reproducible builds)."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (_dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch
            else _dt.datetime.now(_dt.timezone.utc))
    return when.replace(microsecond=0).isoformat().replace("+00:00", "Z")


def _plain(obj):
    """numpy scalars/arrays to builtin types; reject non-finite floats."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return _plain(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=1, allow_nan=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def csv_text(header, columns) -> str:
    cols = [np.asarray(c, dtype=float) for c in columns]
    n = cols[0].size
    if any(c.size != n for c in cols):
        raise ValueError("CSV columns must have equal length")
    lines = [",".join(header)]
    rows = np.column_stack(cols).tolist()
    lines.extend(",".join(repr(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(path, header, columns):
    Path(path).write_text(csv_text(header, columns))


@dataclass
class RunManifest:
    command: str
    params: dict | None
    config: dict
    master_seed: int | None
    outputs: list[str] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    tool_version: str = TOOL_VERSION
    timestamp: str = field(default_factory=utc_timestamp)

    def to_dict(self) -> dict:
        return asdict(self)

    def write(self, path):
        write_json(path, self.to_dict())


def sidecar_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")
