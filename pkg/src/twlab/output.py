"""Reproducible CSV / JSON writers that embed the run configuration."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__


@dataclass
class RunConfig:
    command: str
    seed: int
    out: str
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["version"] = __version__
        return d

    def header_line(self) -> str:
        return "# twlab " + json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))


def fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(path: Path, config: RunConfig, columns, rows) -> Path:
    path = Path(path)
    lines = [config.header_line(), ",".join(columns)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_csv(path: Path) -> tuple[dict, list[str], list[list[str]]]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    config = json.loads(lines[0][len("# twlab "):])
    columns = lines[1].split(",")
    return config, columns, [ln.split(",") for ln in lines[2:]]


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return obj.item()
    return obj


def write_json(path: Path, config: RunConfig, payload: dict) -> Path:
    path = Path(path)
    body = dict(_clean(payload))
    body["config"] = config.as_dict()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
