"""Server configuration: file paths, tuning knobs, listen address."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path


@dataclass
class ServerConfig:
    region_file: str = ""
    directory_file: str = ""
    log_path: str = ""
    neighbor_radius_m: float = 10_000.0
    official_weight: float = 3
    user_weight: float = 1
    auto_threshold: float = 5
    listen_host: str = "127.0.0.1"
    listen_port: int = 8464


def load_config(path: str | Path) -> ServerConfig:
    """Read a JSON config; unknown keys are rejected to catch typos."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    known = {f.name for f in fields(ServerConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return ServerConfig(**data)
