"""Shipped desk-scale fixture: the mass-on-buses scenario."""

from __future__ import annotations

from pathlib import Path

_DIR = Path(__file__).parent


def fixture_path(name: str) -> Path:
    path = _DIR / name
    if not path.is_file():
        raise FileNotFoundError(f"no fixture named {name!r}")
    return path


def fixture_dir() -> Path:
    return _DIR
