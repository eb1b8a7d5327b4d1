"""Flat ``key = value`` config files with dotted keys and ``#`` comments.

Example::

    # anisotropic hard-core Strauss
    model.family = strauss
    model.R = 10
    model.gamma = 0
    model.a = 0.7, 1.0
    model.n = 300
    study.replicates = 100
    test.scheme = groupwise
    test.ordering = integral, erl
    test.M = 99
    seed = 1

Comma-separated values are grids.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ConfigError


def parse_config(text: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path) -> dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: no such config file")
    return parse_config(path.read_text(encoding="utf-8"))


def _angle(text: str) -> float:
    """Angles in radians; ``deg`` suffix or ``pi`` expressions accepted."""
    t = text.strip().lower().replace(" ", "")
    if t.endswith("deg"):
        return float(t[:-3]) * np.pi / 180
    if "pi" in t:
        num, _, den = t.partition("/")
        coef = num.replace("*", "").replace("pi", "")
        coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        return coef * np.pi / (float(den) if den else 1.0)
    return float(t)


def get(cfg: dict, key: str, kind=str, default=None):
    if key not in cfg:
        return default
    try:
        if kind == "angle":
            return _angle(cfg[key])
        return kind(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {cfg[key]!r}") from exc


def get_list(cfg: dict, key: str, kind=str, default=None) -> list | None:
    if key not in cfg:
        return default
    items = [s.strip() for s in cfg[key].split(",") if s.strip()]
    try:
        return [_angle(s) if kind == "angle" else kind(s) for s in items]
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {cfg[key]!r}") from exc
