"""Sectioned key-value config files with explicit units and includes.

Format::

    # comment
    include other.cfg

    [device.aos_write]
    v_t = 0.60 V
    ss = 63 mV/dec
    kind = AOS

Numeric values must carry a unit (or be bare for dimensionless / integer
values).  ``include`` lines splice another file at that point; later keys
override earlier ones.  The packaged ``baseline.cfg`` holds the shipped
calibrated defaults and is loaded when no file is given.
"""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .units import Quantity, UnitError, parse_quantity

ENV_SEARCH_PATH = "BEOLMEM_CONFIG_PATH"


class Config:
    """Parsed config: ``sections[name][key] -> str``, typed getters."""

    def __init__(self, sections: dict[str, dict[str, str]] | None = None):
        self.sections: dict[str, dict[str, str]] = sections or {}

    # -- raw access -------------------------------------------------

    def section(self, name: str) -> dict[str, str]:
        try:
            return self.sections[name]
        except KeyError:
            raise ConfigError(f"missing config section [{name}]") from None

    def has(self, section: str, key: str) -> bool:
        return key in self.sections.get(section, {})

    def _raw(self, section: str, key: str, default=None) -> str:
        sec = self.sections.get(section, {})
        if key not in sec:
            if default is not None:
                return default
            raise ConfigError(f"missing config key {key!r} in [{section}]")
        return sec[key]

    # -- typed getters ----------------------------------------------

    def get(self, section: str, key: str, dimension: str, default: float | None = None) -> float:
        """Numeric value converted to SI, validated against `dimension`."""
        if default is not None and not self.has(section, key):
            return default
        raw = self._raw(section, key)
        try:
            q: Quantity = parse_quantity(raw)
            return q.in_dim(dimension)
        except UnitError as exc:
            raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc

    def get_int(self, section: str, key: str, default: int | None = None) -> int:
        if default is not None and not self.has(section, key):
            return default
        raw = self._raw(section, key)
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key} = {raw!r}: expected integer") from None

    def get_str(self, section: str, key: str, default: str | None = None) -> str:
        return self._raw(section, key, default)

    def get_bool(self, section: str, key: str, default: bool | None = None) -> bool:
        if default is not None and not self.has(section, key):
            return default
        raw = self._raw(section, key).lower()
        if raw in ("true", "yes", "on", "1"):
            return True
        if raw in ("false", "no", "off", "0"):
            return False
        raise ConfigError(f"[{section}] {key} = {raw!r}: expected boolean")

    # -- merging ----------------------------------------------------

    def merge(self, other: "Config") -> "Config":
        """Overlay `other` on top of this config (other wins)."""
        merged = {k: dict(v) for k, v in self.sections.items()}
        for name, sec in other.sections.items():
            merged.setdefault(name, {}).update(sec)
        return Config(merged)


def _search_dirs(relative_to: Path | None) -> list[Path]:
    dirs = []
    if relative_to is not None:
        dirs.append(relative_to)
    dirs.append(Path.cwd())
    env = os.environ.get(ENV_SEARCH_PATH)
    if env:
        dirs.extend(Path(p) for p in env.split(os.pathsep) if p)
    return dirs


def _resolve(name: str, relative_to: Path | None) -> Path:
    cand = Path(name)
    if cand.is_absolute():
        if cand.exists():
            return cand
        raise ConfigError(f"config file not found: {name}")
    for d in _search_dirs(relative_to):
        p = d / name
        if p.exists():
            return p
    raise ConfigError(f"config file not found on search path: {name}")


def parse_config_text(text: str, origin: str = "<string>", relative_to: Path | None = None) -> Config:
    sections: dict[str, dict[str, str]] = {}
    current: str | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("include"):
            target = stripped[len("include"):].strip().strip("=").strip()
            if not target:
                raise ConfigError(f"{origin}:{lineno}: empty include")
            inc = load_config_file(_resolve(target, relative_to))
            base = Config(sections)
            sections = base.merge(inc).sections
            current = None
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            if not current:
                raise ConfigError(f"{origin}:{lineno}: empty section name")
            sections.setdefault(current, {})
            continue
        if "=" not in stripped:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value'")
        if current is None:
            raise ConfigError(f"{origin}:{lineno}: key before any [section]")
        key, value = stripped.split("=", 1)
        sections[current][key.strip()] = value.strip()
    return Config(sections)


def load_config_file(path: str | Path) -> Config:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, origin=str(path), relative_to=path.parent)


def baseline_config() -> Config:
    """The packaged calibrated defaults."""
    text = resources.files("beolmem").joinpath("baseline.cfg").read_text()
    return parse_config_text(text, origin="baseline.cfg")


def load_config(path: str | Path | None = None) -> Config:
    """Baseline defaults overlaid with `path` when given."""
    cfg = baseline_config()
    if path is not None:
        cfg = cfg.merge(load_config_file(_resolve(str(path), None)))
    return cfg
