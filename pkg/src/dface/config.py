"""Runtime configuration: INI file, environment fallback, validated defaults."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path

from .aus import Emotion
from .errors import ConfigError

__all__ = ["Config", "load_config", "ENV_VAR"]

ENV_VAR = "DFACE_CONFIG"

_KNOWN = {
    "au": {"threshold", "tie_order"},
    "canny": {"low", "high", "sigma"},
    "report": {"format"},
}

_FORMATS = ("csv", "svg", "both")


@dataclass(frozen=True)
class Config:
    au_threshold: float = 0.05
    canny_low: float = 0.1
    canny_high: float = 0.3
    canny_sigma: float = 1.4
    tie_order: tuple[Emotion, ...] = field(default_factory=lambda: tuple(Emotion))
    report_format: str = "both"

    def __post_init__(self):
        if self.au_threshold <= 0:
            raise ConfigError(f"au threshold must be positive, got {self.au_threshold}")
        if self.canny_sigma <= 0:
            raise ConfigError(f"canny sigma must be positive, got {self.canny_sigma}")
        if not (0 < self.canny_low < self.canny_high <= 1):
            raise ConfigError(
                f"canny thresholds must satisfy 0 < low < high <= 1, "
                f"got {self.canny_low}, {self.canny_high}"
            )
        if sorted(e.value for e in self.tie_order) != sorted(e.value for e in Emotion):
            raise ConfigError("tie_order must list each emotion exactly once")
        if self.report_format not in _FORMATS:
            raise ConfigError(
                f"report format must be one of {', '.join(_FORMATS)}, got {self.report_format!r}"
            )


def _parse_tie_order(raw: str) -> tuple[Emotion, ...]:
    names = [t.strip() for t in raw.split(",") if t.strip()]
    order = []
    for name in names:
        try:
            order.append(Emotion(name))
        except ValueError:
            raise ConfigError(f"unknown emotion {name!r} in tie_order") from None
    return tuple(order)


def load_config(path: str | Path | None = None) -> Config:
    """Read the INI config at ``path``, falling back to $DFACE_CONFIG, then
    to built-in defaults.  Unknown sections or keys are rejected."""
    if path is None:
        env = os.environ.get(ENV_VAR)
        if not env:
            return Config()
        path = env
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser()
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    for section in cp.sections():
        if section not in _KNOWN:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp.options(section):
            if key not in _KNOWN[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    def grab_float(section: str, key: str, default: float) -> float:
        if cp.has_option(section, key):
            try:
                return cp.getfloat(section, key)
            except ValueError:
                raise ConfigError(
                    f"{section}.{key} must be a number, got {cp.get(section, key)!r}"
                ) from None
        return default

    defaults = Config()
    tie_order = defaults.tie_order
    if cp.has_option("au", "tie_order"):
        tie_order = _parse_tie_order(cp.get("au", "tie_order"))
    fmt = cp.get("report", "format") if cp.has_option("report", "format") else defaults.report_format
    return Config(
        au_threshold=grab_float("au", "threshold", defaults.au_threshold),
        canny_low=grab_float("canny", "low", defaults.canny_low),
        canny_high=grab_float("canny", "high", defaults.canny_high),
        canny_sigma=grab_float("canny", "sigma", defaults.canny_sigma),
        tie_order=tie_order,
        report_format=fmt,
    )
