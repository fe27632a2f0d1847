"""Run configuration: defaults, YAML file, ``CELLSCOPE_*`` environment, CLI flags."""

from __future__ import annotations

import dataclasses
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from cellscope.errors import ConfigError

logger = logging.getLogger("cellscope.config")

ENV_PREFIX = "CELLSCOPE_"
DEFAULT_CONFIG_FILE = "cellscope.yaml"

_LIST_FIELDS = {"notebook_roots", "script_roots", "include", "exclude", "rules_enabled"}
_BOOL_FIELDS = {"notebook_aware", "subset_filter", "store_source"}
_INT_FIELDS = {
    "workers",
    "sample_size",
    "seed",
    "top_k",
    "long_file_threshold",
    "histogram_bins",
}
_FLOAT_FIELDS = {"significance", "alpha"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}
_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


@dataclass
class RunConfig:
    """Application settings for one ``cellscope`` invocation."""

    notebook_roots: list[str] = field(default_factory=list)
    script_roots: list[str] = field(default_factory=list)
    include: list[str] = field(default_factory=lambda: ["*.ipynb", "*.py"])
    exclude: list[str] = field(
        default_factory=lambda: ["*/.ipynb_checkpoints/*", "*/.git/*"]
    )
    workers: int = 1
    notebook_aware: bool = False
    store_path: str = "cellscope.db"
    sample_size: int | None = None
    subset_filter: bool = False
    store_source: bool = False
    seed: int = 0
    rules_enabled: list[str] | None = None
    significance: float = 0.001
    alpha: float = 0.005  # echoed in reports only
    top_k: int = 5
    long_file_threshold: int = 250
    histogram_bins: int = 20
    metrics_file: str | None = None
    log_level: str = "INFO"

    def validate(self) -> RunConfig:
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1 (got {self.workers})")
        if self.sample_size is not None and self.sample_size < 1:
            raise ConfigError(f"sample_size must be >= 1 (got {self.sample_size})")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1 (got {self.top_k})")
        if self.histogram_bins < 1:
            raise ConfigError(
                f"histogram_bins must be >= 1 (got {self.histogram_bins})"
            )
        if not 0 < self.significance < 1:
            raise ConfigError(f"significance must be in (0, 1) ({self.significance})")
        if self.log_level.upper() not in _LOG_LEVELS:
            raise ConfigError(f"unknown log level: {self.log_level}")
        return self


def _field_names() -> set[str]:
    return {f.name for f in dataclasses.fields(RunConfig)}


def _coerce(name: str, raw: Any) -> Any:
    """Convert a YAML or environment value to the field's type."""
    if raw is None:
        return None
    try:
        if name in _LIST_FIELDS:
            if isinstance(raw, str):
                return [part.strip() for part in raw.split(",") if part.strip()]
            return [str(item) for item in raw]
        if name in _BOOL_FIELDS:
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text in _TRUE:
                return True
            if text in _FALSE:
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if name in _INT_FIELDS:
            if isinstance(raw, bool):
                raise ValueError(f"not an integer: {raw!r}")
            return int(raw)
        if name in _FLOAT_FIELDS:
            return float(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid value for {name}: {e}") from e
    return str(raw)


def _from_yaml(path: Path) -> dict[str, Any]:
    try:
        with open(path) as f:
            data = yaml.safe_load(f) or {}
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"config file {path} is not valid YAML: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a mapping")
    unknown = set(data) - _field_names()
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {', '.join(sorted(unknown))}")
    return {key: _coerce(key, value) for key, value in data.items()}


def _from_env(environ: dict[str, str]) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for name in _field_names():
        raw = environ.get(ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = _coerce(name, raw)
    return values


def load_config(
    path: str | Path | None = None,
    environ: dict[str, str] | None = None,
    **overrides: Any,
) -> RunConfig:
    """Build a validated RunConfig.

    Precedence, lowest first: defaults, YAML file, environment, ``overrides``
    (``None`` overrides are ignored so unset CLI flags fall through).
    """
    env = dict(os.environ) if environ is None else environ
    values: dict[str, Any] = {}

    config_path = path or env.get(ENV_PREFIX + "CONFIG")
    if config_path:
        values.update(_from_yaml(Path(config_path)))
    elif Path(DEFAULT_CONFIG_FILE).is_file():
        values.update(_from_yaml(Path(DEFAULT_CONFIG_FILE)))

    values.update(_from_env(env))

    for key, value in overrides.items():
        if key not in _field_names():
            raise ConfigError(f"unknown setting: {key}")
        if value is not None:
            values[key] = value

    logger.debug("Resolved configuration keys: %s", sorted(values))
    return RunConfig(**values).validate()
