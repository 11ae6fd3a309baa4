"""Experiment configuration: `key = value` files with flag overrides."""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field

from .errors import ConfigError


def parse_config_file(path: str) -> dict:
    """Read a plain `key = value` file; '#' starts a comment."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (tok.strip() for tok in line.split("=", 1))
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            out[key.replace("-", "_")] = val
    return out


def coerce(value: str, typ):
    """Convert a raw config string to the schema type."""
    if typ is bool:
        low = str(value).strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"cannot read boolean from {value!r}")
    if isinstance(typ, tuple):  # list types: (list, elem_type)
        _, elem = typ
        return [coerce(tok, elem) for tok in str(value).split(",") if tok.strip()]
    try:
        return typ(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot read {typ.__name__} from {value!r}") from exc


@dataclass
class ExperimentConfig:
    """Resolved options for one subcommand run."""

    subcommand: str
    options: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.options[key]

    def get(self, key, default=None):
        return self.options.get(key, default)

    def canonical(self) -> str:
        body = ";".join(f"{k}={self.options[k]}" for k in sorted(self.options))
        return f"{self.subcommand};{body}"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def resolve(subcommand: str, schema: dict, file_values: dict,
            flag_values: dict) -> ExperimentConfig:
    """Merge defaults < config file < explicit flags, validating keys.

    ``schema`` maps key -> (type, default, help). Unknown file keys are
    ConfigErrors; flag values equal to None mean "not given".
    """
    opts = {}
    for key, (typ, default, _help) in schema.items():
        opts[key] = default
    for key, raw in file_values.items():
        if key not in schema:
            raise ConfigError(f"unknown config key {key!r} for {subcommand}")
        opts[key] = coerce(raw, schema[key][0])
    for key, val in flag_values.items():
        if val is None:
            continue
        if key not in schema:
            continue
        opts[key] = val
    missing = [k for k, v in opts.items() if v is None]
    if missing:
        raise ConfigError(f"{subcommand}: missing required option(s) {missing}")
    return ExperimentConfig(subcommand=subcommand, options=opts)
