"""
sacoder configuration management.

Supports layered configuration:
1. Built-in defaults (lowest priority)
2. .sac.toml config file
3. CLI flags and SAC_* environment variables (highest priority, applied by click)
"""

import tomllib
from dataclasses import dataclass, fields
from pathlib import Path

from sacoder.bench import ModelSource
from sacoder.container import CodingMode
from sacoder.errors import SacError
from sacoder.reconstruct import ExportKind

CONFIG_FILENAME = ".sac.toml"


@dataclass
class SacSettings:
    """
    Defaults for every command.

    ``partition`` is a file path; None selects the shipped edge2x2-11 partition.
    """

    model_total: int = 1 << 16
    mode: str = "semantic"
    export_policy: str = "canonical"
    seed: int = 0
    partition: str | None = None
    width: int = 1280
    model_source: str = "pooled"
    workers: int = 1
    max_m: int = 8
    alphabet: int = 4
    trials: int = 500


# TOML section -> keys it may carry
_SECTIONS = {
    "model": ("model_total", "model_source"),
    "coder": ("mode", "partition"),
    "export": ("export_policy", "seed"),
    "edgemap": ("width",),
    "bench": ("workers",),
    "verify": ("max_m", "alphabet", "trials"),
}

# keys restricted to an enum's values
_CHOICES = {
    "mode": tuple(CodingMode),
    "export_policy": tuple(ExportKind),
    "model_source": tuple(ModelSource),
}


def load_config(root: Path | None = None) -> SacSettings:
    """
    Load configuration from .sac.toml if it exists.

    Unknown sections and keys are ignored.

    Args:
        root: Directory to search for the config file.

    Returns:
        SacSettings with values from the config file applied on top of defaults.

    Raises:
        SacError: If the file is not valid TOML or a value has the wrong type or an unknown choice
    """
    settings = SacSettings()

    if root is None:
        return settings

    config_path = root / CONFIG_FILENAME
    if not config_path.exists():
        return settings

    try:
        with open(config_path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as exc:
        raise SacError(f"Invalid {CONFIG_FILENAME}: {exc}") from exc

    types = {f.name: f.type for f in fields(SacSettings)}
    for section, keys in _SECTIONS.items():
        values = data.get(section, {})
        for key in keys:
            if key not in values:
                continue
            value = values[key]
            expected = int if types[key] is int else str
            if not isinstance(value, expected) or isinstance(value, bool):
                raise SacError(f"{CONFIG_FILENAME}: [{section}] {key} must be {expected.__name__}")
            choices = _CHOICES.get(key)
            if choices is not None and value not in choices:
                allowed = ", ".join(choices)
                raise SacError(f"{CONFIG_FILENAME}: [{section}] {key} must be one of: {allowed}")
            setattr(settings, key, value)

    return settings


def generate_config(settings: SacSettings | None = None) -> str:
    """
    Generate a .sac.toml config file content.

    Args:
        settings: Values to write; defaults when omitted.

    Returns:
        TOML file content as a string.
    """
    s = settings or SacSettings()
    lines = ["# sacoder configuration", "# CLI flags and SAC_* environment variables override these values", ""]
    lines.append("[model]")
    lines.append(f"model_total = {s.model_total}")
    lines.append(f'model_source = "{s.model_source}"  # pooled | per-file')
    lines.append("")
    lines.append("[coder]")
    lines.append(f'mode = "{s.mode}"  # semantic | syntactic')
    if s.partition:
        lines.append(f'partition = "{s.partition}"')
    else:
        lines.append('# partition = "partitions/my-partition.txt"  # default: built-in edge2x2-11')
    lines.append("")
    lines.append("[export]")
    lines.append(f'export_policy = "{s.export_policy}"  # canonical | argmax | random')
    lines.append(f"seed = {s.seed}")
    lines.append("")
    lines.append("[edgemap]")
    lines.append(f"width = {s.width}")
    lines.append("")
    lines.append("[bench]")
    lines.append(f"workers = {s.workers}")
    lines.append("")
    lines.append("[verify]")
    lines.append(f"max_m = {s.max_m}")
    lines.append(f"alphabet = {s.alphabet}")
    lines.append(f"trials = {s.trials}")
    lines.append("")
    return "\n".join(lines)
