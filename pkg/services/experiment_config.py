"""Flat `key = value` experiment configuration files."""

import hashlib
import json
from typing import Any, Dict

from pydantic import ValidationError

from schemas.experiment import BoseSection, DisorderSection, ExperimentConfig, ScheduleSection
from services.exceptions import ConfigParseError

SECTIONS = {
    "schedule": ScheduleSection,
    "disorder": DisorderSection,
    "bose": BoseSection,
}

KNOWN_KEYS = {name for name in ExperimentConfig.model_fields if name not in SECTIONS} | {
    f"{section}.{field}" for section, model in SECTIONS.items() for field in model.model_fields
}


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse `key = value` lines; `#` starts a comment. Unknown or repeated keys are
    rejected; missing keys take their defaults.
    """
    lines: Dict[str, int] = {}
    data: Dict[str, Any] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(line_no, None, f"expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigParseError(line_no, None, "missing key")
        if key not in KNOWN_KEYS:
            raise ConfigParseError(line_no, key, "unknown key")
        if key in lines:
            raise ConfigParseError(line_no, key, f"duplicate key (first set on line {lines[key]})")
        if not value:
            raise ConfigParseError(line_no, key, "missing value")
        lines[key] = line_no

        if "." in key:
            section, field = key.split(".", 1)
            data.setdefault(section, {})[field] = value
        else:
            data[key] = value

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        key = ".".join(str(part) for part in error["loc"] if not isinstance(part, int))
        raise ConfigParseError(lines.get(key), key or None, error["msg"]) from e


def config_fingerprint(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON form of the config."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
