"""
Parser konfigurasi eksperimen.

Format file: satu pasangan `key = value` per baris, komentar diawali `#`.
Override dari command line (`--key value`) menimpa nilai file.
"""

import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from pydantic import ValidationError

from app.core.exceptions import ConfigError, MissingRequiredError, ParseError, UnknownKeyError
from app.schemas.experiment import Command, ExperimentConfig
from app.schemas.landau import CriticalMode, PhaseAxis
from app.schemas.model import SystemParams

logger = logging.getLogger(__name__)

KEY_ALIASES = {"lambda": "lambda_coll"}

PARAM_KEYS = tuple(SystemParams.model_fields.keys())
REQUIRED_PARAM_KEYS = ("v", "ng", "omega_a", "omega_m", "gamma_m", "chi")

# Key tambahan yang wajib per command
REQUIRED_BY_COMMAND: Dict[Command, Tuple[str, ...]] = {
    Command.STEADY: ("lambda_coll",),
    Command.LANDAU: ("lambda_coll",),
    Command.SWEEP: ("lambda_lo", "lambda_hi"),
    Command.PHASE_DIAGRAM: ("scan_lo", "scan_hi", "omega_a_lo", "omega_a_hi"),
    Command.SPECTRUM: ("lambda_lo", "lambda_hi"),
    Command.ENTANGLE: ("lambda_lo", "lambda_hi"),
    Command.GPE: ("lambda_coll",),
    Command.VALIDATE: ("lambdas",),
}


def _parse_float(raw: str) -> float:
    value = float(raw)
    if not math.isfinite(value):
        raise ValueError(f"nilai harus berhingga: {raw}")
    return value


def _parse_int(raw: str) -> int:
    return int(raw)


def _parse_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"bukan boolean: {raw}")


def _parse_float_list(raw: str) -> List[float]:
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise ValueError("daftar kosong")
    return [_parse_float(item) for item in items]


def _enum_parser(enum_cls: type) -> Callable[[str], Enum]:
    def parse(raw: str) -> Enum:
        return enum_cls(raw)
    return parse


KEY_PARSERS: Dict[str, Callable[[str], Any]] = {
    **{key: _parse_float for key in PARAM_KEYS},
    "command": _enum_parser(Command),
    "lambda_lo": _parse_float,
    "lambda_hi": _parse_float,
    "n_steps": _parse_int,
    "n_lambda": _parse_int,
    "lambdas": _parse_float_list,
    "n_bath_list": _parse_float_list,
    "hysteresis": _parse_bool,
    "axis": _enum_parser(PhaseAxis),
    "scan_lo": _parse_float,
    "scan_hi": _parse_float,
    "n_scan": _parse_int,
    "omega_a_lo": _parse_float,
    "omega_a_hi": _parse_float,
    "n_omega_a": _parse_int,
    "n_grid": _parse_int,
    "dtau": _parse_float,
    "check_grid": _parse_bool,
    "mode": _enum_parser(CriticalMode),
    "threads": _parse_int,
    "out": str,
}


def parse_config(
    path: Optional[str] = None,
    overrides: Optional[Mapping[str, str]] = None,
    command: Optional[str] = None,
) -> ExperimentConfig:
    """
    Baca file konfigurasi lalu gabungkan dengan override.

    Args:
        path: Path file key=value (opsional jika semua key lewat override)
        overrides: Pasangan key → teks nilai dari command line
        command: Nama command (menimpa key `command` di file)

    Returns:
        ExperimentConfig: Konfigurasi tervalidasi

    Raises:
        ConfigError: Jika file tidak ada
        ParseError: Jika baris atau nilai tidak valid
        UnknownKeyError: Jika ada key tidak dikenal
        MissingRequiredError: Jika key wajib tidak ada
    """
    text = ""
    if path is not None:
        config_path = Path(path)
        if not config_path.is_file():
            raise ConfigError(f"File konfigurasi tidak ditemukan: {path}")
        text = config_path.read_text(encoding="utf-8")
        logger.debug(f"Loaded config file {path}")
    return parse_config_text(text, overrides, command)


def parse_config_text(
    text: str,
    overrides: Optional[Mapping[str, str]] = None,
    command: Optional[str] = None,
) -> ExperimentConfig:
    """Versi parse_config untuk isi file yang sudah dibaca."""
    values: Dict[str, Any] = {}
    lines: Dict[str, Optional[int]] = {}

    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"baris harus berbentuk key = value: {raw_line.strip()!r}", line_number=number)
        raw_key, raw_value = line.split("=", 1)
        key = _normalize_key(raw_key, number)
        if key in lines:
            raise ParseError(f"key '{key}' muncul lebih dari sekali", line_number=number, key=key)
        values[key] = _convert(key, raw_value.strip(), number)
        lines[key] = number

    for raw_key, raw_value in (overrides or {}).items():
        key = _normalize_key(raw_key, None)
        values[key] = _convert(key, str(raw_value).strip(), None)
        lines[key] = None

    if command is not None:
        values["command"] = _convert("command", command, None)
        lines["command"] = None
    return _build(values, lines)


def serialize_config(config: ExperimentConfig) -> str:
    """
    Tulis konfigurasi sebagai teks key = value.

    parse_config_text(serialize_config(c)) == c.
    """
    pairs: List[Tuple[str, Any]] = [("command", config.command)]
    pairs.extend((key, getattr(config.params, key)) for key in PARAM_KEYS)
    for key in ExperimentConfig.model_fields:
        if key in ("command", "params"):
            continue
        value = getattr(config, key)
        if value is not None:
            pairs.append((key, value))
    return "".join(f"{key} = {_format_value(value)}\n" for key, value in pairs)


def _normalize_key(raw_key: str, line_number: Optional[int]) -> str:
    key = raw_key.strip().lstrip("-").replace("-", "_").lower()
    if not key:
        raise ParseError("key kosong", line_number=line_number)
    key = KEY_ALIASES.get(key, key)
    if key not in KEY_PARSERS:
        location = f" (baris {line_number})" if line_number is not None else ""
        raise UnknownKeyError(f"Key tidak dikenal: '{key}'{location}")
    return key


def _convert(key: str, raw_value: str, line_number: Optional[int]) -> Any:
    if not raw_value:
        raise ParseError(f"nilai kosong untuk '{key}'", line_number=line_number, key=key)
    try:
        return KEY_PARSERS[key](raw_value)
    except ValueError as e:
        raise ParseError(f"nilai tidak valid untuk '{key}': {raw_value!r} ({e})", line_number=line_number, key=key)


def _build(values: Dict[str, Any], lines: Dict[str, Optional[int]]) -> ExperimentConfig:
    if "command" not in values:
        raise MissingRequiredError("Key wajib 'command' tidak ada")
    command = values["command"]
    required = REQUIRED_PARAM_KEYS + REQUIRED_BY_COMMAND[command]
    missing = [key for key in required if key not in values]
    if missing:
        raise MissingRequiredError(f"Key wajib tidak ada untuk '{command.value}': {', '.join(missing)}")

    param_values = {key: values[key] for key in PARAM_KEYS if key in values}
    param_values.setdefault("lambda_coll", 0.0)
    option_values = {key: value for key, value in values.items() if key not in PARAM_KEYS}
    try:
        params = SystemParams(**param_values)
        return ExperimentConfig(params=params, **option_values)
    except ValidationError as e:
        error = e.errors()[0]
        key = str(error["loc"][-1]) if error.get("loc") else None
        raise ParseError(f"nilai tidak valid untuk '{key}': {error['msg']}", line_number=lines.get(key), key=key)


def _format_value(value: Any) -> str:
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, list):
        return ", ".join(_format_value(item) for item in value)
    return str(value)
