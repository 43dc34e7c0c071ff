import argparse
import logging
import sys
from typing import Dict, List, Optional

from app.cli.parser import parse_config
from app.cli.runner import run
from app.core.config import settings
from app.core.exceptions import ConfigError, ParseError
from app.schemas.experiment import Command
from app.schemas.landau import CriticalMode


def create_parser() -> argparse.ArgumentParser:
    """
    Membuat parser argumen CLI utama.
    Flag yang tidak dikenal argparse (`--<key> <value>`) diteruskan sebagai override konfigurasi.
    """
    parser = argparse.ArgumentParser(
        prog="python -m app.main",
        allow_abbrev=False,
        description=f"{settings.PROJECT_NAME}: simulasi NQPT hibrida atom-optomekanik.",
    )
    parser.add_argument("command", choices=[command.value for command in Command], help="Eksperimen yang dijalankan")
    parser.add_argument("--config", help="File konfigurasi key = value")
    parser.add_argument("--out", help="Direktori output CSV")
    parser.add_argument("--threads", help="Jumlah worker proses")
    parser.add_argument("--mode", choices=[mode.value for mode in CriticalMode], help="Mode lambda_s1/lambda_a1")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Level logging (DEBUG, INFO, ...)")
    return parser


def collect_overrides(extra: List[str]) -> Dict[str, str]:
    """
    Ubah sisa argumen `--key value` atau `--key=value` menjadi dict override.

    Raises:
        ParseError: Jika token tidak berpasangan
    """
    overrides: Dict[str, str] = {}
    index = 0
    while index < len(extra):
        token = extra[index]
        if not token.startswith("--"):
            raise ParseError(f"argumen tidak dikenal: {token!r}")
        if "=" in token:
            key, value = token[2:].split("=", 1)
            index += 1
        else:
            if index + 1 >= len(extra):
                raise ParseError(f"flag {token} butuh nilai", key=token[2:])
            key, value = token[2:], extra[index + 1]
            index += 2
        overrides[key] = value
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point CLI; mengembalikan exit code proses."""
    args, extra = create_parser().parse_known_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        overrides = collect_overrides(extra)
        for key in ("out", "threads", "mode"):
            value = getattr(args, key)
            if value is not None:
                overrides[key] = value
        config = parse_config(args.config, overrides, command=args.command)
    except ConfigError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
