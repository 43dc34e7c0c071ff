"""
Runner CLI: dispatch command, tulis CSV, petakan error ke exit code.
"""

import logging
import sys
from pathlib import Path
from typing import Dict, List

import pandas as pd

from app.cli.commands import COMMAND_HANDLERS
from app.cli.parser import serialize_config
from app.core.config import settings
from app.core.exceptions import ConfigError, SimulationError
from app.schemas.experiment import ExperimentConfig

logger = logging.getLogger(__name__)


def run(config: ExperimentConfig) -> int:
    """
    Jalankan satu eksperimen dan tulis hasilnya sebagai CSV.

    Args:
        config: Konfigurasi tervalidasi

    Returns:
        int: 0 jika sukses, exit code error domain jika gagal
    """
    try:
        frames = COMMAND_HANDLERS[config.command](config)
        written = write_outputs(frames, config)
    except (SimulationError, ConfigError) as e:
        logger.error(f"{config.command.value} failed: {type(e).__name__}: {e}")
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        logger.error(f"Cannot write output: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1

    logger.info(f"{config.command.value} finished, wrote {', '.join(str(path) for path in written)}")
    return 0


def write_outputs(frames: Dict[str, pd.DataFrame], config: ExperimentConfig) -> List[Path]:
    """
    Tulis setiap DataFrame ke direktori output.

    Tiap file diawali blok komentar `# key = value` yang menggemakan
    seluruh konfigurasi, lalu header kolom. Urutan file mengikuti
    urutan nama agar output deterministik.
    """
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = "".join(f"# {line}\n" for line in serialize_config(config).splitlines())

    written = []
    for name in sorted(frames):
        path = out_dir / name
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(header)
            frames[name].to_csv(
                handle,
                index=False,
                float_format=settings.CSV_FLOAT_FORMAT,
                lineterminator="\n",
            )
        written.append(path)
    return written
