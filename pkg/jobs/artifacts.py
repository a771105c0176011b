"""CSV and schedule artifact writing."""

from pathlib import Path
from typing import Dict, Iterable

import pandas as pd
import structlog

from config import settings
from services.exceptions import ArtifactIOError

logger = structlog.get_logger()


def _prepare(path: Path) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ArtifactIOError(f"cannot create directory {path.parent}: {e}") from e


def write_csv(path: Path, frame: pd.DataFrame, comments: Dict[str, object]) -> Path:
    """`# key=value` comment lines, then the table with reals at `settings.csv_precision` significant digits."""
    _prepare(path)
    header = "".join(f"# {key}={value}\n" for key, value in comments.items())
    try:
        with open(path, "w", newline="") as handle:
            handle.write(header)
            frame.to_csv(
                handle,
                index=False,
                float_format=f"%.{settings.csv_precision}g",
                lineterminator="\n",
            )
    except OSError as e:
        logger.error("Failed to write CSV artifact", path=str(path), error=str(e))
        raise ArtifactIOError(f"cannot write {path}: {e}") from e
    logger.info("CSV artifact written", path=str(path), rows=len(frame))
    return path


def write_text(path: Path, text: str) -> Path:
    _prepare(path)
    try:
        path.write_text(text)
    except OSError as e:
        logger.error("Failed to write artifact", path=str(path), error=str(e))
        raise ArtifactIOError(f"cannot write {path}: {e}") from e
    logger.info("Artifact written", path=str(path))
    return path


def csv_body(path: Path) -> str:
    """File contents without the comment header."""
    return "".join(line for line in _lines(path) if not line.startswith("#"))


def _lines(path: Path) -> Iterable[str]:
    with open(path) as handle:
        yield from handle
