"""Dataset ingestion: plain-text data files and built-in datasets.

File format: UTF-8, one positive decimal per line. Surrounding whitespace is
ignored, and blank lines and lines starting with ``#`` are skipped.

Usage::

    from harness.data_feed import load_dataset
    data = load_dataset("bearings")          # built-in
    data = load_dataset("lifetimes.txt")     # file
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Dict, Tuple, Union

from models.errors import DataParseError, DatasetError
from models.params import Dataset

logger = logging.getLogger(__name__)

# Endurance of 23 deep groove ball bearings, millions of revolutions to failure.
BEARINGS: Tuple[float, ...] = (
    17.88, 28.92, 33.00, 41.52, 42.12, 45.60, 48.40, 51.84, 51.96, 54.12, 55.56, 67.80,
    68.64, 68.64, 68.88, 84.12, 93.12, 98.64, 105.12, 105.84, 127.92, 128.04, 173.40,
)

BUILTIN_DATASETS: Dict[str, Tuple[float, ...]] = {"bearings": BEARINGS}


def parse_values(text: str) -> Dataset:
    """Parse the one-value-per-line format into a :class:`Dataset`."""
    values = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            value = float(line)
        except ValueError:
            raise DataParseError(f"cannot parse {line!r} as a number", line_no) from None
        if not math.isfinite(value):
            raise DataParseError(f"non-finite value {line!r}", line_no)
        if value <= 0:
            raise DatasetError(f"line {line_no}: observation {value!r} is not positive")
        values.append(value)
    return Dataset.from_values(values)


def load_dataset(source: Union[str, Path]) -> Dataset:
    """Load a built-in dataset by name or parse a data file.

    Raises
    ------
    OSError
        The file cannot be read.
    DataParseError, DatasetError
        A line is malformed, or the values break a Dataset invariant.
    """
    key = str(source)
    if key in BUILTIN_DATASETS:
        logger.debug("using built-in dataset %r", key)
        return Dataset.from_values(BUILTIN_DATASETS[key])

    path = Path(source)
    text = path.read_text(encoding="utf-8")
    data = parse_values(text)
    logger.info("Loaded %d observations from %s", data.n, path)
    return data
