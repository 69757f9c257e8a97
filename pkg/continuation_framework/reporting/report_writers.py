"""
JSON and CSV emission for CLI reports.

JSON floats use Python's shortest round-trip repr; CSV floats use 17 significant
digits. Complex numbers are written as [re, im] pairs in JSON and as two columns in CSV.
"""
import csv
import json
import math
import sys
from typing import Any, Iterable, List, Optional, Sequence, TextIO

import numpy as np

from continuation_framework.utils.logger import logger_instance

logger = logger_instance.get_logger_adapter("report_writers")


def to_jsonable(value: Any) -> Any:
    """Recursively convert complex numbers, numpy values, tuples and non-finite floats."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, complex):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    return value


def _open_output(path: Optional[str]) -> TextIO:
    return sys.stdout if path is None else open(path, "w", encoding="utf-8", newline="")


def write_json(payload: Any, path: Optional[str] = None) -> None:
    """Write `payload` as indented JSON to `path` (stdout when None)."""
    stream = _open_output(path)
    try:
        json.dump(to_jsonable(payload), stream, indent=2, sort_keys=False, allow_nan=False)
        stream.write("\n")
    finally:
        if path is not None:
            stream.close()
    if path is not None:
        logger.info(f"JSON report written to {path}")


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], path: str) -> None:
    """Write rows with a header line; floats carry 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        count = 0
        for row in rows:
            writer.writerow([format_cell(cell) for cell in row])
            count += 1
    logger.info(f"CSV with {count} rows written to {path}")


def read_rows(path: str) -> List[List[str]]:
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.reader(f))
