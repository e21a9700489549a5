"""
CSV and JSON persistence.

Floats are written with 17 significant digits, so re-reading a file gives back the
same float64 values.
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence

import numpy as np
from pydantic import BaseModel

from langmix.errors import ConfigError

FLOAT_FORMAT = "%.17g"


def _cell(value: Any) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return FLOAT_FORMAT % float(value)


def write_columns(path: Path, columns: Mapping[str, Sequence[Any]]) -> Path:
    """Write equal-length columns as a CSV file with a header row."""
    lengths = {len(values) for values in columns.values()}
    if len(lengths) > 1:
        raise ValueError(f"columns have different lengths: {sorted(lengths)}")
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(list(columns))
        for row in zip(*columns.values()):
            writer.writerow([_cell(v) for v in row])
    return path


def write_samples(path: Path, samples: np.ndarray) -> Path:
    """One point per row, d columns named x0..x{d-1}."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return write_columns(path, {f"x{i}": arr[:, i].tolist() for i in range(arr.shape[1])})


def read_columns(path: Path) -> Dict[str, List[float]]:
    """Read a CSV written by :func:`write_columns`."""
    try:
        with Path(path).open("r", encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ConfigError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    try:
        return {name: [float(row[i]) for row in body] for i, name in enumerate(header)}
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"{path} is not a numeric CSV file: {exc}") from exc


def read_samples(path: Path) -> np.ndarray:
    """Sample matrix (n, d); files without a header row are accepted too."""
    try:
        with Path(path).open("r", encoding="utf-8", newline="") as f:
            rows = [row for row in csv.reader(f) if row]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if rows and not _is_numeric(rows[0]):
        rows = rows[1:]
    if not rows:
        raise ConfigError(f"{path} has no samples")
    try:
        return np.array([[float(v) for v in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"{path} is not a numeric CSV file: {exc}") from exc


def _is_numeric(row: Sequence[str]) -> bool:
    try:
        [float(v) for v in row]
    except ValueError:
        return False
    return True


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json")
    return obj


def write_json(path: Path, obj: Any) -> Path:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=True)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def read_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
