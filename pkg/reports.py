"""
Report tables for every verification.

Rows are dataclasses; a report is a pandas DataFrame with a frozen column order.
CSV floats carry 17 significant digits and JSON floats their shortest
round-trip repr, so identical inputs give byte-identical files.
"""
import dataclasses
import json
import math
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd

from errors import ConfigError

VALID_FORMATS = ["csv", "json"]


def rows_to_frame(rows: Sequence[Any], columns: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """
    Build a DataFrame from dataclass rows (or plain dicts).

    Args:
        rows: Dataclass instances or mappings
        columns: Column order; defaults to the dataclass field order

    Returns:
        DataFrame with exactly the requested columns
    """
    records = [dataclasses.asdict(r) if dataclasses.is_dataclass(r) else dict(r) for r in rows]
    if columns is None:
        if rows and dataclasses.is_dataclass(rows[0]):
            columns = [f.name for f in dataclasses.fields(rows[0])]
        else:
            columns = list(records[0]) if records else []
    return pd.DataFrame.from_records(records, columns=list(columns))


def _json_value(value: Any) -> Any:
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return None if math.isnan(value) else value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def render_report(frame: pd.DataFrame, fmt: str = "csv") -> str:
    """
    Serialize a report.

    Raises:
        ConfigError: If fmt is not a valid format
    """
    if fmt not in VALID_FORMATS:
        raise ConfigError(f"Invalid format '{fmt}'. Valid formats: {VALID_FORMATS}")
    if fmt == "csv":
        return frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")
    records = [
        {col: _json_value(val) for col, val in zip(frame.columns, row)}
        for row in frame.itertuples(index=False, name=None)
    ]
    return json.dumps(records, indent=2) + "\n"


def write_report(frame: pd.DataFrame, path: str, fmt: str = "csv") -> Path:
    """Write a report as UTF-8 with LF line endings; returns the path written."""
    out = Path(path)
    text = render_report(frame, fmt)
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return out


def format_table(frame: pd.DataFrame, float_digits: int = 6) -> str:
    """Fixed-width console rendering."""
    if frame.empty:
        return "(no rows)"
    return frame.to_string(index=False, float_format=lambda v: f"{v:.{float_digits}g}")
