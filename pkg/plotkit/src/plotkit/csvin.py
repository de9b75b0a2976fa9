"""CSV loading with schema checks that fail before anything is drawn."""

import csv
from pathlib import Path

import numpy as np


class PlotkitError(ValueError):
    """Raised for malformed, empty, or inconsistent input tables."""


def load_table(path) -> dict:
    """Read a CSV into a dict of float column arrays (keyed by header).

    The whole file is parsed eagerly so that every schema failure happens
    before any output file is opened.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PlotkitError(f"{path} is empty") from None
        rows = [row for row in reader if row]
    if not rows:
        raise PlotkitError(f"{path} has a header but no data rows")
    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise PlotkitError(
                f"{path} row {i + 2} has {len(row)} cells, expected {width}"
            )
    columns = {}
    data = np.array(rows, dtype=object).T
    for name, cells in zip(header, data):
        try:
            columns[name] = np.array([float(c) for c in cells])
        except ValueError:
            columns[name] = np.array([str(c) for c in cells])
    return columns


def require_columns(table: dict, names, path) -> None:
    for name in names:
        if name not in table:
            raise PlotkitError(f"column '{name}' missing from {path}")
