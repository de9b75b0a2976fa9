"""Deterministic CSV output: fixed float format, atomic replace."""

import os
import tempfile

# 17 significant digits round-trip any float64 exactly
FLOAT_FORMAT = "%.17g"


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return str(value)


def write_csv(path: str, header, rows) -> None:
    """Write rows atomically: compose next to the target, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    payload = "\n".join(lines) + "\n"
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(payload)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
