"""Figure rendering for the experiment CSV artifacts.

Strictly one-way: this package reads CSV files and writes images; it never
imports the simulator.
"""

from .csvin import PlotkitError, load_table, require_columns
from .figures import (
    RENDERERS,
    render_gap,
    render_residual,
    render_threshold,
    render_transport,
)

__version__ = "0.1.0"

__all__ = [
    "PlotkitError",
    "load_table",
    "require_columns",
    "RENDERERS",
    "render_gap",
    "render_residual",
    "render_threshold",
    "render_transport",
]
