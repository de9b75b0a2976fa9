"""The four standard figures, rendered deterministically from CSV cells.

Nothing here recomputes physics: every plotted number is a CSV cell or a
regression/median over CSV cells, and where the producing table embeds the
same derived value (the gap fit slope, the per-row residual ratio) the
recomputation must agree with the embedded cell to 1e-9 or rendering is
refused.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvin import PlotkitError, load_table, require_columns

# fixed canvas and hashed-id salt keep PNG and SVG byte-stable per input
RC = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "svg.hashsalt": "plotkit",
    "font.size": 10,
}

SLOPE_TOL = 1e-9


def _save(fig, out_base) -> list:
    written = []
    for ext, meta in (("png", {"Software": None}), ("svg", {"Date": None})):
        path = f"{out_base}.{ext}"
        fig.savefig(path, metadata=meta)
        written.append(path)
    plt.close(fig)
    return written


def render_threshold(csv_path, out_base) -> dict:
    """Observed fraction against beam scale, one curve per window length."""
    table = load_table(csv_path)
    require_columns(table, ["h", "T", "observed_fraction"], csv_path)
    t_values = sorted(set(table["T"]))
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        for t in t_values:
            sel = table["T"] == t
            order = np.argsort(table["h"][sel])
            ax.plot(
                table["h"][sel][order],
                table["observed_fraction"][sel][order],
                marker="o",
                label=f"T = {t:g}",
            )
        ax.set_xscale("log", base=2)
        ax.set_yscale("log")
        ax.set_xlabel("beam scale h")
        ax.set_ylabel("observed fraction")
        ax.set_title("Observed mass fraction across the threshold")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
        files = _save(fig, out_base)
    return {"files": files, "T_values": t_values}


def render_gap(csv_path, out_base) -> dict:
    """Spectral gap on a log scale with the regression line.

    The slope is recomputed from the (w, lambda) cells of the fit rows and
    compared against the embedded fit_slope; a mismatch beyond 1e-9 means
    the table was edited or mixed from different runs, and nothing is
    rendered.
    """
    table = load_table(csv_path)
    require_columns(
        table, ["w", "lambda", "fit_window", "fit_slope"], csv_path
    )
    sel = table["fit_window"] == 1
    if not np.any(sel):
        raise PlotkitError(f"no fit-window rows in {csv_path}")
    w = table["w"][sel]
    gap = table["lambda"][sel] - w
    if np.any(gap <= 0):
        raise PlotkitError(f"nonpositive gap cells in {csv_path}")
    slope, intercept = np.polyfit(w, np.log(gap), 1)
    embedded = set(float(v) for v in table["fit_slope"][sel])
    if len(embedded) != 1:
        raise PlotkitError(f"inconsistent fit_slope cells in {csv_path}")
    embedded = embedded.pop()
    if abs(slope - embedded) > SLOPE_TOL:
        raise PlotkitError(
            f"recomputed slope {slope:.12g} disagrees with embedded "
            f"{embedded:.12g} in {csv_path}"
        )
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.semilogy(w, gap, "o", label="lambda(w) - w")
        line = np.exp(intercept + slope * w)
        ax.semilogy(w, line, "-", label=f"slope = {slope:.6f}")
        ax.set_xlabel("w")
        ax.set_ylabel("spectral gap")
        ax.set_title("Ground-level gap decay")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
        files = _save(fig, out_base)
    return {"files": files, "slope": float(slope), "intercept": float(intercept)}


def render_transport(csv_path, out_base) -> dict:
    """Space-time heatmap of the y-marginal beam density."""
    table = load_table(csv_path)
    require_columns(table, ["t", "y", "density"], csv_path)
    t_vals, t_idx = np.unique(table["t"], return_inverse=True)
    y_vals, y_idx = np.unique(table["y"], return_inverse=True)
    grid = np.full((t_vals.size, y_vals.size), math.nan)
    grid[t_idx, y_idx] = table["density"]
    if np.any(np.isnan(grid)):
        raise PlotkitError(f"{csv_path} does not cover a full (t, y) grid")
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        mesh = ax.pcolormesh(y_vals, t_vals, grid, shading="nearest")
        fig.colorbar(mesh, ax=ax, label="density")
        ax.set_xlabel("y")
        ax.set_ylabel("t")
        ax.set_title("Beam transport on the torus")
        files = _save(fig, out_base)
    return {"files": files, "nt": int(t_vals.size), "ny": int(y_vals.size)}


def render_residual(csv_path, out_base) -> dict:
    """Median corrected/raw residual ratio against the scale h."""
    table = load_table(csv_path)
    require_columns(table, ["h", "raw", "corrected", "ratio"], csv_path)
    recomputed = table["corrected"] / table["raw"]
    worst = float(np.max(np.abs(recomputed - table["ratio"])))
    if worst > SLOPE_TOL:
        raise PlotkitError(
            f"ratio cells in {csv_path} disagree with corrected/raw "
            f"by {worst:.3g}"
        )
    h_vals = sorted(set(table["h"]), reverse=True)
    medians = [
        float(np.median(table["ratio"][table["h"] == h])) for h in h_vals
    ]
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.plot(h_vals, medians, marker="s", label="median ratio")
        ax.plot(
            h_vals,
            [medians[0] * h / h_vals[0] for h in h_vals],
            "--",
            label="linear in h",
        )
        ax.set_xscale("log", base=2)
        ax.set_yscale("log", base=2)
        ax.set_xlabel("scale h")
        ax.set_ylabel("corrected / raw residual")
        ax.set_title("Averaging-correction residual ratio")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
        files = _save(fig, out_base)
    return {"files": files, "h": [float(h) for h in h_vals], "medians": medians}


RENDERERS = {
    "threshold": render_threshold,
    "gap": render_gap,
    "transport": render_transport,
    "residual": render_residual,
}
