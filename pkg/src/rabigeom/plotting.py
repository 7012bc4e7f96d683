"""Figure rendering for the CLI report path.

Renders grid and scan tables to PNG files next to the delimited output.
Headless by construction (Agg backend); nothing here is needed by the
numerical library.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .scenario import ResultTable

__all__ = ["render_figures"]


def _column(table: ResultTable, rows: list[list], name: str) -> np.ndarray:
    idx = table.columns.index(name)
    return np.array([row[idx] for row in rows])


def _render_grid(table: ResultTable, rows: list[list], path: str, label: str):
    theta = _column(table, rows, "theta").astype(float)
    phi = _column(table, rows, "phi").astype(float)
    w = _column(table, rows, "W").astype(float)
    thetas = np.unique(theta)
    phis = np.unique(phi)
    # pole rows collapse to a single phi; skip the quiver there
    grid_w = np.full((len(thetas), len(phis)), np.nan)
    t_index = {t: i for i, t in enumerate(thetas)}
    p_index = {p: j for j, p in enumerate(phis)}
    for t, p, val in zip(theta, phi, w):
        grid_w[t_index[t], p_index[p]] = val
    grid_w = np.where(np.isnan(grid_w), grid_w[:, :1], grid_w)

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    mesh = ax.pcolormesh(
        np.degrees(phis), np.degrees(thetas), grid_w, shading="nearest", cmap="viridis"
    )
    fig.colorbar(mesh, ax=ax, label="|Y|^2  (1/sr)")

    ex = _column(table, rows, "ex")
    ey = _column(table, rows, "ey")
    ez = _column(table, rows, "ez")
    # transverse components of the real part, for the direction arrows
    u = np.empty_like(theta)
    v = np.empty_like(theta)
    for i, (t, p) in enumerate(zip(theta, phi)):
        th_hat = np.array([math.cos(t) * math.cos(p), math.cos(t) * math.sin(p), -math.sin(t)])
        ph_hat = np.array([-math.sin(p), math.cos(p), 0.0])
        vec = np.array([ex[i], ey[i], ez[i]], dtype=complex).real
        u[i] = vec @ ph_hat
        v[i] = vec @ th_hat
    keep = slice(None, None, max(1, len(theta) // 400))
    ax.quiver(
        np.degrees(phi)[keep],
        np.degrees(theta)[keep],
        u[keep],
        v[keep],
        color="white",
        width=0.003,
        pivot="middle",
    )
    ax.set_xlabel("phi (deg)")
    ax.set_ylabel("theta (deg)")
    ax.invert_yaxis()
    ax.set_title(label)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _render_scan(table: ResultTable, rows: list[list], path: str, label: str, parameter: str):
    x = _column(table, rows, parameter).astype(float)
    for name in ("rabi_abs_rad_per_s", "coupling_abs", "selectivity"):
        if name in table.columns:
            y_raw = _column(table, rows, name)
            if any(isinstance(v, str) for v in y_raw):
                continue
            y = y_raw.astype(float)
            break
    else:
        return
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(x, y, lw=1.5)
    ax.set_xlabel(parameter)
    ax.set_ylabel(name)
    ax.set_title(label)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_figures(table: ResultTable, out_stem: str) -> list[str]:
    """Render one figure per grid/scan request block; returns written paths."""
    if "request" not in table.columns:
        return []
    req_idx = table.columns.index("request")
    written: list[str] = []
    labels = []
    for row in table.rows:
        if row[req_idx] not in labels:
            labels.append(row[req_idx])
    for label in labels:
        rows = [r for r in table.rows if r[req_idx] == label]
        path = f"{out_stem}_{label.replace('[', '_').rstrip(']')}.png"
        if label.startswith("vsh_grid"):
            _render_grid(table, rows, path, label)
            written.append(path)
        elif label.startswith("scan"):
            parameter = None
            for col in table.columns:
                if col not in (
                    "request",
                    "coupling",
                    "rabi_rad_per_s",
                    "rabi_abs_rad_per_s",
                    "coupling_abs",
                    "selectivity",
                ) and any(not isinstance(r[table.columns.index(col)], str) for r in rows):
                    parameter = col
                    break
            if parameter:
                _render_scan(table, rows, path, label, parameter)
                written.append(path)
    return written
