"""Figures from cwsim run directories.

Reads only the documented file contract (timeseries.csv, distributions.csv,
readout.json); never writes into the input directory.  Output is SVG with
deterministic content: fixed figure sizes, a fixed hash salt, and no
embedded timestamps, so images are diffable.
"""

from __future__ import annotations

import json
import math
import os

import matplotlib
matplotlib.use("svg")
matplotlib.rcParams["svg.hashsalt"] = "cwplot"

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

TIMESERIES = "timeseries.csv"
DISTRIBUTIONS = "distributions.csv"
READOUT = "readout.json"

DIST_COLUMNS = ["t", "block", "apparatus", "m", "re", "im"]


class SchemaError(ValueError):
    pass


def _load_run(run_dir):
    ro_path = os.path.join(run_dir, READOUT)
    if not os.path.exists(ro_path):
        raise SchemaError(f"missing {READOUT} in {run_dir}")
    with open(ro_path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _read_csv(path):
    if not os.path.exists(path):
        raise SchemaError(f"missing file {path}")
    df = pd.read_csv(path)
    if len(df) == 0:
        raise SchemaError(f"{os.path.basename(path)} contains no data rows")
    return df


def _require_columns(df, needed, filename):
    for col in needed:
        if col not in df.columns:
            raise SchemaError(f"{filename} is missing column {col!r}")


def _block_table(meta):
    return {b["id"]: b for b in meta.get("blocks", [])}


def _pick_block(meta, block, want_diagonal):
    table = _block_table(meta)
    if block is not None:
        if block not in table:
            raise SchemaError(f"unknown block id {block!r}; run has {sorted(table)}")
        return block
    for bid, info in table.items():
        if info.get("diagonal") == want_diagonal:
            return bid
    kind = "diagonal" if want_diagonal else "off-diagonal"
    raise SchemaError(f"run contains no {kind} block; pass --block explicitly")


def plot_coherence(run_dir, out_path, block=None):
    """Log-scale |coherence| vs t for one off-diagonal block.

    When the run used gamma = 0, the analytic decay |cos(2 g t)|^N is
    overlaid and the maximum residual against it is printed and returned
    (None otherwise).
    """
    meta = _load_run(run_dir)
    df = _read_csv(os.path.join(run_dir, TIMESERIES))
    _require_columns(df, ["t"], TIMESERIES)
    bid = _pick_block(meta, block, want_diagonal=False)
    index = _block_table(meta)[bid]["index"]
    col = f"b{index}.coh_mag"
    _require_columns(df, [col], TIMESERIES)

    t = df["t"].to_numpy()
    coh = df[col].to_numpy()
    if coh[0] <= 0:
        raise SchemaError(f"block {bid!r} has zero initial coherence")
    ratio = coh / coh[0]

    cfg = meta.get("config", {})
    gamma = cfg.get("bath", {}).get("gamma")
    g = cfg.get("schedule", {}).get("g")
    n = cfg.get("magnet", {}).get("n")

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(t, np.where(ratio > 0, ratio, np.nan), label=f"block {bid}",
                color="#1f5fa8", lw=1.2)
    residual = None
    if gamma == 0 and g is not None and n is not None:
        law = np.abs(np.cos(2.0 * g * t)) ** n
        ax.semilogy(t, np.where(law > 0, law, np.nan), "--", color="#c44536",
                    lw=1.0, label=r"$|\cos 2gt|^N$")
        residual = float(np.abs(ratio - law).max())
        print(f"gamma=0 overlay residual: {residual:.3e}")
    ax.set_xlabel("t")
    ax.set_ylabel("|coherence| / initial")
    ax.set_title(f"coherence decay ({bid})")
    ax.legend(loc="lower left")
    fig.tight_layout()
    fig.savefig(out_path, metadata={"Date": None})
    plt.close(fig)
    return residual


def plot_registration(run_dir, out_path, block=None, apparatus=0):
    """Heatmap of P(m, t) for one diagonal block with +-m_F guide lines."""
    meta = _load_run(run_dir)
    df = _read_csv(os.path.join(run_dir, DISTRIBUTIONS))
    _require_columns(df, DIST_COLUMNS, DISTRIBUTIONS)
    bid = _pick_block(meta, block, want_diagonal=True)
    if bid not in set(df["block"]):
        raise SchemaError(f"unknown block id {bid!r}; file has {sorted(set(df['block']))}")

    sel = df[(df["block"] == bid) & (df["apparatus"] == apparatus)]
    if len(sel) == 0:
        raise SchemaError(f"no rows for block {bid!r}, apparatus {apparatus}")
    pivot = sel.pivot_table(index="m", columns="t", values="re")
    m = pivot.index.to_numpy()
    t = pivot.columns.to_numpy()
    p = pivot.to_numpy()

    m_f = meta.get("diagnostics", {}).get("m_f")

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    floor = 1e-12
    mesh = ax.pcolormesh(t, m, np.log10(np.maximum(p, floor)), cmap="viridis",
                         vmin=math.log10(floor), vmax=0.0, shading="nearest")
    fig.colorbar(mesh, ax=ax, label=r"$\log_{10} P(m, t)$")
    if m_f is not None:
        ax.axhline(+m_f, color="#ffffff", ls="--", lw=0.8)
        ax.axhline(-m_f, color="#ffffff", ls="--", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("m")
    ax.set_title(f"pointer distribution ({bid}, apparatus {apparatus})")
    fig.tight_layout()
    fig.savefig(out_path, metadata={"Date": None})
    plt.close(fig)
