#!/usr/bin/env python3
"""Render figures from the CSV artifacts the liftect CLI writes.

This renderer talks to the pipeline only through files; it never imports the
library. Supported inputs:

  mds      mds.csv                 (id,x,y)
  dendro   dendrogram.csv          (cluster_a,cluster_b,distance,size)
  heatmap  <grid>.csv              (direction_index,height,threshold,value)
  profile  alignment_profile.csv   (shift,distance)
  hist     <grid>.csv              (direction_index,height,threshold,value)

Usage:
  plot.py --kind {mds,dendro,heatmap,profile,hist} --in FILE --out FILE.png

Output is byte-identical across reruns: the Agg backend with pinned dpi and
fixed PNG metadata, no timestamps.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# keep renders independent of any user-level style configuration
matplotlib.rcdefaults()

SAVE_OPTS = dict(dpi=120, metadata={"Software": "liftect-viz"})

_FAMILY_RE = re.compile(r"fam(\d+)")


def _read_rows(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [r for r in reader if r]
    return header, rows


def _finish(fig, out):
    fig.savefig(out, **SAVE_OPTS)
    plt.close(fig)


def plot_mds(path, out):
    """Scatter of 2-d embedding coordinates, colored by the famN tag in the
    id when present."""
    header, rows = _read_rows(path)
    if header[:3] != ["id", "x", "y"]:
        raise SystemExit(f"{path}: expected id,x,y columns, got {header}")
    ids = [r[0] for r in rows]
    xy = np.array([[float(r[1]), float(r[2])] for r in rows])
    groups = {}
    for i, name in enumerate(ids):
        m = _FAMILY_RE.search(name)
        groups.setdefault(m.group(1) if m else "all", []).append(i)
    fig, ax = plt.subplots(figsize=(5, 5))
    for key in sorted(groups):
        sel = groups[key]
        label = f"family {key}" if key != "all" else None
        ax.scatter(xy[sel, 0], xy[sel, 1], s=28, label=label)
    if len(groups) > 1:
        ax.legend(loc="best")
    ax.set_xlabel("coordinate 1")
    ax.set_ylabel("coordinate 2")
    ax.set_title("distance-matrix embedding")
    ax.set_aspect("equal", adjustable="datalim")
    _finish(fig, out)


def plot_dendro(path, out):
    """Dendrogram from an agglomerative merge schedule. Leaves are clusters
    0..n-1; merge i joins cluster_a and cluster_b into cluster n+i."""
    header, rows = _read_rows(path)
    if header[:3] != ["cluster_a", "cluster_b", "distance"]:
        raise SystemExit(f"{path}: expected merge-schedule columns, got {header}")
    merges = [(int(r[0]), int(r[1]), float(r[2])) for r in rows]
    n = len(merges) + 1
    children = {n + i: (a, b) for i, (a, b, _) in enumerate(merges)}
    height = {c: 0.0 for c in range(n)}
    height.update({n + i: d for i, (_, _, d) in enumerate(merges)})

    order = []
    stack = [2 * n - 2] if merges else [0]
    while stack:
        c = stack.pop()
        if c < n:
            order.append(c)
        else:
            a, b = children[c]
            stack.append(b)
            stack.append(a)
    xpos = {leaf: float(i) for i, leaf in enumerate(order)}

    fig, ax = plt.subplots(figsize=(max(5, 0.2 * n), 4))
    for i, (a, b, d) in enumerate(merges):
        xa, xb = xpos[a], xpos[b]
        ax.plot([xa, xa], [height[a], d], color="C0", lw=1.0)
        ax.plot([xb, xb], [height[b], d], color="C0", lw=1.0)
        ax.plot([xa, xb], [d, d], color="C0", lw=1.0)
        xpos[n + i] = 0.5 * (xa + xb)
    ax.set_xticks([xpos[leaf] for leaf in order])
    ax.set_xticklabels([str(leaf) for leaf in order], fontsize=6, rotation=90)
    ax.set_ylabel("merge distance")
    ax.set_title("agglomerative clustering")
    _finish(fig, out)


def _read_grid_long(path):
    header, rows = _read_rows(path)
    want = ["direction_index", "height", "threshold", "value"]
    if header[:4] != want:
        raise SystemExit(f"{path}: expected {','.join(want)} columns, got {header}")
    data = np.array([[float(x) for x in r[:4]] for r in rows])
    return data


def plot_heatmap(path, out, threshold_index=0):
    """Transform values over (direction, height) at one threshold."""
    data = _read_grid_long(path)
    thresholds = np.unique(data[:, 2])
    if not 0 <= threshold_index < thresholds.size:
        raise SystemExit(f"threshold index {threshold_index} out of range "
                         f"(file has {thresholds.size})")
    t = thresholds[threshold_index]
    sel = data[data[:, 2] == t]
    dirs = np.unique(sel[:, 0])
    heights = np.unique(sel[:, 1])
    grid = np.full((dirs.size, heights.size), np.nan)
    di = np.searchsorted(dirs, sel[:, 0])
    hi = np.searchsorted(heights, sel[:, 1])
    grid[di, hi] = sel[:, 3]
    fig, ax = plt.subplots(figsize=(6, 4))
    im = ax.imshow(grid, aspect="auto", origin="lower", cmap="viridis",
                   extent=(heights[0], heights[-1], -0.5, dirs.size - 0.5))
    fig.colorbar(im, ax=ax, label="Euler characteristic")
    ax.set_xlabel("height")
    ax.set_ylabel("direction index")
    ax.set_title(f"transform slice at threshold {t:g}")
    _finish(fig, out)


def plot_profile(path, out):
    """Alignment distance as a function of cyclic direction shift."""
    header, rows = _read_rows(path)
    if header[:2] != ["shift", "distance"]:
        raise SystemExit(f"{path}: expected shift,distance columns, got {header}")
    shifts = [int(r[0]) for r in rows]
    dists = [float(r[1]) for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(shifts, dists, marker="o", color="C0")
    best = int(np.argmin(dists))
    ax.axvline(shifts[best], color="C3", ls="--", lw=1.0,
               label=f"best shift {shifts[best]}")
    ax.legend(loc="best")
    ax.set_xlabel("cyclic shift")
    ax.set_ylabel("distance")
    ax.set_title("rotational alignment profile")
    _finish(fig, out)


def plot_hist(path, out, bins=30):
    """Histogram of transform values."""
    data = _read_grid_long(path)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.hist(data[:, 3], bins=bins, color="C0", edgecolor="black", lw=0.4)
    ax.set_xlabel("Euler characteristic")
    ax.set_ylabel("count")
    ax.set_title("distribution of transform values")
    _finish(fig, out)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--kind", required=True,
                        choices=["mds", "dendro", "heatmap", "profile", "hist"])
    parser.add_argument("--in", dest="src", required=True, help="input CSV")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--threshold-index", type=int, default=0,
                        help="threshold slice for --kind heatmap")
    parser.add_argument("--bins", type=int, default=30,
                        help="bin count for --kind hist")
    ns = parser.parse_args(argv)
    try:
        if ns.kind == "mds":
            plot_mds(ns.src, ns.out)
        elif ns.kind == "dendro":
            plot_dendro(ns.src, ns.out)
        elif ns.kind == "heatmap":
            plot_heatmap(ns.src, ns.out, ns.threshold_index)
        elif ns.kind == "profile":
            plot_profile(ns.src, ns.out)
        else:
            plot_hist(ns.src, ns.out, ns.bins)
    except FileNotFoundError as exc:
        raise SystemExit(f"input error: {exc}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
