"""Hot inner loops of the grid scans.

Two interchangeable backends: numba @njit kernels (default) and a pure-numpy
path. Set LIFTECT_NUMBA=0 to force the numpy path; the numpy path is also
used automatically if numba is unavailable. ``benchmarks/bench_scan.py``
compares the two.
"""

from __future__ import annotations

import os

import numpy as np

_want_numba = os.environ.get("LIFTECT_NUMBA", "1") != "0"

if _want_numba:
    try:
        from numba import njit, prange

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False


def backend() -> str:
    return "numba" if _HAVE_NUMBA else "numpy"


def cell_event_heights_numpy(vertex_heights, cell_idx):
    """Max vertex height per cell: (ncells, ndir) from (nv, ndir) heights and
    an (ncells, k) index matrix."""
    return vertex_heights[cell_idx].max(axis=1)


def accumulate_curves_numpy(events, signs, height_grid):
    """Signed counts of events <= h for each grid height.

    events: (ncells, ndir); signs: (ncells,) int; returns (ndir, nheights)
    int64. An event lands in the first grid bin at or above it; events past
    the last grid height are dropped.
    """
    ncells, ndir = events.shape
    ng = height_grid.size
    bins = np.searchsorted(height_grid, events, side="left")  # (ncells, ndir)
    flat = bins + (ng + 1) * np.arange(ndir)[None, :]
    weights = np.broadcast_to(signs[:, None], events.shape)
    counts = np.bincount(flat.ravel(), weights=weights.ravel(), minlength=(ng + 1) * ndir)
    counts = counts.reshape(ndir, ng + 1)[:, :ng]
    return np.cumsum(counts, axis=1).astype(np.int64)


if _HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def _scan_cells_nb(dir_heights, cell_idx, sign, height_grid, out):
        """Fused event scan: per (cell, direction) take the max vertex height,
        locate the first grid height >= it, and deposit ``sign`` there.

        dir_heights is direction-major (ndir, nv) for locality. The bin is
        seeded by uniform-grid arithmetic and corrected by a short walk, so
        the result is exact for any monotone grid. ``out`` accumulates raw
        deposits; the caller turns them into curves with one cumsum.
        """
        ncells, k = cell_idx.shape
        ndir = dir_heights.shape[0]
        ng = height_grid.size
        h0 = height_grid[0]
        inv = 0.0
        if ng > 1 and height_grid[ng - 1] > h0:
            inv = (ng - 1) / (height_grid[ng - 1] - h0)
        for d in prange(ndir):
            row = dir_heights[d]
            for c in range(ncells):
                m = row[cell_idx[c, 0]]
                for j in range(1, k):
                    h = row[cell_idx[c, j]]
                    if h > m:
                        m = h
                pos = int((m - h0) * inv)
                if pos < 0:
                    pos = 0
                elif pos > ng:
                    pos = ng
                while pos < ng and height_grid[pos] < m:
                    pos += 1
                while pos > 0 and height_grid[pos - 1] >= m:
                    pos -= 1
                if pos < ng:
                    out[d, pos] += sign


    @njit(cache=True, parallel=True)
    def _deposit_survivors_nb(dir_heights, cell_idx, sign, kmax, height_grid, out):
        """Like _scan_cells_nb, but each cell also carries ``kmax``: the
        number of leading (sorted) thresholds it survives. Deposits land at
        (direction, height bin, kmax - 1); a reversed cumsum over the
        threshold axis then yields per-threshold survivor counts.
        """
        ncells, k = cell_idx.shape
        ndir = dir_heights.shape[0]
        ng = height_grid.size
        h0 = height_grid[0]
        inv = 0.0
        if ng > 1 and height_grid[ng - 1] > h0:
            inv = (ng - 1) / (height_grid[ng - 1] - h0)
        for d in prange(ndir):
            row = dir_heights[d]
            for c in range(ncells):
                km = kmax[c]
                if km == 0:
                    continue
                m = row[cell_idx[c, 0]]
                for j in range(1, k):
                    h = row[cell_idx[c, j]]
                    if h > m:
                        m = h
                pos = int((m - h0) * inv)
                if pos < 0:
                    pos = 0
                elif pos > ng:
                    pos = ng
                while pos < ng and height_grid[pos] < m:
                    pos += 1
                while pos > 0 and height_grid[pos - 1] >= m:
                    pos -= 1
                if pos < ng:
                    out[d, pos, km - 1] += sign


def deposit_survivors_numpy(vertex_heights, cell_idx, sign, kmax, height_grid, out):
    """Numpy twin of the survivor deposit: bincount over a flattened
    (direction, height bin, kmax - 1) index."""
    live = kmax > 0
    if not live.any():
        return
    idx = cell_idx[live]
    km = kmax[live]
    ng = height_grid.size
    nt = out.shape[2]
    events = vertex_heights[idx].max(axis=1)  # (nc, ndir)
    bins = np.searchsorted(height_grid, events, side="left")
    d_idx = np.arange(out.shape[0])[None, :]
    flat = (d_idx * (ng + 1) + bins) * nt + (km[:, None] - 1)
    counts = np.bincount(flat.ravel(), minlength=out.shape[0] * (ng + 1) * nt)
    out += sign * counts.reshape(out.shape[0], ng + 1, nt)[:, :ng, :]


def deposit_survivors(points, directions, cell_idx, sign, kmax, height_grid, out):
    """Dispatch the survivor deposit to the active backend."""
    if _HAVE_NUMBA:
        dir_heights = np.ascontiguousarray(directions @ points.T)
        _deposit_survivors_nb(dir_heights, np.ascontiguousarray(cell_idx), sign,
                              np.ascontiguousarray(kmax),
                              np.ascontiguousarray(height_grid), out)
    else:
        deposit_survivors_numpy(points @ directions.T, cell_idx, sign, kmax,
                                height_grid, out)


def cell_event_heights(vertex_heights, cell_idx):
    return cell_event_heights_numpy(vertex_heights, cell_idx)


def accumulate_curves(events, signs, height_grid):
    return accumulate_curves_numpy(events, signs, height_grid)


def _group_by_size(simplices):
    by_size = {}
    for s in simplices:
        by_size.setdefault(len(s), []).append(s)
    return by_size


def scan_complex(points, simplices, directions, height_grid):
    """Euler-curve values of one complex on (direction, height) grids.

    Value at (v, h) is the signed count of cells whose maximum vertex height
    along v is <= h (lower-star rule). Returns (ndir, nheights) int64.
    """
    ndir = directions.shape[0]
    ng = height_grid.size
    if points.shape[0] == 0 or not simplices:
        return np.zeros((ndir, ng), dtype=np.int64)
    by_size = _group_by_size(simplices)
    out = np.zeros((ndir, ng), dtype=np.int64)
    if _HAVE_NUMBA:
        dir_heights = np.ascontiguousarray(directions @ points.T)  # (ndir, nv)
        grid = np.ascontiguousarray(height_grid)
        for k, cells in by_size.items():
            idx = np.array(cells, dtype=np.int64)
            _scan_cells_nb(dir_heights, idx, (-1) ** (k - 1), grid, out)
        np.cumsum(out, axis=1, out=out)
        return out
    vertex_heights = points @ directions.T  # (nv, ndir)
    for k, cells in by_size.items():
        idx = np.array(cells, dtype=np.int64)
        sign = (-1) ** (k - 1)
        events = cell_event_heights_numpy(vertex_heights, idx)
        signs = np.full(idx.shape[0], sign, dtype=np.int64)
        out += accumulate_curves_numpy(events, signs, height_grid)
    return out
