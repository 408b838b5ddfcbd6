"""Scans of PL fields over (direction, height, threshold) grids.

The fast path sorts lower-star events on a fixed height grid (kernels in
``_kernels``); ``ect_curve`` keeps exact jump events for property tests and
the moduli checks. Correctness of both is anchored to the brute-force
half-space clipping oracle in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .complex_ops import _boundary_cells, level_restrict, superlevel_restrict
from .field_core import DirectionSet, EulerCurve, TransformGrid

__all__ = ["ScanRequest", "ect_curve", "ect_transform", "select_transform",
           "lect_transform", "euler_scan"]


@dataclass(frozen=True)
class ScanRequest:
    directions: DirectionSet
    heights: np.ndarray
    thresholds: np.ndarray
    kind: str = "SELECT"

    def __post_init__(self):
        object.__setattr__(self, "heights", np.asarray(self.heights, dtype=float))
        object.__setattr__(self, "thresholds", np.asarray(self.thresholds, dtype=float))
        if self.kind not in ("SELECT", "LECT", "ECT"):
            raise ValueError(f"unknown scan kind {self.kind!r}")
        if self.heights.size == 0 or len(self.directions) == 0:
            raise ValueError("empty scan axes")
        if self.kind in ("SELECT", "LECT"):
            ts = self.thresholds
            if ts.size == 0 or np.any(ts <= 0) or np.any(ts > 1):
                raise ValueError("thresholds must lie in (0, 1]")


def ect_curve(complex_like, v) -> EulerCurve:
    """Exact Euler curve of a complex in direction v.

    The value at height h is the alternating count of cells whose vertices
    all satisfy x.v <= h; simultaneous events merge into one jump and
    zero-net events vanish (right-continuity).
    """
    v = np.asarray(v, dtype=float)
    points, simplices = complex_like.cells()
    deltas = {}
    if points.shape[0]:
        heights = points @ v
        for s in simplices:
            h = float(heights[list(s)].max())
            deltas[h] = deltas.get(h, 0) + (-1) ** (len(s) - 1)
    return EulerCurve.from_deltas(deltas)


def ect_transform(complex_like, directions: DirectionSet, heights) -> np.ndarray:
    """Euler-curve values of one complex on a (direction, height) grid."""
    points, simplices = complex_like.cells()
    return _kernels.scan_complex(points, simplices, directions.directions,
                                 np.asarray(heights, dtype=float))


def _lifted_transform(field, req: ScanRequest, restrict) -> TransformGrid:
    nd, nh, nt = len(req.directions), req.heights.size, req.thresholds.size
    values = np.zeros((nd, nh, nt), dtype=np.int64)
    # one restricted complex per threshold, reused across all directions
    for k, t in enumerate(req.thresholds):
        clipped = restrict(field, float(t))
        values[:, :, k] = ect_transform(clipped, req.directions, req.heights)
    return TransformGrid(req.directions, req.heights, req.thresholds, values, req.kind)


def _select_transform_fast(field, req: ScanRequest) -> TransformGrid:
    """SELECT via survivor decomposition instead of one clip per threshold.

    Cells of {f >= t} split into (a) cells of the input complex whose minimum
    vertex value is >= t, counted for every threshold in one batched kernel
    pass, and (b) cells created by clipping threshold-crossing simplices,
    scanned per threshold. Requires a closed input complex; output is
    identical to clipping each superlevel set whole.
    """
    points, simplices = field.cells()
    values = np.asarray(field.values, dtype=float)
    dirs = req.directions.directions
    heights = req.heights
    nd, nh, nt = len(req.directions), heights.size, req.thresholds.size
    order = np.argsort(req.thresholds, kind="stable")
    ts = req.thresholds[order]

    groups = []
    for k, cells in _kernels._group_by_size(simplices).items():
        idx = np.array(cells, dtype=np.int64)
        gv = values[idx]
        groups.append((cells, idx, gv.min(axis=1), gv.max(axis=1)))

    acc = np.zeros((nd, nh, nt), dtype=np.int64)
    for cells, idx, mn, _ in groups:
        # number of leading thresholds each fully-kept cell survives
        kmax = np.searchsorted(ts, mn, side="right")
        sign = (-1) ** (idx.shape[1] - 1)
        _kernels.deposit_survivors(points, dirs, idx, sign, kmax, heights, acc)
    acc = np.ascontiguousarray(acc[:, :, ::-1].cumsum(axis=2)[:, :, ::-1])
    np.cumsum(acc, axis=1, out=acc)

    for j, t in enumerate(ts):
        t = float(t)
        straddling = []
        for cells, _, mn, mx in groups:
            for i in np.nonzero((mn < t) & (mx >= t))[0]:
                straddling.append(cells[i])
        coords, new_cells = _boundary_cells(points, values, straddling, t)
        if new_cells:
            acc[:, :, j] += _kernels.scan_complex(coords, new_cells, dirs, heights)

    out = np.empty_like(acc)
    out[:, :, order] = acc
    return TransformGrid(req.directions, heights, req.thresholds, out, req.kind)


def select_transform(field, req: ScanRequest) -> TransformGrid:
    """SELECT values chi({x.v <= h, f >= t}) on the request grid."""
    if req.kind != "SELECT":
        raise ValueError("request kind must be SELECT")
    return _select_transform_fast(field, req)


def lect_transform(field, req: ScanRequest) -> TransformGrid:
    """LECT values chi({x.v <= h, f = t}) on the request grid."""
    if req.kind != "LECT":
        raise ValueError("request kind must be LECT")
    return _lifted_transform(field, req, level_restrict)


def euler_scan(field, v, t, heights=None) -> EulerCurve:
    """One SELECT curve at fixed direction and threshold, with exact events.

    ``heights`` only matters for grid evaluation elsewhere; the returned
    curve stores exact jump events.
    """
    if not 0.0 < t <= 1.0:
        raise ValueError(f"threshold {t} outside (0, 1]")
    return ect_curve(superlevel_restrict(field, t), v)
