"""Distances between transform grids, marginal and weighted Euler curves,
and cyclic O(2) alignment."""

from __future__ import annotations

import numpy as np

from .field_core import DirectionSet, EulerCurve, PLField, TransformGrid
from .transforms import ect_transform

__all__ = [
    "select_distance",
    "marginal_curves",
    "weighted_euler_curve",
    "select_grid_of_weighted",
    "align_2d",
    "rotate_field",
    "MarginalCurveSet",
]


def _trapezoid_weights(axis):
    """Trapezoid quadrature weights; a singleton axis gets weight 1 so that
    single-threshold grids reduce to the plain ECT distance."""
    axis = np.asarray(axis, dtype=float)
    if axis.size == 1:
        return np.ones(1)
    w = np.zeros(axis.size)
    d = np.diff(axis)
    w[:-1] += d / 2.0
    w[1:] += d / 2.0
    return w


def select_distance(a: TransformGrid, b: TransformGrid, p=2.0) -> float:
    """L^p quadrature distance between two transform grids on shared axes.

    Uniform weight 1/n over directions, trapezoid over heights and over the
    (possibly non-uniform) threshold list.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if not a.same_axes(b):
        raise ValueError("transform grids must share axes and kind")
    diff = np.abs(a.values - b.values).astype(float) ** p
    wh = _trapezoid_weights(a.heights)
    wt = _trapezoid_weights(a.thresholds)
    total = np.einsum("ijk,j,k->", diff, wh, wt) / len(a.directions)
    return float(total ** (1.0 / p))


class MarginalCurveSet:
    """Threshold-integrals of a SELECT grid, one real curve per direction."""

    def __init__(self, directions, heights, values):
        self.directions = directions
        self.heights = np.asarray(heights, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("marginal curves must be finite")


def marginal_curves(grid: TransformGrid) -> MarginalCurveSet:
    """Integrate the threshold axis out of a SELECT grid.

    SELECT is piecewise constant in t and right-continuous from above (the
    value at t holds on the interval down to the previous jump), so the
    integral uses the right-endpoint rule: sample k covers (t_{k-1}, t_k]
    with t_0 = 0. This is exact for piecewise-constant fields whenever the
    threshold list contains every attained value, which is what makes the
    marginal curves agree with weighted Euler curves.
    """
    if grid.kind != "SELECT":
        raise ValueError("marginal curves are defined for SELECT grids")
    ts = grid.thresholds
    widths = np.diff(np.concatenate([[0.0], ts]))
    values = np.einsum("ijk,k->ij", grid.values.astype(float), widths)
    return MarginalCurveSet(grid.directions, grid.heights, values)


def _check_admissible(simplices, weights):
    cofaces = {}
    simplex_set = set(simplices)
    for s in simplices:
        if len(s) > 1:
            for i in range(len(s)):
                f = s[:i] + s[i + 1 :]
                cofaces.setdefault(f, []).append(s)
    for tau, cfs in cofaces.items():
        if tau in simplex_set and weights[tau] != max(weights[s] for s in cfs):
            raise ValueError(f"weights not admissible at {tau}: "
                             "a face must carry the max of its cofaces")


def weighted_euler_curve(points, simplices, weights, v) -> EulerCurve:
    """Weighted Euler curve: alternating weighted count of the lower complex
    per height. Weights must be admissible (face weight = max coface weight)."""
    simplices = [tuple(s) for s in simplices]
    _check_admissible(simplices, weights)
    v = np.asarray(v, dtype=float)
    heights = np.asarray(points, dtype=float) @ v
    deltas = {}
    for s in simplices:
        h = float(heights[list(s)].max())
        deltas[h] = deltas.get(h, 0) + (-1) ** (len(s) - 1) * int(weights[s])
    return EulerCurve.from_deltas(deltas)


def select_grid_of_weighted(points, simplices, weights, directions: DirectionSet,
                            heights, thresholds=None) -> TransformGrid:
    """SELECT grid of a field constant on open cells (value = cell weight).

    The t-superlevel set is simply the subcomplex of cells with weight >= t,
    so no clipping is needed. Default thresholds: every weight value plus one
    midpoint between consecutive values.
    """
    simplices = [tuple(s) for s in simplices]
    _check_admissible(simplices, weights)
    levels = sorted({int(weights[s]) for s in simplices})
    if thresholds is None:
        thresholds = []
        for lo, hi in zip(levels, levels[1:]):
            thresholds.append((lo + hi) / 2.0)
        thresholds = np.array(sorted(thresholds + [float(a) for a in levels]))
    thresholds = np.asarray(thresholds, dtype=float)
    heights = np.asarray(heights, dtype=float)
    points = np.asarray(points, dtype=float)
    values = np.zeros((len(directions), heights.size, thresholds.size), dtype=np.int64)

    class _Sub:
        def __init__(self, cells):
            self._cells = cells

        def cells(self):
            return points, self._cells

    for k, t in enumerate(thresholds):
        sub = [s for s in simplices if weights[s] >= t]
        values[:, :, k] = ect_transform(_Sub(sub), directions, heights)
    return TransformGrid(directions, heights, thresholds, values, "SELECT")


def rotate_field(f: PLField, R) -> PLField:
    """Apply an orthogonal map to the field's geometry; values unchanged."""
    R = np.asarray(R, dtype=float)
    if R.shape != (f.dim, f.dim) or np.max(np.abs(R @ R.T - np.eye(f.dim))) > 1e-12:
        raise ValueError("R must be orthogonal (tol 1e-12)")
    return PLField(f.dim, f.points @ R.T, f.values, f.simplices,
                   constant_warning=f.constant_warning)


def shift_directions(grid: TransformGrid, j) -> TransformGrid:
    """Cyclic shift of the direction axis: result[i] = grid[(i + j) mod n].

    This matches rotating the underlying field by 2*pi*j/n on a
    uniform_circle direction set.
    """
    n = len(grid.directions)
    j = int(j) % n
    return TransformGrid(grid.directions, grid.heights, grid.thresholds,
                         np.roll(grid.values, -j, axis=0), grid.kind)


def align_2d(a: TransformGrid, b: TransformGrid, p=2.0):
    """Best cyclic alignment of two grids on the same uniform circle.

    Returns (shift, distance, profile) where ``shift`` is the j minimizing
    select_distance(a, shift_directions(b, j)) and ``profile`` the distance
    at every shift. With the convention above, aligning SELECT(f) against
    SELECT(f rotated by 2*pi*j0/n) recovers j0.
    """
    if a.directions.scheme != "uniform_circle" or b.directions.scheme != "uniform_circle":
        raise ValueError("alignment requires uniform_circle direction sets")
    if not a.same_axes(b):
        raise ValueError("transform grids must share axes and kind")
    n = len(a.directions)
    profile = [select_distance(a, shift_directions(b, j), p) for j in range(n)]
    best = int(np.argmin(profile))
    return best, profile[best], profile
