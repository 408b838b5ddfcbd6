"""Exact Euler-characteristic machinery on simplicial complexes.

Superlevel / level / half-space restrictions are computed by clipping each
simplex and re-triangulating the clipped polytope by *pulling* from its
minimum vertex in a global order. Because the pulling order is global,
adjacent simplices triangulate shared faces identically and the assembled
complex is closed, so the alternating simplex count is the exact Euler
characteristic.

New vertices created on crossing edges are identified by their provenance
key (edge, threshold), never by coordinate comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

__all__ = [
    "ClippedComplex",
    "euler_characteristic",
    "euler_integral",
    "superlevel_restrict",
    "level_restrict",
    "halfspace_clip",
]

# Node keys are ints: values below nv refer to input vertices; the crossing
# point of edge (i, j), i < j, with the clip threshold is encoded as
# nv + i*nv + j. Plain integer order therefore puts original vertices first
# (ascending) and crossing points after them in edge-lexicographic order,
# which is exactly the pulling order.


def _norm_cell(nodes):
    """Sorted, deduplicated cell. Degenerate clips collapse to lower dims."""
    return tuple(sorted(set(nodes)))


def _full_closure(cell):
    for k in range(1, len(cell) + 1):
        yield from combinations(cell, k)


@dataclass(frozen=True)
class ClippedComplex:
    """A closed complex produced by clipping, with crossing-point provenance.

    ``provenance[i]`` is either ("v", orig_index) or ("e", a, b, s) where the
    new vertex sits at parameter s in [0,1] along the parent edge (a, b).
    """

    points: np.ndarray
    simplices: tuple
    provenance: tuple

    @property
    def n_vertices(self):
        return self.points.shape[0]

    def cells(self):
        return self.points, self.simplices

    def dump(self):
        lines = [f"ClippedComplex: {self.n_vertices} vertices, {len(self.simplices)} cells"]
        for i, (p, pr) in enumerate(zip(self.points, self.provenance)):
            lines.append(f"  v{i} {tuple(round(float(x), 6) for x in p)} {pr}")
        for s in self.simplices:
            lines.append(f"  cell {s}")
        return "\n".join(lines)


def euler_characteristic(obj) -> int:
    """Alternating simplex count; chi of the empty complex is 0."""
    if hasattr(obj, "simplices"):
        simplices = obj.simplices
    else:
        simplices = obj
    return int(sum((-1) ** (len(s) - 1) for s in simplices))


def euler_integral(simplices, cell_values) -> int:
    """Integral against chi of an integer function constant on open cells.

    Each level set is a union of open cells, whose (compactly supported)
    Euler characteristic is the alternating count of those cells; the
    integral collapses to a single weighted alternating sum.
    """
    total = 0
    for s in simplices:
        v = int(cell_values[s] if not callable(cell_values) else cell_values(s))
        total += v * (-1) ** (len(s) - 1)
    return total


class _Clipper:
    """Memoized recursive clipping of one complex against one threshold.

    keep(i) decides whether input vertex i survives (closed convention);
    exact(i) whether it lies exactly on the cut. Crossing points exist only
    on edges with one vertex strictly above and one strictly below.
    """

    def __init__(self, values, t):
        self.values = values
        self.t = t
        self.nv = len(values)
        self._clip = {}
        self._cut = {}

    def keep(self, i):
        return self.values[i] >= self.t

    def exact(self, i):
        return self.values[i] == self.t

    def below(self, i):
        return self.values[i] < self.t

    def above(self, i):
        return self.values[i] > self.t

    def _cross_key(self, i, j):
        a, b = (i, j) if i < j else (j, i)
        return self.nv + a * self.nv + b

    def clip_closure(self, simplex):
        """Closed triangulation of simplex ∩ {value >= t} as a cell set."""
        simplex = tuple(simplex)
        got = self._clip.get(simplex)
        if got is not None:
            return got
        kept = [v for v in simplex if self.keep(v)]
        if len(kept) == len(simplex):
            out = frozenset(_full_closure(simplex))
        elif not kept:
            out = frozenset()
        elif len(simplex) == 1:
            out = frozenset({(simplex[0],)}) if kept else frozenset()
        else:
            cells = set()
            # vertices of the clipped polytope that serve as pulling apexes
            verts = set(kept)
            for i, j in combinations(simplex, 2):
                if (self.above(i) and self.below(j)) or (self.below(i) and self.above(j)):
                    verts.add(self._cross_key(i, j))
            apex = min(verts)
            facets = [self.clip_closure(f) for f in combinations(simplex, len(simplex) - 1)]
            facets.append(self.cut_closure(simplex))
            for fcells in facets:
                for c in fcells:
                    cells.add(c)
                    if apex not in c:
                        cells.add(_norm_cell(c + (apex,)))
            cells.add((apex,))
            out = frozenset(cells)
        self._clip[simplex] = out
        return out

    def cut_closure(self, simplex):
        """Closed triangulation of simplex ∩ {value = t} as a cell set."""
        simplex = tuple(simplex)
        got = self._cut.get(simplex)
        if got is not None:
            return got
        vals = [self.values[v] for v in simplex]
        if all(v == self.t for v in vals):
            out = frozenset(_full_closure(simplex))  # constant-on-cell branch
        elif min(vals) > self.t or max(vals) < self.t:
            out = frozenset()
        elif len(simplex) == 1:
            out = frozenset({(simplex[0],)}) if self.exact(simplex[0]) else frozenset()
        elif len(simplex) == 2:
            i, j = simplex
            if self.exact(i):
                out = frozenset({(i,)})
            elif self.exact(j):
                out = frozenset({(j,)})
            else:
                out = frozenset({(self._cross_key(i, j),)})
        else:
            verts = set(v for v in simplex if self.exact(v))
            for i, j in combinations(simplex, 2):
                if (self.above(i) and self.below(j)) or (self.below(i) and self.above(j)):
                    verts.add(self._cross_key(i, j))
            if not verts:
                out = frozenset()
            else:
                apex = min(verts)
                cells = set()
                for f in combinations(simplex, len(simplex) - 1):
                    for c in self.cut_closure(f):
                        cells.add(c)
                        if apex not in c:
                            cells.add(_norm_cell(c + (apex,)))
                cells.add((apex,))
                out = frozenset(cells)
        self._cut[simplex] = out
        return out


def _materialize(points, values, t, cells, parent_provenance=None):
    """Turn node-key cells into a ClippedComplex with concrete coordinates."""
    nv = len(values)
    nodes = sorted({n for c in cells for n in c})
    index = {n: i for i, n in enumerate(nodes)}
    pts = np.empty((len(nodes), points.shape[1]), dtype=float)
    prov = []
    for n, i in index.items():
        if n >= nv:
            a, b = divmod(n - nv, nv)
            s = (t - values[a]) / (values[b] - values[a])
            pts[i] = points[a] + s * (points[b] - points[a])
            prov.append(("e", a, b, float(s)))
        else:
            pts[i] = points[n]
            if parent_provenance is not None:
                prov.append(parent_provenance[n])
            else:
                prov.append(("v", n))
    simplices = tuple(sorted((tuple(index[n] for n in c) for c in cells),
                             key=lambda s: (len(s), s)))
    return ClippedComplex(pts, simplices, tuple(prov))


def _split_by_threshold(simplices, values, t):
    """Partition cells into fully kept / straddling (vectorized per size)."""
    vals = np.asarray(values, dtype=float)
    kept, straddling = [], []
    by_size = {}
    for s in simplices:
        by_size.setdefault(len(s), []).append(s)
    for group in by_size.values():
        gv = vals[np.asarray(group, dtype=np.int64)]
        mn, mx = gv.min(axis=1), gv.max(axis=1)
        for s, lo, hi in zip(group, mn, mx):
            if lo >= t:
                kept.append(s)
            elif hi >= t:
                straddling.append(s)
    return kept, straddling


def _clip_complex(points, simplices, values, t, provenance=None):
    # only cells crossed by the threshold need the recursive clipper;
    # fully-kept cells pass through whole (with their closure, so inputs
    # that are not already closed still come out closed)
    kept, straddling = _split_by_threshold(simplices, values, t)
    cells = set()
    for s in kept:
        cells.update(_full_closure(tuple(s)))
    clipper = _Clipper(values, t)
    for s in straddling:
        cells.update(clipper.clip_closure(s))
    return _materialize(points, values, t, cells, provenance)


@lru_cache(maxsize=None)
def _clip_templates(k):
    """Clipping patterns for a k-vertex simplex, per kept-vertex bitmask,
    valid when no vertex lies exactly on the threshold.

    Built by running the generic clipper on a reference simplex, so the
    triangulation is identical to the recursive path. Each pattern is a pair
    (original_positions, crossing_edges): the instantiated cell lists those
    vertices followed by the crossing points of those (kept, dropped) local
    edges, which is already the global pulling order when the input simplex
    is sorted. Only cells containing a crossing point are listed; fully kept
    faces of a closed complex are cells of the input and are counted
    separately.
    """
    out = {}
    for mask in range(1, 2**k - 1):
        vals = np.array([1.0 if mask >> p & 1 else 0.0 for p in range(k)])
        clipper = _Clipper(vals, 0.5)
        patterns = []
        for c in clipper.clip_closure(tuple(range(k))):
            if c[-1] >= k:  # sorted cell: crossing codes sit at the end
                orig = tuple(p for p in c if p < k)
                cross = tuple(divmod(p - k, k) for p in c if p >= k)
                patterns.append((orig, cross))
        out[mask] = tuple(patterns)
    return out


def _boundary_cells(points, values, straddling, t):
    """New cells of {f >= t} (those with at least one crossing point)
    contributed by the given straddling simplices of a closed complex.

    Returns (coords, cells) ready for scanning, or (None, ()) if empty.
    Uses the pattern tables when no vertex value equals t, otherwise the
    generic clipper.
    """
    nv = len(values)
    new = set()
    if np.any(values == t):
        clipper = _Clipper(values, t)
        for s in straddling:
            for c in clipper.clip_closure(s):
                if c[-1] >= nv:
                    new.add(c)
    else:
        for s in straddling:
            k = len(s)
            mask = 0
            for p in range(k):
                if values[s[p]] >= t:
                    mask |= 1 << p
            for orig, cross in _clip_templates(k)[mask]:
                new.add(tuple(s[p] for p in orig)
                        + tuple(nv + s[a] * nv + s[b] for a, b in cross))
    if not new:
        return None, ()
    nodes = np.array(sorted({n for c in new for n in c}), dtype=np.int64)
    index = {int(n): i for i, n in enumerate(nodes)}
    n0 = int(np.searchsorted(nodes, nv))
    coords = np.empty((nodes.size, points.shape[1]), dtype=float)
    coords[:n0] = points[nodes[:n0]]
    a, b = np.divmod(nodes[n0:] - nv, nv)
    frac = (t - values[a]) / (values[b] - values[a])
    coords[n0:] = points[a] + frac[:, None] * (points[b] - points[a])
    cells = tuple(tuple(index[n] for n in c) for c in new)
    return coords, cells


def superlevel_restrict(field, t) -> ClippedComplex:
    """The complex {f >= t} for t in (0, 1], closed-set convention."""
    if not 0.0 < t <= 1.0:
        raise ValueError(f"threshold {t} outside (0, 1]")
    points, simplices = field.cells()
    return _clip_complex(points, simplices, field.values, t)


def level_restrict(field, t) -> ClippedComplex:
    """The complex {f = t} for t in (0, 1]; cells with f identically t are
    kept whole (constant-cell branch)."""
    if not 0.0 < t <= 1.0:
        raise ValueError(f"threshold {t} outside (0, 1]")
    points, simplices = field.cells()
    clipper = _Clipper(field.values, t)
    cells = set()
    for s in simplices:
        cells.update(clipper.cut_closure(s))
    return _materialize(points, field.values, t, cells)


def halfspace_clip(complex_like, v, h) -> ClippedComplex:
    """complex ∩ {x.v <= h}, closed, by the same clipping rules applied to
    the linear functional x.v (internally flipped to a >= threshold)."""
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    points, simplices = complex_like.cells()
    neg_heights = -(points @ v)
    prov = getattr(complex_like, "provenance", None)
    return _clip_complex(points, simplices, neg_heights, -h, prov)


def barycentric_subdivision(points, simplices):
    """One round of barycentric subdivision (used by invariance tests)."""
    simplices = [tuple(s) for s in simplices]
    index = {s: i for i, s in enumerate(simplices)}
    pts = np.array([points[list(s)].mean(axis=0) for s in simplices])
    cells = set()

    def descend(s, chain):
        chain = chain + (index[s],)
        cells.add(tuple(sorted(chain)))
        for k in range(1, len(s)):
            for f in combinations(s, k):
                descend(f, chain)

    for s in simplices:
        descend(s, ())
    return pts, tuple(sorted(cells, key=lambda c: (len(c), c)))
