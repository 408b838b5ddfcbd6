"""Domain types for PL scalar fields, voxel grids, direction sets and
transform grids, plus text-format ingestion and conversion.

The mesh_text / voxel_text grammars are documented in the README.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

__all__ = [
    "PLField",
    "VoxelGrid",
    "DirectionSet",
    "TransformGrid",
    "EulerCurve",
    "FormatError",
    "load_field",
    "write_field",
    "voxel_to_pl",
    "pl_from_grid_2d",
    "normalize_field",
    "make_directions",
    "default_heights",
    "default_thresholds",
]


class FormatError(ValueError):
    """Raised on malformed input files, with a line number when available."""

    def __init__(self, msg, line=None):
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)
        self.line = line


def _closure_of(simplices):
    """All faces of all listed simplices, as sorted tuples."""
    out = set()
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return out


@dataclass(frozen=True)
class PLField:
    """A piecewise-linear scalar field on a geometric simplicial complex.

    ``points`` is an (nv, dim) float array, ``values`` an (nv,) float array,
    ``simplices`` a tuple of sorted vertex-index tuples forming a *closed*
    complex (every face of every simplex is listed).
    """

    dim: int
    points: np.ndarray
    values: np.ndarray
    simplices: tuple
    constant_warning: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "simplices", tuple(tuple(int(v) for v in s) for s in self.simplices))
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError("points must be (nv, dim)")
        if vals.shape != (pts.shape[0],):
            raise ValueError("values must be (nv,)")
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(vals)):
            raise ValueError("non-finite coordinates or values")
        listed = set(self.simplices)
        for s in self.simplices:
            if list(s) != sorted(set(s)):
                raise ValueError(f"simplex {s} must have distinct sorted vertex indices")
            if s[-1] >= pts.shape[0] or s[0] < 0:
                raise ValueError(f"simplex {s} references a missing vertex")
        if _closure_of(self.simplices) - listed:
            raise ValueError("complex not closed: some faces are missing")

    @property
    def n_vertices(self):
        return self.points.shape[0]

    @property
    def edges(self):
        return [s for s in self.simplices if len(s) == 2]

    @property
    def bounding_box(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    def cells(self):
        """(points, simplices) view used by the combinatorial machinery."""
        return self.points, self.simplices


@dataclass(frozen=True)
class VoxelGrid:
    """Dense scalar samples on a regular 3D grid, x fastest in memory."""

    dims: tuple
    origin: np.ndarray
    spacing: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        object.__setattr__(self, "spacing", np.asarray(self.spacing, dtype=float))
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        object.__setattr__(self, "values", vals)
        if len(self.dims) != 3 or any(n < 1 for n in self.dims):
            raise ValueError("dims must be three positive integers")
        if np.any(self.spacing <= 0):
            raise ValueError("spacing must be strictly positive")
        if vals.size != self.dims[0] * self.dims[1] * self.dims[2]:
            raise ValueError("values length must equal nx*ny*nz")
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite voxel values")

    def value_at(self, i, j, k):
        nx, ny, _ = self.dims
        return self.values[i + nx * (j + ny * k)]

    def point_at(self, i, j, k):
        return self.origin + self.spacing * np.array([i, j, k], dtype=float)


@dataclass(frozen=True)
class DirectionSet:
    """Unit scanning directions in R^2 or R^3."""

    dim: int
    directions: np.ndarray
    scheme: str = "explicit"

    def __post_init__(self):
        dirs = np.asarray(self.directions, dtype=float)
        object.__setattr__(self, "directions", dirs)
        if dirs.ndim != 2 or dirs.shape[1] != self.dim:
            raise ValueError("directions must be (n, dim)")
        norms = np.linalg.norm(dirs, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("directions must be unit vectors (tol 1e-12)")

    def __len__(self):
        return self.directions.shape[0]


@dataclass(frozen=True)
class EulerCurve:
    """Right-continuous integer step function of height.

    ``jumps`` is a tuple of (height, new_value) with strictly increasing
    heights; the value at -inf is ``initial_value`` (0 for compact support).
    """

    jumps: tuple
    initial_value: int = 0

    def __post_init__(self):
        js = tuple((float(h), int(v)) for h, v in self.jumps)
        object.__setattr__(self, "jumps", js)
        hs = [h for h, _ in js]
        if any(b <= a for a, b in zip(hs, hs[1:])):
            raise ValueError("jump heights must be strictly increasing")

    @classmethod
    def from_deltas(cls, deltas, initial_value=0):
        """Build from a {height: signed change} mapping; zero-net events vanish."""
        jumps = []
        v = initial_value
        for h in sorted(deltas):
            d = deltas[h]
            if d != 0:
                v += d
                jumps.append((h, v))
        return cls(tuple(jumps), initial_value)

    def value_at(self, h):
        v = self.initial_value
        for jh, jv in self.jumps:
            if jh <= h:
                v = jv
            else:
                break
        return v

    def sample(self, heights):
        """Values at an array of heights (vectorized, right-continuous)."""
        heights = np.asarray(heights, dtype=float)
        if not self.jumps:
            return np.full(heights.shape, self.initial_value, dtype=np.int64)
        jh = np.array([h for h, _ in self.jumps])
        jv = np.array([v for _, v in self.jumps], dtype=np.int64)
        idx = np.searchsorted(jh, heights, side="right")
        vals = np.concatenate([[self.initial_value], jv])
        return vals[idx]

    @property
    def final_value(self):
        return self.jumps[-1][1] if self.jumps else self.initial_value

    def jump_heights(self):
        return np.array([h for h, _ in self.jumps])


@dataclass(frozen=True)
class TransformGrid:
    """Dense integer array of transform values indexed (direction, height, threshold)."""

    directions: DirectionSet
    heights: np.ndarray
    thresholds: np.ndarray
    values: np.ndarray
    kind: str  # "SELECT" | "LECT" | "ECT"

    def __post_init__(self):
        hs = np.asarray(self.heights, dtype=float)
        ts = np.asarray(self.thresholds, dtype=float)
        vals = np.asarray(self.values)
        object.__setattr__(self, "heights", hs)
        object.__setattr__(self, "thresholds", ts)
        object.__setattr__(self, "values", vals)
        if self.kind not in ("SELECT", "LECT", "ECT"):
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if np.any(np.diff(hs) <= 0) or np.any(np.diff(ts) <= 0):
            raise ValueError("height and threshold axes must be strictly increasing")
        expect = (len(self.directions), hs.size, ts.size)
        if vals.shape != expect:
            raise ValueError(f"values shape {vals.shape} != axes {expect}")
        if not np.issubdtype(vals.dtype, np.integer):
            raise ValueError("transform values must be integers")

    def same_axes(self, other):
        return (
            self.kind == other.kind
            and self.values.shape == other.values.shape
            and np.array_equal(self.heights, other.heights)
            and np.array_equal(self.thresholds, other.thresholds)
            and np.allclose(self.directions.directions, other.directions.directions)
        )

    def save(self, path):
        with open(path, "w") as fh:
            nd, nh, nt = self.values.shape
            fh.write(f"TRANSFORM {self.kind} {self.directions.dim} {nd} {nh} {nt}\n")
            fh.write(f"scheme {self.directions.scheme}\n")
            for v in self.directions.directions:
                fh.write(" ".join(repr(float(x)) for x in v) + "\n")
            fh.write(" ".join(repr(float(h)) for h in self.heights) + "\n")
            fh.write(" ".join(repr(float(t)) for t in self.thresholds) + "\n")
            flat = self.values.reshape(-1)
            for i in range(0, flat.size, 16):
                fh.write(" ".join(str(int(x)) for x in flat[i : i + 16]) + "\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            tokens = fh.read().split("\n")
        head = tokens[0].split()
        if not head or head[0] != "TRANSFORM":
            raise FormatError("expected TRANSFORM header", line=1)
        kind, dim, nd, nh, nt = head[1], int(head[2]), int(head[3]), int(head[4]), int(head[5])
        scheme = tokens[1].split()[1]
        dirs = np.array([[float(x) for x in tokens[2 + i].split()] for i in range(nd)])
        heights = np.array([float(x) for x in tokens[2 + nd].split()])
        thresholds = np.array([float(x) for x in tokens[3 + nd].split()])
        rest = " ".join(tokens[4 + nd :]).split()
        values = np.array([int(x) for x in rest], dtype=np.int64).reshape(nd, nh, nt)
        return cls(DirectionSet(dim, dirs, scheme), heights, thresholds, values, kind)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("direction_index,height,threshold,value\n")
            nd, nh, nt = self.values.shape
            for i in range(nd):
                for j in range(nh):
                    for k in range(nt):
                        fh.write(f"{i},{float(self.heights[j])!r},"
                                 f"{float(self.thresholds[k])!r},{self.values[i, j, k]}\n")


# ---------------------------------------------------------------------------
# Ingestion


def load_field(path, format=None):
    """Parse a mesh_text or voxel_text file.

    With ``format=None`` the file's magic line decides. Returns a PLField or
    a VoxelGrid; raises FormatError with a line number on malformed input.
    """
    with open(path) as fh:
        raw = fh.readlines()
    lines = []
    for n, text in enumerate(raw, start=1):
        text = text.split("#", 1)[0].strip()
        if text:
            lines.append((n, text))
    if not lines:
        raise FormatError("empty file")
    magic = lines[0][1].split()[0]
    if format is None:
        format = {"PLFIELD": "mesh_text", "VOXEL": "voxel_text"}.get(magic)
        if format is None:
            raise FormatError(f"unknown magic {magic!r}", line=lines[0][0])
    if format == "mesh_text":
        return _parse_mesh(lines)
    if format == "voxel_text":
        return _parse_voxel(lines)
    raise ValueError(f"unknown format {format!r}")


def _parse_mesh(lines):
    n0, head = lines[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "PLFIELD":
        raise FormatError("expected 'PLFIELD <d>'", line=n0)
    d = int(parts[1])
    if d not in (2, 3):
        raise FormatError("dimension must be 2 or 3", line=n0)
    try:
        n1, counts = lines[1]
        nv, ns = (int(x) for x in counts.split())
    except (IndexError, ValueError):
        raise FormatError("expected '<nv> <ns>'", line=lines[1][0] if len(lines) > 1 else n0)
    if len(lines) < 2 + nv + ns:
        raise FormatError(f"expected {nv} vertex and {ns} simplex lines", line=lines[-1][0])
    points, values = [], []
    for ln, text in lines[2 : 2 + nv]:
        nums = text.split()
        if len(nums) != d + 1:
            raise FormatError(f"expected {d} coordinates and a value", line=ln)
        try:
            nums = [float(x) for x in nums]
        except ValueError:
            raise FormatError("bad number", line=ln)
        points.append(nums[:d])
        values.append(nums[d])
    simplices = []
    for ln, text in lines[2 + nv : 2 + nv + ns]:
        ids = text.split()
        try:
            k = int(ids[0])
            verts = tuple(int(x) for x in ids[1:])
        except ValueError:
            raise FormatError("bad simplex line", line=ln)
        if len(verts) != k + 1:
            raise FormatError(f"dimension-{k} simplex needs {k + 1} vertices", line=ln)
        simplices.append(verts)
    try:
        return PLField(d, np.array(points), np.array(values), tuple(simplices))
    except ValueError as exc:
        raise FormatError(str(exc))


def _parse_voxel(lines):
    n0, head = lines[0]
    if head.split() != ["VOXEL", "3"]:
        raise FormatError("expected 'VOXEL 3'", line=n0)
    try:
        dims = tuple(int(x) for x in lines[1][1].split())
        origin = [float(x) for x in lines[2][1].split()]
        spacing = [float(x) for x in lines[3][1].split()]
    except (IndexError, ValueError):
        raise FormatError("bad voxel header", line=n0)
    vals = []
    for ln, text in lines[4:]:
        try:
            vals.extend(float(x) for x in text.split())
        except ValueError:
            raise FormatError("bad number", line=ln)
    try:
        return VoxelGrid(dims, origin, spacing, np.array(vals))
    except ValueError as exc:
        raise FormatError(str(exc))


def write_field(obj, path):
    """Inverse of load_field for canonical files."""
    with open(path, "w") as fh:
        if isinstance(obj, PLField):
            fh.write(f"PLFIELD {obj.dim}\n{obj.n_vertices} {len(obj.simplices)}\n")
            for p, v in zip(obj.points, obj.values):
                fh.write(" ".join(repr(float(x)) for x in p) + f" {float(v)!r}\n")
            for s in obj.simplices:
                fh.write(f"{len(s) - 1} " + " ".join(str(i) for i in s) + "\n")
        elif isinstance(obj, VoxelGrid):
            fh.write("VOXEL 3\n")
            fh.write(" ".join(str(n) for n in obj.dims) + "\n")
            fh.write(" ".join(repr(float(x)) for x in obj.origin) + "\n")
            fh.write(" ".join(repr(float(x)) for x in obj.spacing) + "\n")
            vals = obj.values
            for i in range(0, vals.size, 8):
                fh.write(" ".join(repr(float(x)) for x in vals[i : i + 8]) + "\n")
        else:
            raise TypeError(type(obj).__name__)


# ---------------------------------------------------------------------------
# Grid -> PL conversion

# The six tetrahedra of the Freudenthal split of a unit cube, as chains of
# corner offsets ordered along coordinate permutations. Using corner index
# (dx + 2*dy + 4*dz) and the global vertex order makes shared faces of
# neighboring cubes triangulate identically.
_CUBE_TETS = [
    (0, 1, 3, 7),
    (0, 1, 5, 7),
    (0, 2, 3, 7),
    (0, 2, 6, 7),
    (0, 4, 5, 7),
    (0, 4, 6, 7),
]
_CORNER = {0: (0, 0, 0), 1: (1, 0, 0), 2: (0, 1, 0), 3: (1, 1, 0),
           4: (0, 0, 1), 5: (1, 0, 1), 6: (0, 1, 1), 7: (1, 1, 1)}


def voxel_to_pl(grid: VoxelGrid) -> PLField:
    """PL interpolation of a voxel grid over a Freudenthal tetrahedralization.

    Each grid cube is split into 6 tetrahedra sharing the main diagonal;
    adjacent cubes agree on shared faces because the split is expressed in
    global vertex indices.
    """
    nx, ny, nz = grid.dims
    if min(nx, ny, nz) < 2:
        raise ValueError("need at least 2 samples per axis")
    # vertex id = i + nx*(j + ny*k), x fastest, matching the voxel layout
    ids = np.arange(nx * ny * nz)
    i = ids % nx
    j = (ids // nx) % ny
    k = ids // (nx * ny)
    pts = grid.origin[None, :] + np.stack([i, j, k], axis=-1) * grid.spacing[None, :]
    tets = []
    for ci in range(nx - 1):
        for cj in range(ny - 1):
            for ck in range(nz - 1):
                corner_id = {}
                for c, (dx, dy, dz) in _CORNER.items():
                    corner_id[c] = (ci + dx) + nx * ((cj + dy) + ny * (ck + dz))
                for tet in _CUBE_TETS:
                    tets.append(tuple(sorted(corner_id[c] for c in tet)))
    simplices = sorted(_closure_of(tets), key=lambda s: (len(s), s))
    return PLField(3, pts, grid.values, tuple(simplices))


def pl_from_grid_2d(values, origin=(-1.0, -1.0), spacing=None) -> PLField:
    """PL field from a 2D sample array, squares split along the (0,0)-(1,1)
    diagonal in global vertex order (2D analogue of voxel_to_pl)."""
    values = np.asarray(values, dtype=float)
    nx, ny = values.shape
    if spacing is None:
        spacing = (2.0 / (nx - 1), 2.0 / (ny - 1))
    ids = np.arange(nx * ny)
    i = ids % nx
    j = ids // nx
    pts = np.asarray(origin, dtype=float)[None, :] + np.stack([i, j], axis=-1) * np.asarray(spacing)[None, :]
    vals = values.reshape(-1, order="F")
    tris = []
    for ci in range(nx - 1):
        for cj in range(ny - 1):
            a = ci + nx * cj
            b = ci + 1 + nx * cj
            c = ci + nx * (cj + 1)
            d = ci + 1 + nx * (cj + 1)
            tris.append(tuple(sorted((a, b, d))))
            tris.append(tuple(sorted((a, c, d))))
    simplices = sorted(_closure_of(tris), key=lambda s: (len(s), s))
    return PLField(2, pts, vals, tuple(simplices))


def normalize_field(f: PLField, mode="per_field", *, scale=None, offset=None) -> PLField:
    """Affine rescale of the values into [0,1].

    per_field: map [min, max] -> [0, 1]; a constant field maps to 0 and the
    result carries ``constant_warning=True``.
    global: values become (v - offset) / scale with caller-supplied constants
    shared across a collection of fields (offset defaults to 0).
    """
    if f.n_vertices == 0:
        raise ValueError("field has no vertices")
    vals = f.values
    warning = False
    if mode == "per_field":
        lo, hi = vals.min(), vals.max()
        if hi == lo:
            new = np.zeros_like(vals)
            warning = True
        else:
            new = (vals - lo) / (hi - lo)
    elif mode == "global":
        if scale is None or scale <= 0:
            raise ValueError("global mode needs a positive scale")
        new = (vals - (offset or 0.0)) / scale
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return PLField(f.dim, f.points, new, f.simplices, constant_warning=warning)


def rescale_geometry(f: PLField) -> PLField:
    """Affinely map the bounding box into [-1,1]^d (aspect preserved per axis)."""
    lo, hi = f.bounding_box
    span = np.where(hi > lo, hi - lo, 1.0)
    pts = (f.points - lo) / span * 2.0 - 1.0
    return PLField(f.dim, pts, f.values, f.simplices, constant_warning=f.constant_warning)


def make_directions(dim, n) -> DirectionSet:
    """Scanning directions: exact uniform circle in 2D, Fibonacci sphere in 3D."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if dim == 2:
        ang = 2.0 * np.pi * np.arange(n) / n
        dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return DirectionSet(2, dirs, "uniform_circle")
    if dim == 3:
        # golden-angle spiral; deterministic for fixed n
        i = np.arange(n, dtype=float)
        phi = math.pi * (3.0 - math.sqrt(5.0)) * i
        z = 1.0 - (2.0 * i + 1.0) / n
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        dirs = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        return DirectionSet(3, dirs, "fibonacci_sphere")
    raise ValueError("dim must be 2 or 3")


def default_heights(f: PLField, directions: DirectionSet, n) -> np.ndarray:
    """Uniform height grid over [-R, R] padded by one step, R = max |x.v|,
    so every Euler curve attains its final value inside the grid."""
    heights = f.points @ directions.directions.T
    r = float(np.abs(heights).max())
    step = 2.0 * r / max(n - 1, 1)
    return np.linspace(-r - step, r + step, n)


def default_thresholds(n=30) -> np.ndarray:
    """n uniform thresholds on (0, 1]; t = 0 is excluded."""
    return np.arange(1, n + 1) / n
