"""Shared builders: random closed complexes, random PL fields, and an
independent brute-force Euler-curve oracle used to anchor the fast scans."""

from __future__ import annotations

import sys
from itertools import combinations

import numpy as np


def pytest_terminal_summary(terminalreporter):
    """Echo one line per acceptance criterion at the end of the run."""
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None) if mod else None
    if not results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for num, name, status in sorted(results):
        terminalreporter.write_line(f"  [{num:02d}] {name}: {status}")

from liftect.complex_ops import euler_characteristic, halfspace_clip
from liftect.field_core import PLField


def closure_of(top_cells):
    out = set()
    for s in top_cells:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return tuple(sorted(out, key=lambda c: (len(c), c)))


def random_complex(rng, dim, n_points=12, n_top=8, top_dim=None):
    """Random geometric complex: closure of random top simplices on random
    points. Returns (points, simplices)."""
    top_dim = top_dim or dim
    points = rng.uniform(-1.0, 1.0, size=(n_points, dim))
    tops = []
    for _ in range(n_top):
        k = int(rng.integers(1, top_dim + 2))  # 1..dim+1 vertices
        tops.append(tuple(int(v) for v in rng.choice(n_points, size=k, replace=False)))
    return points, closure_of(tops)


def random_field(rng, dim, n_points=12, n_top=8):
    """Random PLField with generic values in (0, 1)."""
    points, simplices = random_complex(rng, dim, n_points, n_top)
    values = rng.uniform(0.05, 0.95, size=n_points)
    return PLField(dim, points, values, simplices)


class BareComplex:
    """Minimal cells() wrapper so raw (points, simplices) pairs can flow
    through the transform machinery."""

    def __init__(self, points, simplices):
        self.points = np.asarray(points, dtype=float)
        self.simplices = tuple(tuple(s) for s in simplices)

    def cells(self):
        return self.points, self.simplices


def brute_force_curve_values(complex_like, v, heights):
    """Oracle: chi of the half-space clip at each height, computed by full
    geometric clipping (independent of the event-sorting scan)."""
    return np.array(
        [euler_characteristic(halfspace_clip(complex_like, v, float(h))) for h in heights],
        dtype=np.int64,
    )
