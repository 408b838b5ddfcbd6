"""Seeded generators for the simulated quadric fields and for point-cloud
distance fields.

All randomness flows through numpy's PCG64 generator (default_rng), so a
fixed seed replays bit-identically across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field_core import PLField, VoxelGrid, pl_from_grid_2d, voxel_to_pl

__all__ = [
    "QuadricSpec",
    "gen_quadric",
    "gen_point_cloud_field",
    "gen_field_suite",
    "gen_glyph_field_2d",
    "grid_points_10",
]

FAMILIES = (1, 2, 3, 4)


def grid_points_10():
    """The simulation grid: coordinates -1 + 2i/9 for i = 0..9 on each axis."""
    return -1.0 + 2.0 * np.arange(10) / 9.0


@dataclass(frozen=True)
class QuadricSpec:
    family: int
    alpha: float
    beta: float
    gamma: float
    delta: float = 0.5  # family 4 only
    noise_sd: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError("family must be 1..4")
        for name in ("alpha", "beta", "gamma", "delta", "noise_sd"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not 0.5 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0.5, 1]")
        if self.family == 4 and not 0.4 <= self.delta <= 0.6:
            raise ValueError("delta outside [0.4, 0.6]")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")


def quadric_value(spec: QuadricSpec, x, y, z):
    a, b, g = spec.alpha, spec.beta, spec.gamma
    if spec.family == 1:
        return a * x**2 + b * y**2 + g * z**2
    if spec.family == 2:
        return a * x**2 + b * y**2 - g * z**2
    if spec.family == 3:
        return a * x**2 - b * y**2 - g * z**2
    return (np.sqrt(a * x**2 + b * y**2) - spec.delta) ** 2 + g * z**2


def gen_quadric(spec: QuadricSpec) -> VoxelGrid:
    """One 10x10x10 field on [-1,1]^3; iid Gaussian noise when noise_sd > 0."""
    coords = grid_points_10()
    z, y, x = np.meshgrid(coords, coords, coords, indexing="ij")
    vals = quadric_value(spec, x, y, z)  # x fastest in memory
    if spec.noise_sd > 0:
        rng = np.random.default_rng(spec.seed)
        vals = vals + rng.normal(0.0, spec.noise_sd, size=vals.shape)
    return VoxelGrid((10, 10, 10), origin=(-1.0, -1.0, -1.0),
                     spacing=(2.0 / 9, 2.0 / 9, 2.0 / 9), values=vals.reshape(-1))


def gen_field_suite(n_per_family=10, setup=1, seed=0):
    """4*n labeled fields with parameters drawn from the stated uniforms.

    Setup 1 is noiseless; setup 2 adds iid N(0, 0.1) per voxel. Per-field
    noise streams are derived from (seed, field index) so generation is
    order-independent and deterministic.
    """
    if setup not in (1, 2):
        raise ValueError("setup must be 1 or 2")
    rng = np.random.default_rng(seed)
    out = []
    idx = 0
    for family in FAMILIES:
        for _ in range(n_per_family):
            a, b, g = rng.uniform(0.5, 1.0, size=3)
            d = rng.uniform(0.4, 0.6) if family == 4 else 0.5
            noise_sd = 0.1 if setup == 2 else 0.0
            sub = int(np.random.SeedSequence((seed, idx)).generate_state(1)[0])
            spec = QuadricSpec(family, a, b, g, d, noise_sd, sub)
            out.append((gen_quadric(spec), family, spec))
            idx += 1
    return out


def gen_point_cloud_field(points, radius, grid_n=32, bounds=None) -> PLField:
    """PL field g(x) = max(0, R - min_i |x - p_i|) sampled on a grid.

    The t-superlevel set approximates the union of balls of radius R - t
    around the points. (The shifted form keeps thresholds in (0, 1]; the
    plain negated-distance field would make every positive threshold empty.)
    """
    points = np.asarray(points, dtype=float)
    if radius <= 0 or points.ndim != 2:
        raise ValueError("need positive radius and an (n, d) point array")
    d = points.shape[1]
    if bounds is None:
        lo = points.min(axis=0) - radius
        hi = points.max(axis=0) + radius
    else:
        lo, hi = (np.asarray(b, dtype=float) for b in bounds)
    axes = [np.linspace(lo[i], hi[i], grid_n) for i in range(d)]
    if d == 2:
        gx, gy = np.meshgrid(axes[0], axes[1], indexing="ij")
        samples = np.stack([gx, gy], axis=-1)
        dist = np.min(np.linalg.norm(samples[..., None, :] - points[None, None], axis=-1), axis=-1)
        vals = np.maximum(0.0, radius - dist)
        spacing = ((hi[0] - lo[0]) / (grid_n - 1), (hi[1] - lo[1]) / (grid_n - 1))
        return pl_from_grid_2d(vals, origin=lo, spacing=spacing)
    if d == 3:
        gz, gy, gx = np.meshgrid(axes[2], axes[1], axes[0], indexing="ij")
        samples = np.stack([gx, gy, gz], axis=-1)
        dist = np.min(np.linalg.norm(samples[..., None, :] - points[None, None, None], axis=-1), axis=-1)
        vals = np.maximum(0.0, radius - dist)
        spacing = (hi - lo) / (grid_n - 1)
        grid = VoxelGrid((grid_n, grid_n, grid_n), lo, spacing, vals.reshape(-1))
        return voxel_to_pl(grid)
    raise ValueError("points must live in R^2 or R^3")


def gen_glyph_field_2d(grid_n=24, n_bumps=3, seed=0, bounds=2.0) -> PLField:
    """A generic asymmetric 2D field (sum of Gaussian bumps) for alignment
    demos; deterministic for fixed seed."""
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-0.8, 0.8, size=(n_bumps, 2))
    widths = rng.uniform(0.15, 0.45, size=n_bumps)
    amps = rng.uniform(0.5, 1.0, size=n_bumps)
    ax = np.linspace(-bounds, bounds, grid_n)
    gx, gy = np.meshgrid(ax, ax, indexing="ij")
    vals = np.zeros_like(gx)
    for c, w, a in zip(centers, widths, amps):
        vals += a * np.exp(-((gx - c[0]) ** 2 + (gy - c[1]) ** 2) / (2 * w**2))
    step = 2 * bounds / (grid_n - 1)
    return pl_from_grid_2d(vals, origin=(-bounds, -bounds), spacing=(step, step))
