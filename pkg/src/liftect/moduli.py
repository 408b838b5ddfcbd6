"""Membership checks for the vertical-gap / observability / jump-count
function class, and the scan-count bound.

Condition 3 (direction-ball observability) is verified by sampling only;
``unknown`` is an honest outcome. The bound reports the explicit leading
term; the big-O term's constant is flagged, never invented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .transforms import euler_scan

__all__ = [
    "ModuliParams",
    "ClassReport",
    "check_gap_condition",
    "max_jump_count",
    "check_observability",
    "delta_bound",
    "verify_class",
    "combinatorial_neighbors",
    "superlevel_neighbors",
]


@dataclass(frozen=True)
class ModuliParams:
    d: int
    k: int
    delta_k: float
    delta_b: float
    delta: float

    def __post_init__(self):
        if min(self.d, self.k) < 1 or min(self.delta_k, self.delta_b, self.delta) <= 0:
            raise ValueError("all class parameters must be strictly positive")
        if self.delta_b > 1.0 / 3.0:
            raise ValueError("delta_b must be <= 1/3 for values in [0,1] with 3*delta_b gaps")


@dataclass
class ClassReport:
    cond1: bool
    cond2: bool
    cond2_witness: object
    cond3: str  # verified_sampled | violated | unknown
    cond3_witness: object
    cond4_max_jumps: int
    cond4: bool
    overall: str  # pass | fail | unknown

    def to_dict(self):
        return {
            "cond1_piecewise_linear": self.cond1,
            "cond2_vertical_gap": {"pass": self.cond2, "witness": self.cond2_witness},
            "cond3_observability": {"status": self.cond3, "witness": self.cond3_witness},
            "cond4_jump_count": {"max_jumps": self.cond4_max_jumps, "pass": self.cond4},
            "overall": self.overall,
        }


def check_gap_condition(f, delta_b):
    """Every edge must change the field value by at least 3*delta_b."""
    for e in f.edges:
        a, b = e
        if abs(f.values[a] - f.values[b]) < 3.0 * delta_b:
            return False, e
    return True, None


def max_jump_count(f, directions, thresholds) -> int:
    """Max number of exact jump events over the sampled (v, t) pairs."""
    thresholds = np.asarray(thresholds, dtype=float)
    if np.any(thresholds <= 0) or np.any(thresholds > 1):
        raise ValueError("thresholds must lie in (0, 1]")
    worst = 0
    for t in thresholds:
        for v in directions.directions:
            worst = max(worst, len(euler_scan(f, v, float(t)).jumps))
    return worst


def _crossing_point(f, edge, t):
    a, b = edge
    fa, fb = f.values[a], f.values[b]
    s = (t - fa) / (fb - fa)
    return f.points[a] + s * (f.points[b] - f.points[a])


def edge_observable(f, edge, v, t, tol=1e-12) -> bool:
    """Does the superlevel Euler curve change at the edge's crossing height?

    A jump of any magnitude counts, including merged events.
    """
    h = float(_crossing_point(f, edge, t) @ np.asarray(v, dtype=float))
    curve = euler_scan(f, v, t)
    return bool(np.any(np.abs(curve.jump_heights() - h) <= tol * max(1.0, abs(h))))


def _ball_directions(center, delta_k, n, rng):
    """n random unit vectors within angular radius delta_k of center."""
    center = np.asarray(center, dtype=float)
    d = center.size
    out = []
    while len(out) < n:
        w = rng.normal(size=d)
        w /= np.linalg.norm(w)
        # pull towards the center to land inside the cap
        ang = rng.uniform(0.0, delta_k)
        perp = w - (w @ center) * center
        norm = np.linalg.norm(perp)
        if norm < 1e-12:
            continue
        perp /= norm
        out.append(math.cos(ang) * center + math.sin(ang) * perp)
    return out


def check_observability(f, delta_k, n_samples=8, n_centers=12, seed=0):
    """Sampled verification of direction-ball observability, per edge.

    For each non-constant edge one threshold in (e_min, e_max) is tested
    (observability is uniform in t for PL fields: the crossing point's link
    projects linearly, so its angles do not depend on t). Status per edge:
    verified_sampled if some sampled center has every sampled direction in
    its ball observing the edge; violated if no sampled direction anywhere
    observed it; unknown otherwise.
    """
    rng = np.random.default_rng(seed)
    statuses = {}
    for e in f.edges:
        a, b = e
        fa, fb = f.values[a], f.values[b]
        if fa == fb:
            continue
        lo, hi = min(fa, fb), max(fa, fb)
        t = lo + 0.5 * (hi - lo)
        if not 0.0 < t <= 1.0:
            t = min(max(t, 1e-9), 1.0)
        any_hit = False
        verified = False
        for _ in range(n_centers):
            center = rng.normal(size=f.dim)
            center /= np.linalg.norm(center)
            hits = [edge_observable(f, e, v, t)
                    for v in _ball_directions(center, delta_k, n_samples, rng)]
            any_hit = any_hit or any(hits)
            if all(hits):
                verified = True
                break
        statuses[e] = "verified_sampled" if verified else ("unknown" if any_hit else "violated")
    return statuses


def delta_bound(params: ModuliParams):
    """Explicit leading term of the scan-count bound.

    Returns (leading_term, level_factor, note). The dropped big-O term has
    an unspecified constant, so the value is the leading term only.
    """
    level_factor = math.floor(1.0 / params.delta_b)
    per_level = ((params.d - 1) * params.k + 1) * (1.0 + 3.0 / params.delta) ** params.d
    leading = math.ceil(per_level) * level_factor
    note = ("leading term only; the O(d^{d+1} k^{2d} / delta^{2d(d-1)}) correction "
            "has an unspecified constant and is not included")
    return leading, level_factor, note


def combinatorial_neighbors(f, edge):
    """Neighbor edges of ``edge`` through shared triangles, classified as
    dominating or dominated by vertical extent."""
    x0, x1 = edge
    if f.values[x0] > f.values[x1]:
        x0, x1 = x1, x0  # f(x0) < f(x1)
    out = []
    for tri in (s for s in f.simplices if len(s) == 3):
        if x0 in tri and x1 in tri:
            (x2,) = [v for v in tri if v not in (x0, x1)]
            f0, f1, f2 = f.values[x0], f.values[x1], f.values[x2]
            if f0 < f2 < f1:
                out.append((tuple(sorted((x0, x2))), "dominated"))
                out.append((tuple(sorted((x2, x1))), "dominated"))
            elif f2 < f0 < f1:
                out.append((tuple(sorted((x2, x1))), "dominating"))
            elif f0 < f1 < f2:
                out.append((tuple(sorted((x0, x2))), "dominating"))
    return out


def superlevel_neighbors(f, edge, n_levels=17):
    """Neighbor edges found by direct superlevel-set inspection: e' is a
    neighbor if some superlevel set meets both edges at points joined by an
    edge of the restricted complex."""
    from .complex_ops import superlevel_restrict

    x0, x1 = edge
    lo = min(f.values[x0], f.values[x1])
    hi = max(f.values[x0], f.values[x1])
    found = set()
    for t in np.linspace(lo, hi, n_levels + 2)[1:-1]:
        if not 0.0 < t <= 1.0:
            continue
        clipped = superlevel_restrict(f, float(t))
        on_e = [i for i, pr in enumerate(clipped.provenance)
                if pr[0] == "e" and tuple(sorted(pr[1:3])) == tuple(sorted(edge))]
        if not on_e:
            continue
        crossings = {i: tuple(sorted(pr[1:3])) for i, pr in enumerate(clipped.provenance)
                     if pr[0] == "e"}
        for cell in clipped.simplices:
            if len(cell) != 2:
                continue
            i, j = cell
            if i in on_e and j in crossings and j not in on_e:
                found.add(crossings[j])
            elif j in on_e and i in crossings and i not in on_e:
                found.add(crossings[i])
    return found


def verify_class(f, params: ModuliParams, directions, thresholds, seed=0) -> ClassReport:
    """Full class-membership report (condition 3 sampled, not certified)."""
    ok2, witness2 = check_gap_condition(f, params.delta_b)
    statuses = check_observability(f, params.delta_k, seed=seed)
    if statuses and all(s == "verified_sampled" for s in statuses.values()):
        cond3, witness3 = "verified_sampled", None
    elif any(s == "violated" for s in statuses.values()):
        bad = [e for e, s in statuses.items() if s == "violated"]
        cond3, witness3 = "violated", bad[0]
    else:
        pending = [e for e, s in statuses.items() if s != "verified_sampled"]
        cond3, witness3 = "unknown", (pending[0] if pending else None)
    jumps = max_jump_count(f, directions, thresholds)
    ok4 = jumps <= params.k
    if ok2 and ok4 and cond3 == "verified_sampled":
        overall = "pass"
    elif not ok2 or not ok4 or cond3 == "violated":
        overall = "fail"
    else:
        overall = "unknown"
    return ClassReport(True, ok2, witness2, cond3, witness3, jumps, ok4, overall)
