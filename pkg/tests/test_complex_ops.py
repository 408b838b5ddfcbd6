import numpy as np
import pytest

import liftect as lt
from liftect.complex_ops import (
    barycentric_subdivision,
    euler_characteristic,
    euler_integral,
    halfspace_clip,
    level_restrict,
    superlevel_restrict,
)
from conftest import BareComplex, closure_of, random_field


def field_2d(vals):
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    simp = ((0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2))
    return lt.PLField(2, pts, np.asarray(vals, dtype=float), simp)


def tet_field(vals):
    pts = np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 1, 0], [0.0, 0, 1]])
    simp = closure_of([(0, 1, 2, 3)])
    return lt.PLField(3, pts, np.asarray(vals, dtype=float), simp)


class TestEulerCharacteristic:
    def test_ground_truths(self):
        assert euler_characteristic([]) == 0  # empty set
        tri = closure_of([(0, 1, 2)])
        assert euler_characteristic(tri) == 1  # closed triangle
        tet_boundary = closure_of([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])
        assert euler_characteristic(tet_boundary) == 2  # sphere
        circle = closure_of([(0, 1), (1, 2), (0, 2)])
        assert euler_characteristic(circle) == 0

    def test_accepts_complex_objects(self):
        f = field_2d([1.0, 1.0, 1.0])
        assert euler_characteristic(f) == 1

    def test_euler_integral_cell_constant(self):
        cells = closure_of([(0, 1)])
        vals = {(0,): 2, (1,): 2, (0, 1): 5}
        # chi-weighted sum: 2 + 2 - 5
        assert euler_integral(cells, lambda s: vals[s]) == -1
        assert euler_integral(cells, vals) == -1


class TestSuperlevelRestrict:
    def test_all_above_keeps_everything(self):
        f = field_2d([0.9, 0.8, 0.7])
        c = superlevel_restrict(f, 0.5)
        assert euler_characteristic(c) == 1
        assert len(c.simplices) == 7

    def test_all_below_gives_empty(self):
        f = field_2d([0.1, 0.2, 0.3])
        c = superlevel_restrict(f, 0.5)
        assert c.n_vertices == 0 and c.simplices == ()
        assert euler_characteristic(c) == 0

    def test_triangle_one_vertex_above(self):
        f = field_2d([0.9, 0.1, 0.1])
        c = superlevel_restrict(f, 0.5)
        # a small triangle at the high corner
        assert euler_characteristic(c) == 1
        assert sum(1 for s in c.simplices if len(s) == 3) >= 1
        # crossing points sit at the interpolated parameter 0.5 along each edge
        for pr in c.provenance:
            if pr[0] == "e":
                assert pr[3] == pytest.approx(0.5)

    def test_triangle_two_vertices_above(self):
        f = field_2d([0.9, 0.8, 0.1])
        c = superlevel_restrict(f, 0.5)
        assert euler_characteristic(c) == 1  # a quadrilateral

    def test_vertex_exactly_at_threshold_is_kept(self):
        f = field_2d([0.5, 0.4, 0.9])
        c = superlevel_restrict(f, 0.5)
        kept_orig = {pr[1] for pr in c.provenance if pr[0] == "v"}
        assert 0 in kept_orig and 2 in kept_orig and 1 not in kept_orig
        assert euler_characteristic(c) == 1

    def test_no_crossing_created_for_exact_vertex_edge(self):
        # edge (a=t, b<t): the kept part is just the vertex a, no new point
        f = field_2d([0.5, 0.1, 0.1])
        c = superlevel_restrict(f, 0.5)
        assert all(pr[0] == "v" for pr in c.provenance)
        assert euler_characteristic(c) == 1

    def test_threshold_domain_enforced(self):
        f = field_2d([0.2, 0.4, 0.6])
        with pytest.raises(ValueError):
            superlevel_restrict(f, 0.0)
        with pytest.raises(ValueError):
            superlevel_restrict(f, 1.5)

    def test_tet_clip_chi(self):
        for vals, expect in [
            ([0.9, 0.1, 0.1, 0.1], 1),  # corner tet
            ([0.9, 0.8, 0.1, 0.1], 1),  # wedge
            ([0.9, 0.8, 0.7, 0.1], 1),  # frustum
            ([0.9, 0.8, 0.7, 0.6], 1),  # whole tet
        ]:
            f = tet_field(vals)
            assert euler_characteristic(superlevel_restrict(f, 0.5)) == expect

    def test_disconnected_pieces(self):
        # two high vertices joined through a low one: two components
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        simp = closure_of([(0, 1), (1, 2)])
        f = lt.PLField(2, pts, np.array([0.9, 0.1, 0.9]), simp)
        c = superlevel_restrict(f, 0.5)
        assert euler_characteristic(c) == 2

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(7)
        f = random_field(rng, 2, n_points=10, n_top=6)
        sizes = [len(superlevel_restrict(f, t).simplices) for t in (0.2, 0.5, 0.8)]
        assert sizes[0] >= sizes[1] >= sizes[2]


class TestLevelRestrict:
    def test_level_of_triangle_is_segment(self):
        f = field_2d([0.1, 0.9, 0.9])
        c = level_restrict(f, 0.5)
        # crosses edges (0,1) and (0,2): one segment, chi 1
        assert euler_characteristic(c) == 1
        assert sum(1 for s in c.simplices if len(s) == 2) == 1

    def test_level_missing_gives_empty(self):
        f = field_2d([0.1, 0.2, 0.3])
        c = level_restrict(f, 0.9)
        assert euler_characteristic(c) == 0

    def test_constant_cell_kept_whole(self):
        f = field_2d([0.5, 0.5, 0.5])
        c = level_restrict(f, 0.5)
        assert euler_characteristic(c) == 1
        assert sum(1 for s in c.simplices if len(s) == 3) == 1

    def test_level_through_vertex(self):
        f = field_2d([0.5, 0.1, 0.9])
        c = level_restrict(f, 0.5)
        # passes through vertex 0 and crosses edge (1,2): a segment
        assert euler_characteristic(c) == 1


class TestHalfspaceClip:
    def test_plane_through_triangle(self):
        f = field_2d([0.0, 0.0, 0.0])
        c = halfspace_clip(f, np.array([1.0, 0.0]), 0.5)
        assert euler_characteristic(c) == 1

    def test_below_support_empty_above_support_full(self):
        f = field_2d([0.0, 0.0, 0.0])
        assert euler_characteristic(halfspace_clip(f, np.array([1.0, 0.0]), -1.0)) == 0
        c = halfspace_clip(f, np.array([1.0, 0.0]), 2.0)
        assert len(c.simplices) == 7

    def test_requires_unit_direction(self):
        f = field_2d([0.0, 0.0, 0.0])
        with pytest.raises(ValueError, match="unit"):
            halfspace_clip(f, np.array([2.0, 0.0]), 0.5)

    def test_composes_with_superlevel(self):
        f = field_2d([0.9, 0.8, 0.1])
        c = superlevel_restrict(f, 0.5)
        d = halfspace_clip(c, np.array([0.0, 1.0]), 0.25)
        assert euler_characteristic(d) == 1
        # provenance of surviving original-complex crossings is preserved
        assert any(pr[0] == "e" for pr in d.provenance)

    def test_inclusion_exclusion_on_random_complexes(self):
        # chi(A) = chi(A cap {<=h}) + chi(A cap {>=h}) - chi(A cap {=h})
        # realized by clipping with v and -v at matched heights
        rng = np.random.default_rng(3)
        for _ in range(10):
            f = random_field(rng, 2, n_points=9, n_top=5)
            v = rng.normal(size=2)
            v /= np.linalg.norm(v)
            h = float(rng.uniform(-0.5, 0.5))
            lo = halfspace_clip(f, v, h)
            hi = halfspace_clip(f, -v, -h)
            heights = f.points @ v
            # the {x.v = h} slice via level_restrict on the height function
            g = lt.PLField(2, f.points, _unit_rescale(heights, h), f.simplices)
            mid = level_restrict(g, 0.5)
            assert (
                euler_characteristic(lo) + euler_characteristic(hi) - euler_characteristic(mid)
                == euler_characteristic(f)
            )


def _unit_rescale(heights, h):
    """Affine map sending height h to 0.5 and the data into (0, 1)."""
    span = max(np.abs(heights - h).max(), 1e-9)
    return 0.5 + (heights - h) / (4.0 * span)


class TestBarycentricInvariance:
    def test_chi_invariant_under_subdivision(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            f = random_field(rng, 2, n_points=8, n_top=5)
            pts, cells = barycentric_subdivision(f.points, f.simplices)
            assert euler_characteristic(cells) == euler_characteristic(f)

    def test_subdivided_curve_matches(self):
        # the Euler curve of the subdivision equals the original's
        from liftect.transforms import ect_curve

        rng = np.random.default_rng(13)
        f = random_field(rng, 2, n_points=8, n_top=5)
        pts, cells = barycentric_subdivision(f.points, f.simplices)
        sub = BareComplex(pts, cells)
        v = np.array([0.6, 0.8])
        hs = np.linspace(-2, 2, 41)
        assert np.array_equal(ect_curve(f, v).sample(hs), ect_curve(sub, v).sample(hs))

    def test_triangle_subdivision_counts(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        cells = closure_of([(0, 1, 2)])
        _, sub = barycentric_subdivision(pts, cells)
        by_dim = {}
        for c in sub:
            by_dim[len(c)] = by_dim.get(len(c), 0) + 1
        assert by_dim == {1: 7, 2: 12, 3: 6}
