import numpy as np
import pytest

import liftect as lt
from liftect.field_core import FormatError, rescale_geometry
from liftect.complex_ops import euler_characteristic


def tiny_field():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    vals = np.array([0.2, 0.8, 1.0])
    simp = ((0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2))
    return lt.PLField(2, pts, vals, simp)


class TestPLField:
    def test_rejects_unclosed_complex(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        vals = np.zeros(3)
        with pytest.raises(ValueError, match="not closed"):
            lt.PLField(2, pts, vals, ((0,), (1,), (2,), (0, 1, 2)))

    def test_rejects_unsorted_or_repeated_vertices(self):
        pts = np.zeros((3, 2))
        with pytest.raises(ValueError, match="sorted"):
            lt.PLField(2, pts, np.zeros(3), ((0,), (1,), (1, 0)))
        with pytest.raises(ValueError, match="sorted"):
            lt.PLField(2, pts, np.zeros(3), ((0,), (0, 0)))

    def test_rejects_missing_vertex_reference(self):
        with pytest.raises(ValueError, match="missing vertex"):
            lt.PLField(2, np.zeros((2, 2)), np.zeros(2), ((0,), (5,)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            lt.PLField(2, np.array([[np.nan, 0.0]]), np.zeros(1), ((0,),))

    def test_edges_and_bbox(self):
        f = tiny_field()
        assert f.edges == [(0, 1), (0, 2), (1, 2)]
        lo, hi = f.bounding_box
        assert np.array_equal(lo, [0, 0]) and np.array_equal(hi, [1, 1])


class TestTextFormats:
    def test_mesh_round_trip(self, tmp_path):
        f = tiny_field()
        p = tmp_path / "f.txt"
        lt.write_field(f, p)
        g = lt.load_field(p)
        assert isinstance(g, lt.PLField)
        assert np.array_equal(f.points, g.points)
        assert np.array_equal(f.values, g.values)
        assert f.simplices == g.simplices

    def test_voxel_round_trip(self, tmp_path):
        g = lt.VoxelGrid((2, 3, 2), (0.0, 0.0, 0.0), (1.0, 0.5, 2.0), np.arange(12.0))
        p = tmp_path / "g.txt"
        lt.write_field(g, p)
        h = lt.load_field(p)
        assert isinstance(h, lt.VoxelGrid)
        assert h.dims == (2, 3, 2)
        assert np.array_equal(h.values, g.values)
        assert np.array_equal(h.spacing, g.spacing)

    def test_comments_and_blank_lines_ignored(self, tmp_path):
        p = tmp_path / "f.txt"
        p.write_text(
            "# a comment\nPLFIELD 2\n\n3 3  # counts\n"
            "0 0 0.5\n1 0 0.25\n0 1 1.0\n0 0\n0 1\n0 2\n"
        )
        f = lt.load_field(p)
        assert f.n_vertices == 3 and len(f.simplices) == 3

    def test_bad_magic_reports_line(self, tmp_path):
        p = tmp_path / "f.txt"
        p.write_text("# leading comment\nWHAT 2\n")
        with pytest.raises(FormatError, match="line 2"):
            lt.load_field(p)

    def test_bad_vertex_line_reports_line(self, tmp_path):
        p = tmp_path / "f.txt"
        p.write_text("PLFIELD 2\n1 1\n0 0\n0 0\n")  # vertex line missing the value
        with pytest.raises(FormatError, match="line 3"):
            lt.load_field(p)

    def test_simplex_arity_mismatch(self, tmp_path):
        p = tmp_path / "f.txt"
        p.write_text("PLFIELD 2\n2 1\n0 0 0\n1 0 0\n1 0\n")  # says edge, lists 1 vertex
        with pytest.raises(FormatError):
            lt.load_field(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "f.txt"
        p.write_text("# nothing\n")
        with pytest.raises(FormatError, match="empty"):
            lt.load_field(p)


class TestVoxelToPL:
    def test_single_cube_counts(self):
        # one cube -> 8 vertices, 19 edges, 18 triangles, 6 tetrahedra, chi 1
        g = lt.VoxelGrid((2, 2, 2), (0, 0, 0), (1, 1, 1), np.arange(8.0))
        f = lt.voxel_to_pl(g)
        by_dim = {}
        for s in f.simplices:
            by_dim[len(s)] = by_dim.get(len(s), 0) + 1
        assert by_dim == {1: 8, 2: 19, 3: 18, 4: 6}
        assert euler_characteristic(f) == 1

    def test_grid_1000_vertices_4374_tets(self):
        vals = np.zeros(1000)
        g = lt.VoxelGrid((10, 10, 10), (-1, -1, -1), (2 / 9, 2 / 9, 2 / 9), vals)
        f = lt.voxel_to_pl(g)
        assert f.n_vertices == 1000
        assert sum(1 for s in f.simplices if len(s) == 4) == 9 * 9 * 9 * 6
        assert euler_characteristic(f) == 1  # solid box

    def test_values_follow_x_fastest_layout(self):
        vals = np.arange(8.0)
        g = lt.VoxelGrid((2, 2, 2), (0, 0, 0), (1, 1, 1), vals)
        f = lt.voxel_to_pl(g)
        # vertex at (i,j,k) must carry value i + 2j + 4k
        for idx, p in enumerate(f.points):
            i, j, k = (int(round(c)) for c in p)
            assert f.values[idx] == i + 2 * j + 4 * k

    def test_shared_faces_consistent(self):
        # adjacent cubes triangulate the shared square the same way: every
        # triangle has all its faces in the complex (already enforced by the
        # closure check) and no edge crosses the shared face diagonally twice
        g = lt.VoxelGrid((3, 2, 2), (0, 0, 0), (1, 1, 1), np.zeros(12))
        f = lt.voxel_to_pl(g)
        assert euler_characteristic(f) == 1

    def test_2d_grid_builder(self):
        vals = np.arange(6.0).reshape(3, 2)
        f = lt.pl_from_grid_2d(vals, origin=(0.0, 0.0), spacing=(1.0, 1.0))
        assert f.n_vertices == 6
        assert sum(1 for s in f.simplices if len(s) == 3) == 4
        assert euler_characteristic(f) == 1
        for idx, p in enumerate(f.points):
            i, j = (int(round(c)) for c in p)
            assert f.values[idx] == vals[i, j]


class TestNormalize:
    def test_per_field_maps_to_unit_interval(self):
        f = tiny_field()
        g = lt.normalize_field(f)
        assert g.values.min() == 0.0 and g.values.max() == 1.0
        assert not g.constant_warning

    def test_per_field_idempotent(self):
        f = lt.normalize_field(tiny_field())
        g = lt.normalize_field(f)
        assert np.array_equal(f.values, g.values)

    def test_constant_field_flagged(self):
        f = lt.PLField(2, np.zeros((2, 2)), np.full(2, 3.0), ((0,), (1,)))
        g = lt.normalize_field(f)
        assert g.constant_warning and np.all(g.values == 0.0)

    def test_global_mode(self):
        f = tiny_field()
        g = lt.normalize_field(f, "global", scale=2.0, offset=0.0)
        assert np.allclose(g.values, f.values / 2.0)
        with pytest.raises(ValueError):
            lt.normalize_field(f, "global")

    def test_rescale_geometry_bbox(self):
        f = lt.PLField(2, np.array([[2.0, 5.0], [6.0, 9.0]]), np.zeros(2), ((0,), (1,)))
        g = rescale_geometry(f)
        lo, hi = g.bounding_box
        assert np.allclose(lo, [-1, -1]) and np.allclose(hi, [1, 1])


class TestDirections:
    def test_circle_exact(self):
        ds = lt.make_directions(2, 4)
        assert ds.scheme == "uniform_circle"
        expect = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
        assert np.allclose(ds.directions, expect, atol=1e-15)

    def test_sphere_unit_and_deterministic(self):
        a = lt.make_directions(3, 362)
        b = lt.make_directions(3, 362)
        assert a.scheme == "fibonacci_sphere"
        assert np.array_equal(a.directions, b.directions)
        assert np.allclose(np.linalg.norm(a.directions, axis=1), 1.0, atol=1e-12)
        # reasonably spread: no two directions closer than ~1/sqrt(n)
        gram = a.directions @ a.directions.T
        np.fill_diagonal(gram, -1.0)
        assert gram.max() < 1.0 - 1e-4

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError, match="unit"):
            lt.DirectionSet(2, [[1.0, 1.0]])


class TestAxes:
    def test_default_heights_cover_support(self):
        f = tiny_field()
        ds = lt.make_directions(2, 8)
        hs = lt.default_heights(f, ds, 10)
        r = np.abs(f.points @ ds.directions.T).max()
        assert hs[0] < -r and hs[-1] > r and hs.size == 10

    def test_default_thresholds_in_unit_interval(self):
        ts = lt.default_thresholds(30)
        assert ts.size == 30 and ts[0] > 0 and ts[-1] == 1.0
        assert np.allclose(np.diff(ts), 1 / 30)


class TestEulerCurve:
    def test_from_deltas_drops_zero_net_events(self):
        c = lt.EulerCurve.from_deltas({0.0: 1, 1.0: 0, 2.0: -1})
        assert c.jumps == ((0.0, 1), (2.0, 0))

    def test_sample_right_continuous(self):
        c = lt.EulerCurve(((0.0, 1), (1.0, 3)))
        assert list(c.sample([-1.0, 0.0, 0.5, 1.0, 2.0])) == [0, 1, 1, 3, 3]
        assert c.value_at(0.0) == 1 and c.value_at(-0.1) == 0

    def test_rejects_non_increasing_heights(self):
        with pytest.raises(ValueError):
            lt.EulerCurve(((1.0, 1), (1.0, 2)))


class TestTransformGridIO:
    def test_save_load_round_trip(self, tmp_path):
        ds = lt.make_directions(2, 3)
        hs = np.array([-1.0, 0.0, 1.0])
        ts = np.array([0.5, 1.0])
        vals = np.arange(18, dtype=np.int64).reshape(3, 3, 2)
        g = lt.TransformGrid(ds, hs, ts, vals, "SELECT")
        p = tmp_path / "g.txt"
        g.save(p)
        h = lt.TransformGrid.load(p)
        assert h.kind == "SELECT" and h.directions.scheme == "uniform_circle"
        assert np.array_equal(h.values, vals)
        assert np.array_equal(h.heights, hs) and np.array_equal(h.thresholds, ts)
        assert np.array_equal(h.directions.directions, ds.directions)

    def test_rejects_float_values(self):
        ds = lt.make_directions(2, 1)
        with pytest.raises(ValueError, match="integer"):
            lt.TransformGrid(ds, [0.0], [1.0], np.zeros((1, 1, 1)), "SELECT")

    def test_csv_export(self, tmp_path):
        ds = lt.make_directions(2, 1)
        g = lt.TransformGrid(ds, [0.0, 1.0], [1.0], np.array([[[2], [3]]]), "ECT")
        p = tmp_path / "g.csv"
        g.to_csv(p)
        lines = p.read_text().strip().split("\n")
        assert lines[0] == "direction_index,height,threshold,value"
        assert len(lines) == 3 and lines[1].endswith(",2")
