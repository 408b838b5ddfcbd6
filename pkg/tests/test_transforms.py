import numpy as np
import pytest

import liftect as lt
from liftect import _kernels
from liftect.complex_ops import euler_characteristic, superlevel_restrict
from liftect.transforms import ScanRequest, ect_curve, ect_transform, euler_scan
from conftest import BareComplex, brute_force_curve_values, closure_of, random_field


def two_bump_field():
    """1D-complex field embedded in the plane with two separated high spots."""
    pts = np.array([[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    simp = closure_of([(0, 1), (1, 2)])
    return lt.PLField(2, pts, np.array([0.9, 0.1, 0.9]), simp)


class TestEctCurve:
    def test_single_point(self):
        c = BareComplex(np.array([[0.3, 0.4]]), ((0,),))
        curve = ect_curve(c, np.array([1.0, 0.0]))
        assert curve.jumps == ((0.3, 1),)

    def test_segment_along_direction(self):
        c = BareComplex(np.array([[0.0, 0.0], [1.0, 0.0]]), closure_of([(0, 1)]))
        curve = ect_curve(c, np.array([1.0, 0.0]))
        # vertex enters at 0, second vertex and edge cancel at 1? no:
        # at h=1 both the vertex (+1) and the edge (-1) arrive: zero net
        assert curve.jumps == ((0.0, 1),)
        assert curve.final_value == 1

    def test_segment_perpendicular(self):
        c = BareComplex(np.array([[0.0, 0.0], [1.0, 0.0]]), closure_of([(0, 1)]))
        curve = ect_curve(c, np.array([0.0, 1.0]))
        # everything arrives at once: 2 vertices - 1 edge
        assert curve.jumps == ((0.0, 1),)

    def test_final_value_is_chi(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            f = random_field(rng, 2, n_points=10, n_top=6)
            v = rng.normal(size=2)
            v /= np.linalg.norm(v)
            assert ect_curve(f, v).final_value == euler_characteristic(f)

    def test_empty_complex(self):
        c = BareComplex(np.zeros((0, 2)), ())
        assert ect_curve(c, np.array([1.0, 0.0])).jumps == ()


class TestScanKernels:
    def test_numpy_backend_matches_exact_curve(self):
        rng = np.random.default_rng(9)
        f = random_field(rng, 3, n_points=10, n_top=6)
        ds = lt.make_directions(3, 20)
        hs = lt.default_heights(f, ds, 33)
        got = _kernels.scan_complex(f.points, f.simplices, ds.directions, hs)
        for i, v in enumerate(ds.directions):
            assert np.array_equal(got[i], ect_curve(f, v).sample(hs))

    def test_backends_agree(self):
        # compare the in-process backend against the forced-numpy twin
        import subprocess, sys, pickle, tempfile, os

        rng = np.random.default_rng(21)
        f = random_field(rng, 2, n_points=12, n_top=8)
        ds = lt.make_directions(2, 16)
        hs = lt.default_heights(f, ds, 25)
        here = _kernels.scan_complex(f.points, f.simplices, ds.directions, hs)
        with tempfile.TemporaryDirectory() as td:
            blob = os.path.join(td, "case.pkl")
            with open(blob, "wb") as fh:
                pickle.dump((f.points, f.simplices, ds.directions, hs, here), fh)
            code = (
                "import pickle, numpy as np\n"
                "from liftect import _kernels\n"
                f"pts, simp, dirs, hs, expect = pickle.load(open({blob!r}, 'rb'))\n"
                "assert _kernels.backend() == 'numpy'\n"
                "got = _kernels.scan_complex(pts, simp, dirs, hs)\n"
                "assert np.array_equal(got, expect)\n"
            )
            env = dict(os.environ, LIFTECT_NUMBA="0")
            subprocess.run([sys.executable, "-c", code], check=True, env=env)

    def test_events_past_grid_are_dropped(self):
        c = BareComplex(np.array([[0.0, 0.0], [5.0, 0.0]]), ((0,), (1,)))
        hs = np.array([-1.0, 0.0, 1.0])
        got = _kernels.scan_complex(c.points, c.simplices, np.array([[1.0, 0.0]]), hs)
        assert list(got[0]) == [0, 1, 1]  # the far vertex never lands


class TestScanRequest:
    def test_threshold_domain(self):
        ds = lt.make_directions(2, 4)
        with pytest.raises(ValueError, match=r"\(0, 1\]"):
            ScanRequest(ds, [0.0, 1.0], [0.0, 0.5], "SELECT")
        with pytest.raises(ValueError, match=r"\(0, 1\]"):
            ScanRequest(ds, [0.0, 1.0], [0.5, 1.5], "LECT")

    def test_kind_checked(self):
        ds = lt.make_directions(2, 4)
        with pytest.raises(ValueError, match="unknown scan kind"):
            ScanRequest(ds, [0.0], [1.0], "BANANA")
        req = ScanRequest(ds, [0.0], [1.0], "LECT")
        with pytest.raises(ValueError):
            lt.select_transform(two_bump_field(), req)


class TestSelectTransform:
    def test_matches_clip_then_scan(self):
        rng = np.random.default_rng(17)
        f = random_field(rng, 2, n_points=10, n_top=6)
        ds = lt.make_directions(2, 8)
        hs = lt.default_heights(f, ds, 21)
        ts = np.array([0.25, 0.5, 0.75])
        grid = lt.select_transform(f, ScanRequest(ds, hs, ts, "SELECT"))
        for k, t in enumerate(ts):
            clipped = superlevel_restrict(f, float(t))
            expect = ect_transform(clipped, ds, hs)
            assert np.array_equal(grid.values[:, :, k], expect)

    def test_two_bumps_select_counts_components(self):
        f = two_bump_field()
        ds = lt.DirectionSet(2, [[1.0, 0.0]])
        hs = np.array([-2.0, -0.5, 0.5, 2.0])
        ts = np.array([0.5])
        grid = lt.select_transform(f, ScanRequest(ds, hs, ts, "SELECT"))
        # first component spans [-1,-0.5]; the second's crossing point sits
        # exactly at x = 0.5 and enters the half-space at that height
        assert list(grid.values[0, :, 0]) == [0, 1, 2, 2]

    def test_monotone_threshold_shrinks_support(self):
        rng = np.random.default_rng(23)
        f = random_field(rng, 2)
        ds = lt.make_directions(2, 6)
        hs = lt.default_heights(f, ds, 15)
        ts = np.array([0.2, 0.8])
        grid = lt.select_transform(f, ScanRequest(ds, hs, ts, "SELECT"))
        # final column of the curve equals chi of the superlevel complex
        for k, t in enumerate(ts):
            chi = euler_characteristic(superlevel_restrict(f, float(t)))
            assert np.all(grid.values[:, -1, k] == chi)


class TestLectTransform:
    def test_level_set_of_two_bumps(self):
        f = two_bump_field()
        ds = lt.DirectionSet(2, [[1.0, 0.0]])
        hs = np.array([-2.0, -0.5, 0.5, 2.0])
        ts = np.array([0.5])
        grid = lt.lect_transform(f, ScanRequest(ds, hs, ts, "LECT"))
        # the 0.5-level set is two points, at x = -0.5 and x = 0.5
        assert list(grid.values[0, :, 0]) == [0, 1, 2, 2]

    def test_level_of_constant_region(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        f = lt.PLField(2, pts, np.array([0.5, 0.5, 0.5]), closure_of([(0, 1, 2)]))
        ds = lt.DirectionSet(2, [[1.0, 0.0]])
        hs = np.array([2.0])
        grid = lt.lect_transform(f, ScanRequest(ds, hs, np.array([0.5]), "LECT"))
        assert grid.values[0, 0, 0] == 1


class TestEulerScan:
    def test_is_one_select_curve(self):
        rng = np.random.default_rng(31)
        f = random_field(rng, 2)
        v = np.array([0.0, 1.0])
        t = 0.4
        curve = euler_scan(f, v, t)
        hs = np.linspace(-2, 2, 21)
        expect = brute_force_curve_values(superlevel_restrict(f, t), v, hs)
        assert np.array_equal(curve.sample(hs), expect)

    def test_threshold_domain(self):
        f = two_bump_field()
        with pytest.raises(ValueError):
            euler_scan(f, np.array([1.0, 0.0]), 0.0)


class TestOracleAgreement:
    def test_scan_equals_brute_force_small(self):
        rng = np.random.default_rng(41)
        for dim in (2, 3):
            f = random_field(rng, dim, n_points=9, n_top=5)
            ds = lt.make_directions(dim, 6)
            hs = lt.default_heights(f, ds, 12)
            got = _kernels.scan_complex(f.points, f.simplices, ds.directions, hs)
            for i, v in enumerate(ds.directions):
                assert np.array_equal(got[i], brute_force_curve_values(f, v, hs))
