"""Command-line surface: reproducible batch runs over the library.

Exit codes: 0 success, 2 input error, 3 internal invariant failure. Every
run writes a manifest JSON recording parameters, seed and axes so it can be
replayed bit-identically. LIFTECT_OUTDIR and LIFTECT_THREADS override the
output directory and worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import align_2d, marginal_curves, select_distance
from .field_core import (
    FormatError,
    PLField,
    TransformGrid,
    VoxelGrid,
    default_heights,
    default_thresholds,
    load_field,
    make_directions,
    normalize_field,
    rescale_geometry,
    voxel_to_pl,
    write_field,
)
from .generators import gen_field_suite
from .moduli import ModuliParams, delta_bound, verify_class
from .stats import (
    DistanceMatrix,
    auc,
    classical_mds,
    cut_dendrogram,
    delong_ci,
    hierarchical_cluster,
    median_bandwidth,
    split_train_test,
    svm_decision,
    svm_train,
)
from .transforms import ScanRequest, euler_scan, lect_transform, select_transform

# thresholds of the MRI protocol, already normalized by the stated maximum
MRI_THRESHOLDS = tuple(t / 9061.0 for t in (5, 10, 100, 200, 400, 800, 1600, 3200, 6400))

PRESETS = {
    "sim3d": {"dim": 3, "n_dirs": 362, "n_heights": 100, "thresholds": 30},
    "mri": {"dim": 3, "n_dirs": 362, "n_heights": 100, "thresholds": MRI_THRESHOLDS},
}


def _outdir(args):
    out = os.environ.get("LIFTECT_OUTDIR", getattr(args, "outdir", ".") or ".")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _threads(args):
    env = os.environ.get("LIFTECT_THREADS")
    if env:
        return max(1, int(env))
    t = getattr(args, "threads", None)
    return max(1, t if t else (os.cpu_count() or 1))


def _manifest(outdir, name, payload):
    payload = {"version": __version__, **payload}
    with open(outdir / f"{name}.manifest.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)


def _as_field(obj, normalize="per_field", scale=None, offset=None):
    if isinstance(obj, VoxelGrid):
        obj = voxel_to_pl(obj)
    if normalize == "none":
        return obj
    if normalize == "global":
        return normalize_field(obj, "global", scale=scale, offset=offset)
    return normalize_field(obj, "per_field")


def _thresholds_from(args):
    if getattr(args, "preset", None):
        spec = PRESETS[args.preset]["thresholds"]
        return np.array(spec) if not isinstance(spec, int) else default_thresholds(spec)
    if args.threshold_list:
        return np.array([float(x) for x in args.threshold_list.split(",")])
    return default_thresholds(args.thresholds)


def _scan_request(field, args):
    preset = PRESETS.get(getattr(args, "preset", None) or "", None)
    dim = preset["dim"] if preset else field.dim
    n_dirs = preset["n_dirs"] if preset else args.dirs
    n_heights = preset["n_heights"] if preset else args.heights
    directions = make_directions(dim, n_dirs)
    heights = default_heights(field, directions, n_heights)
    return ScanRequest(directions, heights, _thresholds_from(args), args.kind)


def _transform_one(task):
    path, out, args_dict = task
    ns = argparse.Namespace(**args_dict)
    obj = load_field(path)
    field = _as_field(obj, ns.normalize, ns.scale, ns.offset)
    if ns.rescale_geometry:
        field = rescale_geometry(field)
    req = _scan_request(field, ns)
    grid = select_transform(field, req) if ns.kind == "SELECT" else lect_transform(field, req)
    grid.save(out)
    if ns.csv:
        grid.to_csv(str(out) + ".csv")
    return str(out)


def cmd_ingest(args):
    obj = load_field(args.input)
    outdir = _outdir(args)
    out = outdir / (Path(args.input).stem + ".canonical.txt")
    if args.to_pl and isinstance(obj, VoxelGrid):
        obj = voxel_to_pl(obj)
    write_field(obj, out)
    kind = type(obj).__name__
    print(f"{kind}: wrote {out}")
    _manifest(outdir, out.stem, {"command": "ingest", "input": args.input})
    return 0


def cmd_transform(args):
    outdir = _outdir(args)
    args_dict = vars(args).copy()
    args_dict.pop("func", None)
    if args.normalize == "global" and args.scale is None:
        # shared affine constants from the whole batch: values map to [0, 1]
        los, his = zip(*((float(load_field(p).values.min()),
                          float(load_field(p).values.max())) for p in args.inputs))
        lo, hi = min(los), max(his)
        if hi <= lo:
            raise ValueError("global normalization needs non-constant values")
        args_dict["offset"] = lo
        args_dict["scale"] = hi - lo
    tasks = []
    for path in args.inputs:
        out = outdir / (Path(path).stem + f".{args.kind.lower()}.txt")
        tasks.append((path, str(out), args_dict))
    threads = _threads(args)
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outs = list(pool.map(_transform_one, tasks))
    else:
        outs = [_transform_one(t) for t in tasks]
    for o in outs:
        print(f"wrote {o}")
    _manifest(outdir, "transform", {
        "command": "transform", "inputs": list(args.inputs), "kind": args.kind,
        "preset": args.preset, "dirs": args.dirs, "heights": args.heights,
        "thresholds": args.thresholds, "threshold_list": args.threshold_list,
        "normalize": args.normalize, "threads": threads,
    })
    return 0


def cmd_dist(args):
    grids = [TransformGrid.load(p) for p in args.inputs]
    ids = [Path(p).stem for p in args.inputs]
    n = len(grids)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = select_distance(grids[i], grids[j], args.p)
    outdir = _outdir(args)
    out = outdir / "distances.csv"
    DistanceMatrix(ids, d).to_csv(out)
    print(f"wrote {out}")
    _manifest(outdir, "dist", {"command": "dist", "inputs": list(args.inputs), "p": args.p})
    return 0


def cmd_marginal(args):
    grid = TransformGrid.load(args.input)
    curves = marginal_curves(grid)
    outdir = _outdir(args)
    out = outdir / (Path(args.input).stem + ".marginal.csv")
    with open(out, "w") as fh:
        fh.write("direction_index," + ",".join(repr(float(h)) for h in curves.heights) + "\n")
        for i, row in enumerate(curves.values):
            fh.write(f"{i}," + ",".join(repr(float(x)) for x in row) + "\n")
    print(f"wrote {out}")
    _manifest(outdir, "marginal", {"command": "marginal", "input": args.input})
    return 0


def cmd_align2d(args):
    a = TransformGrid.load(args.input_a)
    b = TransformGrid.load(args.input_b)
    shift, dist, profile = align_2d(a, b, args.p)
    outdir = _outdir(args)
    out = outdir / "alignment.json"
    with open(out, "w") as fh:
        json.dump({"shift": shift, "distance": dist,
                   "n_directions": len(a.directions)}, fh, indent=2)
    prof = outdir / "alignment_profile.csv"
    with open(prof, "w") as fh:
        fh.write("shift,distance\n")
        for j, d in enumerate(profile):
            fh.write(f"{j},{float(d)!r}\n")
    print(f"shift {shift} distance {dist}")
    _manifest(outdir, "align2d", {"command": "align2d", "inputs": [args.input_a, args.input_b],
                                  "p": args.p})
    return 0


def cmd_simulate(args):
    outdir = _outdir(args)
    suite = gen_field_suite(args.n_per_family, args.setup, args.seed)
    rows = []
    for i, (grid, family, spec) in enumerate(suite):
        name = f"field_{i:03d}_fam{family}.vox.txt"
        write_field(grid, outdir / name)
        rows.append((name, family, spec.alpha, spec.beta, spec.gamma, spec.delta,
                     spec.noise_sd, spec.seed))
    with open(outdir / "simulation_manifest.csv", "w") as fh:
        fh.write("file,family,alpha,beta,gamma,delta,noise_sd,noise_seed\n")
        for r in rows:
            fh.write(",".join(repr(x) if isinstance(x, float) else str(x) for x in r) + "\n")
    print(f"wrote {len(rows)} fields to {outdir}")
    _manifest(outdir, "simulate", {"command": "simulate", "setup": args.setup,
                                   "seed": args.seed, "n_per_family": args.n_per_family})
    return 0


def cmd_cluster(args):
    dm = DistanceMatrix.from_csv(args.distances)
    coords = classical_mds(dm, k=2)
    merges = hierarchical_cluster(dm, args.linkage)
    outdir = _outdir(args)
    with open(outdir / "mds.csv", "w") as fh:
        fh.write("id,x,y\n")
        for i, c in zip(dm.ids, coords):
            fh.write(f"{i},{float(c[0])!r},{float(c[1])!r}\n")
    with open(outdir / "dendrogram.csv", "w") as fh:
        fh.write("cluster_a,cluster_b,distance,size\n")
        for a, b, d, s in merges:
            fh.write(f"{a},{b},{float(d)!r},{s}\n")
    print(f"wrote {outdir / 'mds.csv'} and {outdir / 'dendrogram.csv'}")
    _manifest(outdir, "cluster", {"command": "cluster", "distances": args.distances,
                                  "linkage": args.linkage})
    return 0


def cmd_classify(args):
    dm = DistanceMatrix.from_csv(args.distances)
    labels = {}
    with open(args.labels) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("id,"):
                continue
            key, val = line.split(",")
            labels[key] = int(val)
    y = np.array([labels[i] for i in dm.ids])
    train_ids, test_ids = split_train_test(dm.ids, y, 0.5, args.seed)
    tr = [dm.ids.index(i) for i in train_ids]
    te = [dm.ids.index(i) for i in test_ids]
    sub = DistanceMatrix([dm.ids[i] for i in tr], dm.d[np.ix_(tr, tr)])
    model = svm_train(sub, y[tr], C=args.C)
    scores = svm_decision(model, dm.d[np.ix_(te, tr)])
    a = auc(scores, y[te])
    lo, hi = delong_ci(scores, y[te])
    outdir = _outdir(args)
    out = outdir / "classify.json"
    with open(out, "w") as fh:
        json.dump({"auc": a, "ci": [lo, hi], "bandwidth": model.bandwidth,
                   "n_train": len(tr), "n_test": len(te), "seed": args.seed}, fh, indent=2)
    print(f"AUC {a:.4f} CI [{lo:.4f}, {hi:.4f}]")
    _manifest(outdir, "classify", {"command": "classify", "distances": args.distances,
                                   "labels": args.labels, "C": args.C, "seed": args.seed})
    return 0


def cmd_verify_class(args):
    obj = load_field(args.input)
    field = _as_field(obj)
    params = ModuliParams(field.dim, args.k, args.delta_k, args.delta_b, args.delta)
    directions = make_directions(field.dim, args.dirs)
    thresholds = default_thresholds(args.thresholds)
    report = verify_class(field, params, directions, thresholds, seed=args.seed)
    outdir = _outdir(args)
    out = outdir / "class_report.json"
    with open(out, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, default=str)
    print(f"overall: {report.overall}")
    _manifest(outdir, "verify_class", {"command": "verify-class", "input": args.input,
                                       "k": args.k, "delta_k": args.delta_k,
                                       "delta_b": args.delta_b, "delta": args.delta,
                                       "seed": args.seed})
    return 0


def cmd_bound(args):
    params = ModuliParams(args.d, args.k, args.delta_k, args.delta_b, args.delta)
    leading, level_factor, note = delta_bound(params)
    payload = {"leading_term": leading, "level_factor": level_factor, "note": note}
    print(json.dumps(payload, indent=2))
    outdir = _outdir(args)
    with open(outdir / "bound.json", "w") as fh:
        json.dump(payload, fh, indent=2)
    return 0


def cmd_euler_curve(args):
    obj = load_field(args.input)
    field = _as_field(obj)
    directions = make_directions(field.dim, max(args.direction_index + 1, 4))
    v = directions.directions[args.direction_index]
    curve = euler_scan(field, v, args.threshold)
    outdir = _outdir(args)
    out = outdir / (Path(args.input).stem + ".curve.csv")
    with open(out, "w") as fh:
        fh.write("height,value\n")
        for h, val in curve.jumps:
            fh.write(f"{float(h)!r},{int(val)}\n")
    print(f"wrote {out} ({len(curve.jumps)} jumps)")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="liftect", description=__doc__)
    p.add_argument("--outdir", default=".", help="output directory (env LIFTECT_OUTDIR overrides)")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ingest", help="parse and canonicalize a field file")
    sp.add_argument("input")
    sp.add_argument("--to-pl", action="store_true", help="convert voxel input to a PL field")
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("transform", help="compute SELECT/LECT grids")
    sp.add_argument("inputs", nargs="+")
    sp.add_argument("--kind", choices=["SELECT", "LECT"], default="SELECT")
    sp.add_argument("--preset", choices=sorted(PRESETS))
    sp.add_argument("--dirs", type=int, default=64)
    sp.add_argument("--heights", type=int, default=50)
    sp.add_argument("--thresholds", type=int, default=30)
    sp.add_argument("--threshold-list", help="comma-separated explicit thresholds")
    sp.add_argument("--normalize", choices=["per_field", "global", "none"], default="per_field")
    sp.add_argument("--scale", type=float)
    sp.add_argument("--offset", type=float)
    sp.add_argument("--rescale-geometry", action="store_true")
    sp.add_argument("--csv", action="store_true", help="also export CSV")
    sp.add_argument("--threads", type=int)
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("dist", help="pairwise distances between transform files")
    sp.add_argument("inputs", nargs="+")
    sp.add_argument("-p", type=float, default=2.0)
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("marginal", help="marginal curves of a SELECT grid")
    sp.add_argument("input")
    sp.set_defaults(func=cmd_marginal)

    sp = sub.add_parser("align2d", help="cyclic alignment of two 2D grids")
    sp.add_argument("input_a")
    sp.add_argument("input_b")
    sp.add_argument("-p", type=float, default=2.0)
    sp.set_defaults(func=cmd_align2d)

    sp = sub.add_parser("simulate", help="generate the simulated field suite")
    sp.add_argument("--setup", type=int, choices=[1, 2], default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n-per-family", type=int, default=10)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("cluster", help="MDS coordinates and dendrogram from a distance CSV")
    sp.add_argument("distances")
    sp.add_argument("--linkage", choices=["average", "single", "complete"], default="average")
    sp.set_defaults(func=cmd_cluster)

    sp = sub.add_parser("classify", help="SVM + AUC from a distance CSV and labels CSV")
    sp.add_argument("distances")
    sp.add_argument("labels")
    sp.add_argument("-C", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("verify-class", help="moduli class membership report")
    sp.add_argument("input")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--delta-k", type=float, required=True)
    sp.add_argument("--delta-b", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--dirs", type=int, default=16)
    sp.add_argument("--thresholds", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify_class)

    sp = sub.add_parser("bound", help="scan-count bound leading term")
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--delta-b", type=float, required=True)
    sp.add_argument("--delta-k", type=float, default=0.1)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("euler-curve", help="one exact SELECT curve")
    sp.add_argument("input")
    sp.add_argument("--direction-index", type=int, default=0)
    sp.add_argument("--threshold", type=float, default=0.5)
    sp.set_defaults(func=cmd_euler_curve)

    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, FileNotFoundError, ValueError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal invariant failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
