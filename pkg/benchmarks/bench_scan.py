#!/usr/bin/env python3
"""Benchmark the grid-scan kernels: numba backend vs pure-numpy fallback.

Each backend runs in its own subprocess (the backend is chosen at import
time from LIFTECT_NUMBA), timing the same workloads:

  scan      Euler-curve scan of one clipped complex over a direction grid
  select    full SELECT transform of a quadric field (clip + batched scan)

Usage: python3 benchmarks/bench_scan.py [--dirs N] [--heights N]
       [--thresholds N] [--repeat N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def worker(ns):
    import numpy as np  # noqa: F401

    import liftect as lt
    from liftect import _kernels
    from liftect.complex_ops import superlevel_restrict
    from liftect.transforms import ScanRequest, select_transform

    field = lt.normalize_field(lt.voxel_to_pl(
        lt.gen_quadric(lt.QuadricSpec(1, 0.7, 0.8, 0.9))))
    dirs = lt.make_directions(3, ns.dirs)
    heights = lt.default_heights(field, dirs, ns.heights)
    thresholds = lt.default_thresholds(ns.thresholds)
    clipped = superlevel_restrict(field, float(thresholds[ns.thresholds // 3]))
    req = ScanRequest(dirs, heights, thresholds, "SELECT")

    # warm up (jit compilation on the numba backend)
    _kernels.scan_complex(clipped.points, clipped.simplices, dirs.directions, heights)
    select_transform(field, ScanRequest(dirs, heights, thresholds[:1], "SELECT"))

    def best_of(fn):
        times = []
        for _ in range(ns.repeat):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        return min(times)

    result = {
        "backend": _kernels.backend(),
        "n_cells": len(clipped.simplices),
        "scan": best_of(lambda: _kernels.scan_complex(
            clipped.points, clipped.simplices, dirs.directions, heights)),
        "select": best_of(lambda: select_transform(field, req)),
    }
    print(json.dumps(result))


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--dirs", type=int, default=362)
    parser.add_argument("--heights", type=int, default=100)
    parser.add_argument("--thresholds", type=int, default=30)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    ns = parser.parse_args()
    if ns.worker:
        worker(ns)
        return

    results = {}
    for flag, name in (("1", "numba"), ("0", "numpy")):
        env = dict(os.environ, LIFTECT_NUMBA=flag)
        cmd = [sys.executable, __file__, "--worker",
               "--dirs", str(ns.dirs), "--heights", str(ns.heights),
               "--thresholds", str(ns.thresholds), "--repeat", str(ns.repeat)]
        out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
        payload = json.loads(out.stdout.strip().splitlines()[-1])
        if payload["backend"] != name:
            print(f"note: requested {name} backend, got {payload['backend']}")
        results[name] = payload

    print(f"\nworkload: {ns.dirs} directions x {ns.heights} heights x "
          f"{ns.thresholds} thresholds, {results['numba']['n_cells']} cells "
          f"in the scanned complex (best of {ns.repeat})\n")
    print(f"{'task':<10}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for task in ("scan", "select"):
        tn, tp = results["numba"][task], results["numpy"][task]
        print(f"{task:<10}{tn:>11.3f}s{tp:>11.3f}s{tp / tn:>9.1f}x")


if __name__ == "__main__":
    main()
