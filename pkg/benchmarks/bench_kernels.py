#!/usr/bin/env python3
"""Compare the numba kernels with the pure-numpy fallback.

Each mode runs in its own interpreter, since SDFMCRT_DISABLE_NUMBA is read at
import time. The numba side is timed after a warm-up call, so compile time is
excluded. Both modes must produce the same numbers; the script checks that.

Run:
  python3 benchmarks/bench_kernels.py [--photons N] [--points N]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _timed(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def measure(n_points: int, n_photons: int, repeat: int) -> dict:
    from sdfmcrt._jit import NUMBA_ENABLED
    from sdfmcrt.recording import RecordGrid
    from sdfmcrt.sdf import evaluate_compiled, sphere_trace
    from sdfmcrt.transport import run_simulation
    from sdfmcrt.validation import isotropic_sphere_scene, vessel_network

    rng = np.random.default_rng(1)
    vessels = vessel_network()
    pts = rng.uniform(-0.05, 0.05, size=(n_points, 3))
    dirs = rng.normal(size=(max(n_points // 100, 10), 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    segs = rng.uniform(-1, 1, size=(n_points // 10, 6))

    def sdf_eval():
        return evaluate_compiled(vessels, pts)

    def trace():
        return np.array([sphere_trace(vessels, (0.0, 0.0, 0.1), d, delta=1e-6, max_dist=1.0).t for d in dirs])

    def deposit():
        g = RecordGrid((50, 50, 50), (-1, -1, -1), (1, 1, 1))
        for s in segs:
            g.deposit_segment(s[:3], s[3:], 1.0)
        return g.path

    scene = isotropic_sphere_scene(5.0, n_photons=n_photons)

    def transport():
        res = run_simulation(scene, n_photons=n_photons, seed=7, workers=1)
        return res.tally

    cases = {
        "sdf_eval": (sdf_eval, n_points),
        "sphere_trace": (trace, len(dirs)),
        "deposit_segment": (deposit, len(segs)),
        "transport": (transport, n_photons),
    }
    out = {"numba": NUMBA_ENABLED, "cases": {}}
    for name, (fn, items) in cases.items():
        if NUMBA_ENABLED:
            fn()  # compile or load from cache
        sec, val = _timed(fn, repeat)
        out["cases"][name] = {"seconds": sec, "items": items,
                              "checksum": float(np.sum(val)), "checksum_sq": float(np.sum(np.square(val)))}
    return out


def run_child(disable: bool, args) -> dict:
    env = dict(os.environ)
    env["SDFMCRT_DISABLE_NUMBA"] = "1" if disable else "0"
    cmd = [sys.executable, __file__, "--child", "--points", str(args.points),
           "--photons", str(args.photons), "--repeat", str(args.repeat)]
    proc = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20_000)
    ap.add_argument("--photons", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.child:
        print(json.dumps(measure(args.points, args.photons, args.repeat)))
        return 0

    fast = run_child(False, args)
    slow = run_child(True, args)
    print(f"{'case':<16} {'items':>8} {'numba':>12} {'fallback':>12} {'speedup':>9}  same")
    same_all = True
    for name, f in fast["cases"].items():
        s = slow["cases"][name]
        same = f["checksum"] == s["checksum"] and f["checksum_sq"] == s["checksum_sq"]
        same_all &= same
        print(f"{name:<16} {f['items']:>8} {f['seconds'] * 1e3:>10.2f}ms {s['seconds'] * 1e3:>10.2f}ms "
              f"{s['seconds'] / f['seconds']:>8.1f}x  {'yes' if same else 'NO'}")
    return 0 if same_all else 1


if __name__ == "__main__":
    sys.exit(main())
