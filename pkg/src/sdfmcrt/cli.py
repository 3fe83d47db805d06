"""Command-line entry point.

    sdfmcrt run --config scene.yaml [--photons N] [--seed S] [--workers W] [--out DIR]
    sdfmcrt slice --grid fluence.grid --axis z --index 10 --out slice.csv
    sdfmcrt validate-config scene.yaml
    sdfmcrt validate scatter-count [--photons N] [--tau 0.1 1 5 10]
    sdfmcrt validate jacques --wavelength 420 [--photons N] [--out profile.csv]

Failures print ``error[<category>]: <message>`` on stderr and exit nonzero.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import SdfMcrtError
from .scene_io import GRID_KINDS, extract_slice, load_scene, read_grid, write_grid, write_slice_csv

EXIT_OK = 0
EXIT_FAIL = 1       # a validation run finished but did not pass
EXIT_ERROR = 2      # bad input, I/O or runtime error
EXIT_USAGE = 64

log = logging.getLogger("sdfmcrt")


def _diag(category: str, msg) -> None:
    print(f"error[{category}]: {msg}", file=sys.stderr)


def cmd_run(args) -> int:
    from .transport import run_simulation

    scene = load_scene(args.config)
    scene = scene.with_run(n_photons=args.photons, seed=args.seed, workers=args.workers)
    t0 = time.perf_counter()
    res = run_simulation(scene, keep_packets=False)
    elapsed = time.perf_counter() - t0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for kind in GRID_KINDS:
        write_grid(res.grid, kind, out / f"{kind}.grid", n_photons=res.n_photons)
    summary = {
        "config": str(args.config),
        "n_photons": res.n_photons,
        "seed": scene.run.seed,
        "workers": res.workers,
        "wall_time_s": elapsed,
        "mean_scatters": res.mean_scatters,
        "energy_balance": res.energy_balance(),
        "tallies": res.tallies(),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"{res.n_photons} photons in {elapsed:.2f} s; grids written to {out}")
    print(f"absorbed {res.absorbed:.6g}  escaped {res.escaped:.6g}  "
          f"balance {res.energy_balance():.3g}")
    return EXIT_OK


def cmd_slice(args) -> int:
    grid = read_grid(args.grid)
    table = extract_slice(grid, args.axis, args.index)
    write_slice_csv(table, args.out)
    print(f"{args.axis}={args.index} slice of {grid.kind} grid {grid.dims} -> {args.out} "
          f"({table.shape[0]}x{table.shape[1]})")
    return EXIT_OK


def cmd_validate_config(args) -> int:
    scene = load_scene(args.path)
    print(f"{args.path}: ok ({len(scene.objects)} objects, {len(scene.materials)} materials, "
          f"grid {scene.grid_dims}, {type(scene.source).__name__})")
    return EXIT_OK


def cmd_scatter_count(args) -> int:
    from .validation import mean_scatter_experiment

    rows = mean_scatter_experiment(args.tau, args.photons, seed=args.seed, workers=args.workers)
    print(f"{'tau':>8} {'measured':>12} {'predicted':>12} {'std_err':>10} {'rel_err':>8}  result")
    ok = True
    for r in rows:
        good = r.within()
        ok &= good
        print(f"{r.tau:8.3g} {r.measured:12.6g} {r.predicted:12.6g} {r.std_error:10.3g} "
              f"{r.rel_error:8.2%}  {'PASS' if good else 'FAIL'}")
    if args.out:
        table = np.array([[r.tau, r.measured, r.predicted, r.std_error] for r in rows])
        np.savetxt(args.out, table, delimiter=",", fmt="%.17g",
                   header="tau,measured,predicted,std_error", comments="")
    print("scatter-count:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_jacques(args) -> int:
    from .validation import jacques_experiment

    rep = jacques_experiment(args.wavelength, n_photons=args.photons, seed=args.seed,
                             workers=args.workers, dims=tuple(args.dims),
                             free_delta=not args.fixed_delta)
    f = rep.fit.params
    print(f"wavelength {rep.wavelength} nm, {rep.n_photons} photons, {rep.wall_time:.1f} s")
    print(f"fit: C1={f.C1:.4g} k1={f.k1:.4g} C2={f.C2:.4g} k2={f.k2:.4g} delta={f.delta:.5g} cm "
          f"rms={rep.fit.rms:.3g} converged={rep.fit.converged}")
    print(f"delta: fitted {rep.fit.delta:.5g} vs analytic {rep.analytic_delta:.5g} "
          f"({rep.delta_rel_error:.2%}, tolerance {rep.tolerance:.0%}) "
          f"{'PASS' if rep.delta_ok else 'FAIL'}")
    print(f"surface {rep.surface_value:.5g}, peak {rep.peak_value:.5g} at {rep.peak_depth:.4g} cm "
          f"({'sub-surface peak' if rep.has_subsurface_peak else 'no sub-surface peak'})")
    if args.out:
        np.savetxt(args.out, rep.table(), delimiter=",", fmt="%.17g",
                   header="z,measured,model", comments="")
        print(f"profile written to {args.out}")
    print(f"jacques {rep.wavelength}:", "PASS" if rep.passed else "FAIL")
    return EXIT_OK if rep.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sdfmcrt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    p.add_argument("--bench", action="store_true",
                   help="print wall time and whether numba kernels are active (asserts nothing)")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate a scene document")
    r.add_argument("--config", required=True, type=Path)
    r.add_argument("--photons", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--workers", type=int)
    r.add_argument("--out", type=Path, default=Path("sdfmcrt_out"))
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("slice", help="write one plane of a grid file as CSV")
    s.add_argument("--grid", required=True, type=Path)
    s.add_argument("--axis", required=True, choices=("x", "y", "z"))
    s.add_argument("--index", required=True, type=int)
    s.add_argument("--out", required=True, type=Path)
    s.set_defaults(func=cmd_slice)

    c = sub.add_parser("validate-config", help="parse and check a scene document")
    c.add_argument("path", type=Path)
    c.set_defaults(func=cmd_validate_config)

    v = sub.add_parser("validate", help="reference experiments")
    vsub = v.add_subparsers(dest="experiment", required=True)
    sc = vsub.add_parser("scatter-count", help="mean scatterings vs tau^2/2 + tau")
    sc.add_argument("--tau", type=float, nargs="+", default=[0.1, 1.0, 5.0, 10.0])
    sc.add_argument("--photons", type=int, default=1_000_000)
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    sc.add_argument("--out", type=Path)
    sc.set_defaults(func=cmd_scatter_count)
    jq = vsub.add_parser("jacques", help="depth fluence of a uniformly lit slab")
    jq.add_argument("--wavelength", type=int, required=True, choices=(420, 630))
    jq.add_argument("--photons", type=int, default=1_000_000)
    jq.add_argument("--seed", type=int, default=0)
    jq.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    jq.add_argument("--dims", type=int, nargs=3, default=[100, 100, 200])
    jq.add_argument("--fixed-delta", action="store_true",
                    help="hold delta at the analytic value instead of fitting it")
    jq.add_argument("--out", type=Path, help="CSV of (z, measured, model)")
    jq.set_defaults(func=cmd_jacques)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except SdfMcrtError as e:
        _diag(e.category, e)
        return EXIT_ERROR
    except (OSError, ValueError) as e:
        _diag("io" if isinstance(e, OSError) else "validation", e)
        return EXIT_ERROR
    if args.bench:
        from ._jit import NUMBA_ENABLED
        print(f"bench: {args.command} took {time.perf_counter() - t0:.3f} s "
              f"(numba {'on' if NUMBA_ENABLED else 'off'})", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
