"""Command line interface: scenario runner, tiler, Wulff builder, auditor.

Exit code is 0 iff every declared tolerance of the invoked command passed.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import exports, multigrid, qc, scenarios, wulff


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="wulffgrid",
        description="lattice/quasicrystal surface energies, multigrid "
                    "tilings and Wulff shapes")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario document")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--out", required=True)

    p_tile = sub.add_parser("tile", help="render a multigrid tiling")
    p_tile.add_argument("--spec", required=True,
                        help="spec JSON path, 'pentagrid' or 'square-bigrid'")
    p_tile.add_argument("--radius", type=float, required=True)
    p_tile.add_argument("--svg", required=True)
    p_tile.add_argument("--records", help="line-delimited {J,k,...} output")
    p_tile.add_argument("--seed", type=int, default=11)

    p_wulff = sub.add_parser("wulff", help="build Wulff shapes")
    p_wulff.add_argument("--potential", required=True,
                         help="potential JSON path or 'fcc-minus-axes:C'")
    p_wulff.add_argument("--scan", help="family:lo:hi:step parameter scan")
    p_wulff.add_argument("--off", help="OFF output path (d=3)")
    p_wulff.add_argument("--svg", help="SVG output path (d=2)")
    p_wulff.add_argument("--csv", help="scan/classification CSV path")

    p_audit = sub.add_parser("audit", help="numerical audits of a spec")
    p_audit.add_argument("--spec", required=True)
    p_audit.add_argument("--checks", default="densities,bd,tiling,cauchy-binet")
    p_audit.add_argument("--radius", type=float, default=60.0)
    p_audit.add_argument("--samples", type=int, default=2000)
    p_audit.add_argument("--seed", type=int, default=11)
    p_audit.add_argument("--out")

    args = parser.parse_args(argv)
    return _DISPATCH[args.command](args)


def _cmd_run(args):
    scenario = scenarios.Scenario.load(args.scenario)
    summary = scenarios.run(scenario, args.out)
    for name, value, bound, passed in summary.checks:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: value={value} "
              f"bound={bound}")
    print(f"scenario {summary.scenario}: {'ok' if summary.ok else 'FAILED'}")
    return 0 if summary.ok else 1


def _cmd_tile(args):
    spec = scenarios.resolve_spec(args.spec, seed=args.seed)
    multigrid.validate_spec(spec)
    dps = multigrid.dual_points_in_region(
        spec, multigrid.Ball(np.zeros(spec.dim), args.radius))
    exports.write_tiling_svg(args.svg, spec, dps)
    if args.records:
        with open(args.records, "w") as fh:
            fh.write(multigrid.tiling_records(spec, dps))
    print(f"{dps.count} tiles -> {args.svg}")
    return 0


def _cmd_wulff(args):
    rc = 0
    if args.scan:
        family, lo, hi, step = args.scan.split(":")
        cs = np.arange(float(lo), float(hi) + 1e-12, float(step))
        result = wulff.parameter_scan(scenarios._family_by_name(family), cs)
        rows = [(r.c, r.n_vertices, r.n_facets, r.zonotope,
                 r.positivity_min, r.label) for r in result.rows]
        if args.csv:
            exports.write_csv(args.csv, ["c", "n_vertices", "n_facets",
                                         "zonotope", "positivity_min",
                                         "label"], rows)
        for r in result.rows:
            print(f"c={r.c:.4f} {r.label} positivity_min={r.positivity_min:.6f}")
        print("intervals:", {k: v for k, v in result.intervals.items()})
        return rc
    pot = scenarios.resolve_potential(args.potential)
    shape = wulff.signed_wulff(pot)
    if shape.empty or shape.degenerate:
        print("degenerate Wulff shape (phi not positive)")
        return 0
    cls = wulff.classify_shape(shape)
    print(f"{cls.label}: V={cls.n_vertices} E={cls.n_edges} F={cls.n_facets} "
          f"zonotope={cls.zonotope}")
    if args.off:
        with open(args.off, "w") as fh:
            fh.write(exports.polytope_to_off(shape.body))
    if args.svg:
        exports.write_polytope_svg(args.svg, shape.body)
    if args.csv:
        exports.write_csv(args.csv,
                          ["n_vertices", "n_edges", "n_facets", "zonotope",
                           "label"],
                          [(cls.n_vertices, cls.n_edges, cls.n_facets,
                            cls.zonotope, cls.label)])
    return rc


def _cmd_audit(args):
    spec = scenarios.resolve_spec(args.spec, seed=args.seed)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    results = []
    if "cauchy-binet" in checks:
        rep = multigrid.validate_spec(spec)
        dev = abs(rep.det_gram - rep.subset_sum)
        results.append(("cauchy-binet", dev,
                        1e-9 * max(1.0, abs(rep.det_gram)),
                        dev <= 1e-9 * max(1.0, abs(rep.det_gram))))
    if "bd" in checks:
        amap, bound = multigrid.affine_map_and_bound(spec)
        dps = multigrid.dual_points_in_region(
            spec, multigrid.Ball(np.zeros(spec.dim), args.radius))
        worst = 0.0
        for j, (anchors, centers) in multigrid.tile_arrays(spec, dps).items():
            dev = np.linalg.norm(centers - amap(dps.groups[j]["x"]),
                                 axis=1)
            if len(dev):
                worst = max(worst, float(dev.max()))
        results.append(("bounded-distortion", worst, bound, worst <= bound))
    if "densities" in checks:
        audit = qc.density_audit(spec, args.radius)
        results.append(("rho-sum", abs(audit.rho_sum - 1.0), 1e-12,
                        abs(audit.rho_sum - 1.0) <= 1e-12))
        results.append(("density-fractions", audit.max_fraction_dev, 0.02,
                        audit.max_fraction_dev <= 0.02))
    if "tiling" in checks:
        rep = multigrid.verify_tiling(
            spec, multigrid.Ball(np.zeros(spec.dim), min(args.radius, 30.0)),
            n_samples=args.samples, seed=args.seed)
        results.append(("tiling", rep.n_samples, rep.n_samples, rep.ok))
    ok = all(r[3] for r in results)
    for name, value, bound, passed in results:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: value={value} "
              f"bound={bound}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "audit.json"), "w") as fh:
            json.dump([{"name": n, "value": float(v), "bound": float(b),
                        "passed": bool(p)} for n, v, b, p in results],
                      fh, indent=2, sort_keys=True)
    return 0 if ok else 1


_DISPATCH = {
    "run": _cmd_run,
    "tile": _cmd_tile,
    "wulff": _cmd_wulff,
    "audit": _cmd_audit,
}


if __name__ == "__main__":
    sys.exit(main())
