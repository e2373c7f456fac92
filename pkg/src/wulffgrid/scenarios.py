"""Config-driven experiment scenarios tying the library together.

A scenario document is JSON with a version, a kind, a mandatory seed for
anything randomized, kind-specific inputs, and declared tolerances.  Running
a scenario writes delimited artifacts (CSV / SVG / OFF), a matplotlib figure
for the report kinds, and a summary JSON with one pass/fail entry per
declared tolerance.  Outputs are byte-stable for a fixed document.
"""

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from . import energy, exports, multigrid, qc, wulff
from .geom.polytope import convex_hull, polytope_measure

KINDS = ("crystal-converge", "qc-converge", "density-audit",
         "wulff-gallery", "pathology", "tile-render")


class ConfigError(Exception):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class Scenario:
    kind: str
    seed: int
    params: dict
    tolerances: dict
    name: str = "scenario"

    @classmethod
    def from_document(cls, doc, name="scenario"):
        if not isinstance(doc, dict):
            raise ConfigError("$", "scenario document must be an object")
        if doc.get("version") != 1:
            raise ConfigError("version", "missing or unsupported version")
        kind = doc.get("kind")
        if kind not in KINDS:
            raise ConfigError("kind", f"must be one of {KINDS}")
        if "seed" not in doc or not isinstance(doc["seed"], int):
            raise ConfigError("seed", "an integer seed is mandatory")
        params = {k: v for k, v in doc.items()
                  if k not in ("version", "kind", "seed", "tolerances")}
        tols = doc.get("tolerances", {})
        scenario = cls(kind, doc["seed"], params, tols, name)
        scenario._validate()
        return scenario

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            doc = json.load(fh)
        return cls.from_document(
            doc, os.path.splitext(os.path.basename(path))[0])

    def _validate(self):
        p = self.params
        if self.kind in ("crystal-converge", "qc-converge", "pathology"):
            ns = p.get("N")
            if not ns or list(ns) != sorted(set(int(n) for n in ns)):
                raise ConfigError("N", "need a strictly increasing list")
        if self.kind in ("density-audit", "tile-render"):
            if not isinstance(p.get("radius"), (int, float)):
                raise ConfigError("radius", "numeric radius required")


@dataclass
class Summary:
    scenario: str
    kind: str
    artifacts: list
    checks: list  # (name, value, bound, passed)

    @property
    def ok(self):
        return all(c[3] for c in self.checks)

    def to_json(self):
        return json.dumps({
            "scenario": self.scenario,
            "kind": self.kind,
            "artifacts": sorted(self.artifacts),
            "checks": [{"name": n, "value": v, "bound": b,
                        "passed": bool(okc)}
                       for n, v, b, okc in self.checks],
            "ok": self.ok,
        }, indent=2, sort_keys=True) + "\n"


def resolve_shape(value):
    """'unit-square', 'disk-512', or an explicit vertex list."""
    if value in (None, "unit-square"):
        return convex_hull([(0, 0), (1, 0), (1, 1), (0, 1)])
    if value == "disk-512":
        th = np.linspace(0, 2 * np.pi, 513)[:-1]
        r = math.sqrt(2.0 / (512 * math.sin(2 * math.pi / 512)))
        return convex_hull(np.c_[r * np.cos(th), r * np.sin(th)])
    if isinstance(value, dict) and "vertices" in value:
        return convex_hull(value["vertices"])
    raise ConfigError("shape", f"unknown shape {value!r}")


def resolve_potential(value):
    if value in (None, "nearest-neighbor"):
        return energy.Potential.nearest_neighbor(2)
    if isinstance(value, str) and value.startswith("fcc-minus-axes:"):
        return wulff.fcc_minus_axes(float(value.split(":")[1]))
    if isinstance(value, dict):
        return energy.Potential.from_config(value)
    raise ConfigError("potential", f"unknown potential {value!r}")


def resolve_spec(value, seed=11):
    if value in (None, "pentagrid"):
        return multigrid.pentagrid(seed=seed)
    if value == "square-bigrid":
        return multigrid.square_bigrid()
    if isinstance(value, dict):
        return multigrid.MultigridSpec.from_document(value)
    if isinstance(value, str) and os.path.exists(value):
        return multigrid.MultigridSpec.load(value)
    raise ConfigError("spec", f"unknown multigrid spec {value!r}")


def run(scenario: Scenario, outdir):
    """Execute a scenario; returns the Summary (also written to summary.json)."""
    os.makedirs(outdir, exist_ok=True)
    runner = _RUNNERS[scenario.kind]
    summary = runner(scenario, outdir)
    with open(os.path.join(outdir, "summary.json"), "w") as fh:
        fh.write(summary.to_json())
    return summary


def _fig_path(outdir, name):
    return os.path.join(outdir, name + ".png")


def _convergence_figure(outdir, name, ns, values, target, ylabel):
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.semilogx(ns, values, "o-", label="rescaled energy")
    ax.axhline(target, color="k", ls="--", lw=1, label="limit perimeter")
    ax.set_xlabel("N")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    path = _fig_path(outdir, name)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _run_crystal(sc: Scenario, outdir):
    pot = resolve_potential(sc.params.get("potential"))
    shape = resolve_shape(sc.params.get("shape"))
    ns = [int(n) for n in sc.params["N"]]
    d = shape.dim
    target = energy.perimeter_P_V(shape, pot)
    rows = []
    values = []
    for n in ns:
        res = energy.recovery_configuration(shape, n)
        f = energy.surface_energy(res.configuration, pot)
        resc = f / n ** ((d - 1) / d)
        rows.append((n, resc, target, abs(resc - target) / target))
        values.append(resc)
    csv = os.path.join(outdir, "convergence.csv")
    exports.write_csv(csv, ["N", "rescaled_energy", "target", "rel_err"],
                      rows)
    fig = _convergence_figure(outdir, "convergence", ns, values, target,
                              "N^{-(d-1)/d} F")
    checks = _convergence_checks(sc, rows)
    return Summary(sc.name, sc.kind, [csv, fig], checks)


def _convergence_checks(sc, rows):
    checks = []
    tol = sc.tolerances.get("max_rel_err")
    if tol is not None:
        worst = rows[-1][3]
        checks.append(("final_rel_err", worst, tol, worst <= tol))
    if sc.tolerances.get("shrinking_gaps") and len(rows) >= 3:
        gaps = [abs(rows[i + 1][1] - rows[i][1]) for i in range(len(rows) - 1)]
        ok = all(gaps[i + 1] <= gaps[i] + 1e-12 for i in range(len(gaps) - 1))
        checks.append(("shrinking_gaps", gaps[-1], gaps[0], ok))
    exact = sc.tolerances.get("exact_value")
    if exact is not None:
        worst = max(abs(r[1] - exact) for r in rows)
        checks.append(("exact_value", worst, 0.0, worst == 0.0))
    return checks


def _run_qc(sc: Scenario, outdir):
    spec = resolve_spec(sc.params.get("spec"), seed=sc.seed)
    shape = resolve_shape(sc.params.get("shape"))
    weight = sc.params.get("weights", 1.0)
    if isinstance(weight, (int, float)):
        w = qc.TileWeight.uniform(spec, weight)
    else:
        w = qc.TileWeight({tuple(json.loads(k)): v
                           for k, v in weight.items()})
    rail = qc.rail_weights(spec, w)
    target = qc.perimeter_P_W(shape, spec, rail)
    half_value = qc.perimeter_P_W(shape, spec, rail,
                                  pairing="positive_part")
    rho = qc.rho_X(spec)
    amap, _ = multigrid.affine_map_and_bound(spec)
    d = spec.dim
    ns = [int(n) for n in sc.params["N"]]
    rows, values = [], []
    for n in ns:
        res = qc.qc_recovery(shape, n, spec)
        e = qc.tile_energy(res.tiles, rail)
        resc = e["dual"] * (rho / n) ** ((d - 1) / d) \
            / amap.det ** ((d - 1) / d)
        rows.append((n, resc, target, abs(resc - target) / target))
        values.append(resc)
    csv = os.path.join(outdir, "convergence.csv")
    exports.write_csv(csv, ["N", "rescaled_energy", "target", "rel_err"],
                      rows)
    fig = _convergence_figure(outdir, "convergence", ns, values, target,
                              "rescaled tile energy")
    checks = _convergence_checks(sc, rows)
    checks.append(("positive_part_pairing_value", half_value, target, True))
    return Summary(sc.name, sc.kind, [csv, fig], checks)


def _run_density(sc: Scenario, outdir):
    spec = resolve_spec(sc.params.get("spec"), seed=sc.seed)
    radius = float(sc.params["radius"])
    audit = qc.density_audit(spec, radius)
    rows = [("-".join(map(str, j)), rho, frac, count, dev)
            for j, rho, frac, count, dev in sorted(audit.rows)]
    csv = os.path.join(outdir, "densities.csv")
    exports.write_csv(csv, ["J", "rho", "empirical_fraction", "count",
                            "cell_dev"], rows)
    labels = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 3.2))
    x = np.arange(len(rows))
    ax.bar(x - 0.2, [r[1] for r in rows], width=0.4, label="rho_J")
    ax.bar(x + 0.2, [r[2] for r in rows], width=0.4, label="empirical")
    ax.set_xticks(x, labels, rotation=60, fontsize=7)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    figp = _fig_path(outdir, "densities")
    fig.savefig(figp, dpi=150)
    plt.close(fig)
    checks = []
    tol = sc.tolerances.get("max_fraction_dev")
    if tol is not None:
        checks.append(("max_fraction_dev", audit.max_fraction_dev, tol,
                       audit.max_fraction_dev <= tol))
    rtol = sc.tolerances.get("rho_sum_tol")
    if rtol is not None:
        dev = abs(audit.rho_sum - 1.0)
        checks.append(("rho_sum", dev, rtol, dev <= rtol))
    return Summary(sc.name, sc.kind, [csv, figp], checks)


def _run_gallery(sc: Scenario, outdir):
    artifacts, checks = [], []
    rows = []
    for item in sc.params.get("items", []):
        name = item.get("name")
        if not name:
            raise ConfigError("items.name", "every gallery item needs a name")
        shape = _gallery_shape(item)
        pos = wulff.positivity_check(_gallery_phi(item))
        if shape.empty or shape.degenerate:
            rows.append((name, 0, 0, False, pos.min_value, "degenerate"))
            continue
        cls = wulff.classify_shape(shape)
        rows.append((name, cls.n_vertices, cls.n_facets, cls.zonotope,
                     pos.min_value, cls.label))
        if shape.body.dim == 3:
            path = os.path.join(outdir, f"{name}.off")
            with open(path, "w") as fh:
                fh.write(exports.polytope_to_off(shape.body))
        else:
            path = os.path.join(outdir, f"{name}.svg")
            exports.write_polytope_svg(path, shape.body)
        artifacts.append(path)
    csv = os.path.join(outdir, "gallery.csv")
    exports.write_csv(csv, ["name", "n_vertices", "n_facets", "zonotope",
                            "positivity_min", "label"], rows)
    artifacts.append(csv)
    scan_cfg = sc.params.get("scan")
    if scan_cfg:
        cs = np.arange(scan_cfg["lo"], scan_cfg["hi"] + 1e-12,
                       scan_cfg["step"])
        family = _family_by_name(scan_cfg["family"])
        claimed = tuple(scan_cfg.get("claimed", ())) or None
        result = wulff.parameter_scan(family, cs, claimed=claimed)
        scan_csv = os.path.join(outdir, "scan.csv")
        exports.write_csv(
            scan_csv,
            ["c", "n_vertices", "n_facets", "zonotope", "positivity_min",
             "label"],
            [(r.c, r.n_vertices, r.n_facets, r.zonotope, r.positivity_min,
              r.label) for r in result.rows])
        artifacts.append(scan_csv)
        fig, ax = plt.subplots(figsize=(5, 3.2))
        ax.plot([r.c for r in result.rows],
                [r.positivity_min for r in result.rows], "o-")
        ax.axhline(0, color="k", lw=1)
        ax.set_xlabel("c")
        ax.set_ylabel("min phi on sphere")
        fig.tight_layout()
        figp = _fig_path(outdir, "scan")
        fig.savefig(figp, dpi=150)
        plt.close(fig)
        artifacts.append(figp)
        want = scan_cfg.get("expect_label")
        if want:
            interval = result.intervals.get(want)
            checks.append((f"scan_has_{want}",
                           str(interval), "nonempty", interval is not None))
    return Summary(sc.name, sc.kind, artifacts, checks)


def _gallery_phi(item):
    if "family" in item:
        return wulff._coerce(_family_by_name(item["family"])(item["c"]))
    return wulff.SupportFunction.from_potential(
        resolve_potential(item["potential"]))


def _gallery_shape(item):
    return wulff.signed_wulff(_gallery_phi(item))


def _family_by_name(name):
    families = {
        "fcc-minus-axes": wulff.fcc_minus_axes,
        "pyritohedron": wulff.pyritohedron_family,
        "icosahedral": wulff.icosahedral_family,
    }
    if name not in families:
        raise ConfigError("family", f"unknown family {name!r}")
    return families[name]


def pathology_configuration(n, c=2.0):
    """Checkerboard square of ~n points from the signed pathology example.

    K is a square of side sqrt(2 n) with edges along (1, 1)/(1, -1); the
    configuration is K ∩ span_Z{(±1, ±1)} (the even checkerboard).
    """
    side = math.sqrt(2.0 * n)
    h = side / 2.0
    m = int(math.ceil(h * math.sqrt(2))) + 1
    xs = np.arange(-m, m + 1)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    pts = np.c_[gx.ravel(), gy.ravel()]
    even = (pts.sum(axis=1) % 2) == 0
    u = np.abs(pts @ np.array([1, 1]) / math.sqrt(2))
    v = np.abs(pts @ np.array([1, -1]) / math.sqrt(2))
    keep = even & (u <= h) & (v <= h)
    return energy.Configuration(pts[keep])


def pathology_potential(c=2.0):
    atoms = {(1, 1): c, (1, -1): c, (-1, 1): c, (-1, -1): c,
             (1, 0): -1.0, (-1, 0): -1.0, (0, 1): -1.0, (0, -1): -1.0}
    return energy.Potential(atoms, convention="signed", mode="abs")


def _run_pathology(sc: Scenario, outdir):
    c = float(sc.params.get("c", 2.0))
    pot = pathology_potential(c)
    phi_min = wulff.positivity_check(
        wulff.SupportFunction.from_potential(pot)).min_value
    rows, values = [], []
    for n in [int(n) for n in sc.params["N"]]:
        x = pathology_configuration(n, c)
        f = energy.surface_energy(x, pot)
        resc = f / math.sqrt(x.size)
        rows.append((n, x.size, resc, phi_min))
        values.append(resc)
    csv = os.path.join(outdir, "pathology.csv")
    exports.write_csv(csv, ["N", "actual_points", "rescaled_energy",
                            "phi_min"], rows)
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.semilogx([r[0] for r in rows], values, "o-")
    ax.axhline(0, color="k", lw=1)
    ax.set_xlabel("N")
    ax.set_ylabel("N^{-1/2} F_V")
    fig.tight_layout()
    figp = _fig_path(outdir, "pathology")
    fig.savefig(figp, dpi=150)
    plt.close(fig)
    checks = [("phi_positive", phi_min, 0.0, phi_min > 0)]
    bound = sc.tolerances.get("max_rescaled")
    if bound is not None:
        worst = max(values)
        checks.append(("rescaled_below", worst, bound, worst <= bound))
    if sc.tolerances.get("decreasing"):
        ok = all(values[i + 1] < values[i] for i in range(len(values) - 1))
        checks.append(("strictly_decreasing", values[-1], values[0], ok))
    return Summary(sc.name, sc.kind, [csv, figp], checks)


def _run_tile_render(sc: Scenario, outdir):
    spec = resolve_spec(sc.params.get("spec"), seed=sc.seed)
    if spec.dim != 2:
        raise ConfigError("spec", "tile-render needs a planar multigrid")
    radius = float(sc.params["radius"])
    dps = multigrid.dual_points_in_region(
        spec, multigrid.Ball(np.zeros(spec.dim), radius))
    svg = os.path.join(outdir, "tiling.svg")
    exports.write_tiling_svg(svg, spec, dps)
    rec = os.path.join(outdir, "tiles.jsonl")
    with open(rec, "w") as fh:
        fh.write(multigrid.tiling_records(spec, dps))
    fig, ax = plt.subplots(figsize=(5, 5))
    arrays = multigrid.tile_arrays(spec, dps)
    for i, j in enumerate(sorted(arrays)):
        anchors, _ = arrays[j]
        gens = [np.asarray(spec.edges[t]) for t in j]
        for a in anchors:
            poly = np.array([a, a + gens[0], a + gens[0] + gens[1],
                             a + gens[1]])
            ax.fill(poly[:, 0], poly[:, 1],
                    color=exports.PALETTE[i % len(exports.PALETTE)],
                    ec="k", lw=0.3)
    ax.set_aspect("equal")
    ax.set_axis_off()
    figp = _fig_path(outdir, "tiling")
    fig.savefig(figp, dpi=150, bbox_inches="tight")
    plt.close(fig)
    n_classes = len({j for j in dps.groups if len(dps.groups[j]["k"])})
    checks = [("tile_classes", n_classes, len(spec.subsets()), True)]
    return Summary(sc.name, sc.kind, [svg, rec, figp], checks)


_RUNNERS = {
    "crystal-converge": _run_crystal,
    "qc-converge": _run_qc,
    "density-audit": _run_density,
    "wulff-gallery": _run_gallery,
    "pathology": _run_pathology,
    "tile-render": _run_tile_render,
}
