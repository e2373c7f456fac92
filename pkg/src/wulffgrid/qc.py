"""Surface energies on multigrid tilings, in primal and dual form.

A finite tile set is stored by the dual keys (J, k_J) of its multigrid
vertices.  The energy of the tile union is computed twice: geometrically, by
matching boundary facets of the actual parallelotopes, and dually, by
counting consecutive multigrid vertices along rail lines with exactly one
endpoint in the set.  The two weighted counts agree exactly, which is the
identity behind the dual rewriting of the tile perimeter.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geom.polytope import ConvexPolytope, polytope_measure
from .multigrid import (
    Ball, DualPointSet, MultigridSpec, affine_map_and_bound,
    dual_lattice_info, dual_points_in_region, intersection_point,
    max_tile_diameter, rail_families, step_along_line, tile_arrays,
)


class QCError(Exception):
    pass


class MissingNormal(QCError):
    pass


class InvalidSubset(QCError):
    pass


class InfeasibleCount(QCError):
    pass


@dataclass(frozen=True)
class TileWeight:
    """Symmetric weight per primal facet-normal class (indexed by rail)."""
    values: dict  # rail subset (tuple) -> nonnegative weight

    @classmethod
    def uniform(cls, spec: MultigridSpec, w=1.0):
        return cls({sub: float(w) for sub in spec.subsets(spec.dim - 1)})

    def __call__(self, subset):
        if subset not in self.values:
            raise MissingNormal(f"no weight for normal class {subset}")
        return self.values[subset]


@dataclass(frozen=True)
class RailPotential:
    """W(v) = w(v~) * |det(g~ : g in J'_v)| per rail family."""
    values: dict  # rail subset -> weight

    def __call__(self, subset):
        if subset not in self.values:
            raise MissingNormal(f"no rail weight for {subset}")
        return self.values[subset]


def rail_weights(spec: MultigridSpec, w: TileWeight):
    """Convert facet weights to rail weights via the facet area factor."""
    d = spec.dim
    out = {}
    for sub in spec.subsets(d - 1):
        es = [spec.edges[i] for i in sub]
        if d == 2:
            area = float(np.linalg.norm(es[0]))
        else:
            area = float(np.linalg.norm(np.cross(es[0], es[1])))
        out[sub] = w(sub) * area
    return RailPotential(out)


class TileSet:
    """Finite set of dual multigrid points, with cached positions."""

    def __init__(self, spec: MultigridSpec, keys, positions=None):
        self.spec = spec
        self.keys = set(keys)
        self._pos = dict(positions or {})
        self._rails = {r.subset: r for r in rail_families(spec)}
        self._nbr = {}

    @classmethod
    def from_dual_points(cls, spec, dps: DualPointSet, subset_keys=None):
        pos = {}
        for j, g in dps.groups.items():
            for k, x in zip(g["k"], g["x"]):
                pos[(j, tuple(int(c) for c in k))] = x
        keys = set(pos) if subset_keys is None else set(subset_keys)
        return cls(spec, keys, pos)

    @property
    def size(self):
        return len(self.keys)

    def position(self, key):
        if key not in self._pos:
            self._pos[key] = intersection_point(self.spec, key[0], key[1])
        return self._pos[key]

    def neighbors(self, key):
        """The 2d facet-adjacent dual points: (neighbor key, rail subset)."""
        if key in self._nbr:
            return self._nbr[key]
        j, _ = key
        x = self.position(key)
        out = []
        for sub in _point_rails(j):
            rail = self._rails[sub]
            for direction in (1, -1):
                nk, nx = step_along_line(self.spec, x, rail, direction)
                self._pos.setdefault(nk, nx)
                out.append((nk, sub))
        self._nbr[key] = out
        return out

    def records(self):
        rows = sorted((list(j), list(k)) for j, k in self.keys)
        import json
        return "\n".join(json.dumps({"J": j, "k": k},
                                    separators=(",", ":"))
                         for j, k in rows) + "\n"


def _point_rails(j):
    """(d-1)-subsets of a point's defining subset = rails through it."""
    from itertools import combinations
    return list(combinations(j, len(j) - 1))


def tile_energy(tiles: TileSet, w: RailPotential):
    """Primal and dual surface energies of the tile union.

    primal: weighted count of boundary facets of the union, obtained by
    matching facet midpoints of the actual parallelotopes.
    dual: weighted count of cut consecutive vertex pairs along rail lines.
    """
    spec = tiles.spec
    primal_counts = {sub: 0 for sub in spec.subsets(spec.dim - 1)}
    seen = {}
    # facet midpoints are half-integer combinations of the edge vectors;
    # matching on doubled integer coefficients is exact
    for j, k in tiles.keys:
        x = tiles.position((j, k))
        full = _full_index(spec, j, k, x)
        doubled_anchor = [2 * (int(full[i]) - (1 if i in j else 0))
                          for i in range(spec.size)]
        for drop in j:
            sub = tuple(i for i in j if i != drop)
            base = list(doubled_anchor)
            for i in sub:
                base[i] += 1
            for shift in (0, 2):
                coeff = list(base)
                coeff[drop] += shift
                key = (sub, tuple(coeff))
                if key in seen:
                    seen.pop(key)  # interior facet: appears exactly twice
                else:
                    seen[key] = sub
    for key, sub in seen.items():
        primal_counts[sub] += 1

    dual_counts = {sub: ep_counts(tiles, sub) for sub in primal_counts}
    primal = sum(w(sub) * c for sub, c in primal_counts.items())
    dual = sum(w(sub) * c for sub, c in dual_counts.items())
    return {
        "primal": float(primal),
        "dual": float(dual),
        "primal_counts": primal_counts,
        "dual_counts": dual_counts,
    }


def _full_index(spec, j, k, x):
    full = np.zeros(spec.size)
    for i in range(spec.size):
        if i in j:
            full[i] = k[j.index(i)]
        else:
            full[i] = math.floor(float(spec.grid_parameter(i, x)[0]))
    return full


def ep_counts(tiles: TileSet, rail_subset, j=None):
    """Edge-perimeter counts for one rail direction.

    Without ``j``: pairs of consecutive multigrid vertices on a common line
    in the rail direction with exactly one endpoint in the set.  With ``j``
    (a d-subset containing the rail subset): pairs of Lambda_J points
    differing by the lattice generator parallel to the rail, one endpoint in
    the slice  X ∩ Lambda_J.
    """
    spec = tiles.spec
    rail_subset = tuple(sorted(rail_subset))
    if j is None:
        rail = tiles._rails[rail_subset]
        count = 0
        for key in tiles.keys:
            if not set(rail_subset) <= set(key[0]):
                continue
            x = tiles.position(key)
            for direction in (1, -1):
                nk, _ = step_along_line(spec, x, rail, direction)
                if nk not in tiles.keys:
                    count += 1
        return count
    j = tuple(sorted(j))
    if not set(rail_subset) <= set(j) or len(j) != spec.dim:
        raise InvalidSubset(f"{j} does not extend rail {rail_subset}")
    drop = next(i for i in j if i not in rail_subset)
    pos = j.index(drop)
    slice_keys = {k for (jj, k) in tiles.keys if jj == j}
    count = 0
    for k in slice_keys:
        for sign in (1, -1):
            shifted = list(k)
            shifted[pos] += sign
            if tuple(shifted) not in slice_keys:
                count += 1
    return count


def phi_W_eval(nu, spec: MultigridSpec, w: RailPotential,
               pairing="abs"):
    """Limit anisotropy  (1/det A) sum_v W(v)/cell(J'_v) |<nu, A v>| .

    Each rail class carries a single orientation while the energy counts
    cut pairs in both directions along its lines, so the pairing is the
    absolute value.  (With the positive part instead, the square-bigrid
    specialization would contradict the nearest-neighbor lattice limit:
    ``pairing="positive_part"`` is available for that comparison value.)
    """
    nu = np.asarray(nu, dtype=float)
    if np.linalg.norm(nu) == 0:
        raise QCError("phi_W needs a nonzero direction")
    amap, _ = affine_map_and_bound(spec)
    det = amap.det
    total = 0.0
    for rail in rail_families(spec):
        s = float(nu @ (amap.linear @ rail.v))
        s = abs(s) if pairing == "abs" else max(s, 0.0)
        total += w(rail.subset) / rail.cell_measure * s
    return total / det


def perimeter_P_W(body: ConvexPolytope, spec: MultigridSpec,
                  w: RailPotential, pairing="abs"):
    m = polytope_measure(body)
    return float(sum(phi_W_eval(n, spec, w, pairing) * a
                     for n, a in m["facets"]))


def rho_X(spec: MultigridSpec):
    """Total dual point density  sum_J 1/det(Lambda_J)."""
    return float(sum(1.0 / dual_lattice_info(spec, j).covolume
                     for j in spec.subsets()))


@dataclass
class QCRecoveryResult:
    tiles: TileSet
    raw_count: int
    correction: int
    bound_constant: float


class _PolytopeRegion:
    """Adapter: use a convex polytope as a dual enumeration region."""

    def __init__(self, body: ConvexPolytope):
        self.body = body

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        keep = np.ones(len(pts), dtype=bool)
        for n, c in self.body.facets:
            keep &= pts @ n <= c + 1e-12
        return keep

    def k_window(self, b_col, p):
        vals = [float((v - p) @ b_col) for v in self.body.vertices]
        return min(vals), max(vals)


def qc_recovery(body: ConvexPolytope, n: int, spec: MultigridSpec):
    """Tile set of exactly n tiles approximating a unit-volume body.

    Intersects the scaled body (dual scale (n / rho_X)^(1/d)) with the dual
    vertex set, then corrects the count by peeling or filling boundary tiles
    (smallest cut count first, lexicographic tie-break), which perturbs the
    energy by O(1) per point instead of the O(k) of a blind cluster.
    """
    d = spec.dim
    vol = polytope_measure(body)["volume"]
    if abs(vol - 1.0) > 1e-6:
        raise QCError(f"qc_recovery needs |E| = 1, got {vol}")
    density = rho_X(spec)
    lam = (n / density) ** (1.0 / d)
    ball_n = density * (0.5 * max_tile_diameter(spec)) ** d * 2.0
    if n < ball_n or lam < max_tile_diameter(spec):
        raise InfeasibleCount(f"n = {n} below one tile-diameter ball")
    region = _PolytopeRegion(body.scale(lam))
    dps = dual_points_in_region(spec, region)
    tiles = TileSet.from_dual_points(spec, dps)
    raw = tiles.size
    k = raw - n
    if raw == 0 or k >= raw:
        raise InfeasibleCount(f"n = {n} infeasible at this scale")
    if k > 0:
        _peel(tiles, k)
    elif k < 0:
        _fill(tiles, -k)
    area = sum(a for _, a in polytope_measure(body)["facets"])
    const = abs(k) / max(area * n ** ((d - 1) / d), 1e-12)
    return QCRecoveryResult(tiles, raw, abs(k), const)


def _boundary_cuts(tiles: TileSet):
    cuts = {}
    for key in tiles.keys:
        b = sum(1 for nk, _ in tiles.neighbors(key) if nk not in tiles.keys)
        if b:
            cuts[key] = b
    return cuts


def _peel(tiles: TileSet, k):
    """Remove k boundary tiles, preferring the most exposed (b max)."""
    cuts = _boundary_cuts(tiles)
    for _ in range(k):
        key = max(cuts, key=lambda q: (cuts[q], q))
        tiles.keys.discard(key)
        cuts.pop(key)
        for nk, _ in tiles.neighbors(key):
            if nk in tiles.keys:
                cuts[nk] = sum(1 for mk, _ in tiles.neighbors(nk)
                               if mk not in tiles.keys)


def _fill(tiles: TileSet, k):
    """Add k outside tiles adjacent to the set, preferring notches (a max)."""
    attach = {}
    for key in tiles.keys:
        for nk, _ in tiles.neighbors(key):
            if nk not in tiles.keys:
                attach[nk] = attach.get(nk, 0) + 1
    for _ in range(k):
        key = max(attach, key=lambda q: (attach[q], q))
        tiles.keys.add(key)
        attach.pop(key)
        for nk, _ in tiles.neighbors(key):
            if nk not in tiles.keys:
                attach[nk] = sum(1 for mk, _ in tiles.neighbors(nk)
                                 if mk in tiles.keys)


def primal_union_area(tiles: TileSet):
    spec = tiles.spec
    total = 0.0
    for j, k in tiles.keys:
        gens = np.column_stack([spec.edges[i] for i in j])
        total += abs(float(np.linalg.det(gens)))
    return total


def symmetric_difference_area(tiles: TileSet, body: ConvexPolytope,
                              grid=400):
    """Monte-Carlo-free area of (tile union) Δ body on a regular grid."""
    spec = tiles.spec
    lo = body.vertices.min(axis=0) - max_tile_diameter(spec)
    hi = body.vertices.max(axis=0) + max_tile_diameter(spec)
    axes = [np.linspace(lo[i], hi[i], grid) for i in range(spec.dim)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, spec.dim)
    cell = math.prod(float(a[1] - a[0]) for a in axes)
    in_body = np.ones(len(mesh), dtype=bool)
    for nrm, c in body.facets:
        in_body &= mesh @ nrm <= c
    in_tiles = np.zeros(len(mesh), dtype=bool)
    for j, k in tiles.keys:
        x = tiles.position((j, k))
        full = _full_index(spec, j, k, x)
        gens = np.column_stack([spec.edges[i] for i in j])
        anchor = full @ np.array(spec.edges) - gens.sum(axis=1)
        u = np.linalg.solve(gens, (mesh - anchor).T).T
        in_tiles |= np.all((u >= 0) & (u <= 1), axis=1)
    return float(np.sum(in_body != in_tiles) * cell)


@dataclass
class DensityAudit:
    rows: list          # per J: (J, rho, empirical fraction, count, cell_dev)
    rho_sum: float
    max_fraction_dev: float
    max_cell_dev: float


def density_audit(spec: MultigridSpec, radius, center=None):
    """Empirical per-class area fractions and dual-cell volumes vs rho_J.

    Counts Lambda_J points in a dual ball; compares (count * tile area)
    fractions against rho_J and count * det(Lambda_J) against the ball area.
    """
    d = spec.dim
    center = np.zeros(d) if center is None else np.asarray(center, float)
    region = Ball(center, float(radius))
    ball_vol = math.pi * radius ** 2 if d == 2 else \
        4.0 / 3.0 * math.pi * radius ** 3
    rows = []
    weighted = {}
    for j in spec.subsets():
        info = dual_lattice_info(spec, j)
        ranges = []
        for pos in range(d):
            b_col = np.column_stack(
                [spec.normals[i] / float(np.dot(spec.normals[i],
                                                spec.normals[i]))
                 for i in j])[:, pos]
            lo, hi = region.k_window(b_col, info.base_point)
            ranges.append(np.arange(math.floor(lo) - 1, math.ceil(hi) + 2))
        mesh = np.stack(np.meshgrid(*ranges, indexing="ij"), -1).reshape(-1, d)
        x = info.base_point + mesh @ info.basis.T
        count = int(region.contains(x).sum())
        area_j = abs(float(np.linalg.det(
            np.column_stack([spec.edges[i] for i in j]))))
        weighted[j] = (count, count * area_j, info)
    total = sum(wa for _, wa, _ in weighted.values())
    max_frac = 0.0
    max_cell = 0.0
    for j, (count, wa, info) in weighted.items():
        frac = wa / total
        cell_dev = abs(count * info.covolume / ball_vol - 1.0)
        max_frac = max(max_frac, abs(frac - info.rho) / info.rho)
        max_cell = max(max_cell, cell_dev)
        rows.append((j, info.rho, frac, count, cell_dev))
    rho_sum = float(sum(info.rho for _, _, info in weighted.values()))
    return DensityAudit(rows, rho_sum, max_frac, max_cell)
