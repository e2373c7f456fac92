"""Multigrid construction of quasiperiodic tilings.

A multigrid is a family of equally spaced parallel hyperplane grids
H(g, k, gamma) = {x : <x, g/|g|> - gamma = k |g|}, one grid per normal g,
together with primal edge vectors g~ satisfying the compatibility condition
det(g_1..g_d) det(g~_1..g~_d) > 0 for every d-subset.  Every d-fold
intersection point carries an admissible integer index over all grids
(exact indices on its own families, slab floors elsewhere) and dualizes to
the parallelotope  sum_g k_g g~ + sum_{g in J} [0,1] g~.

Genericity is enforced, never repaired: degenerate translations raise, and
floor evaluations landing within the incidence tolerance of an integer are
reported as genericity violations rather than rounded.
"""

import itertools
import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

INCIDENCE_TOL = 1e-9


class MultigridError(Exception):
    pass


class DetConditionViolated(MultigridError):
    pass


class DegenerateTranslations(MultigridError):
    pass


class GenericityViolation(MultigridError):
    pass


class SingularSubset(MultigridError):
    pass


class OverlapDetected(MultigridError):
    def __init__(self, witness):
        super().__init__(f"sample point in more than one tile: {witness}")
        self.witness = witness


class GapDetected(MultigridError):
    def __init__(self, witness):
        super().__init__(f"sample point in no tile: {witness}")
        self.witness = witness


@dataclass(frozen=True)
class MultigridSpec:
    """Ordered normals G, absolute translations gamma, primal edges G~."""
    normals: tuple
    gammas: tuple
    edges: tuple

    def __post_init__(self):
        ns = tuple(np.asarray(g, dtype=float) for g in self.normals)
        es = tuple(np.asarray(e, dtype=float) for e in self.edges)
        gs = tuple(float(c) for c in self.gammas)
        if not (len(ns) == len(es) == len(gs)):
            raise MultigridError("normals, gammas, edges must align")
        d = len(ns[0])
        if len(ns) < d:
            raise MultigridError("need at least d normals")
        object.__setattr__(self, "normals", ns)
        object.__setattr__(self, "edges", es)
        object.__setattr__(self, "gammas", gs)

    @property
    def dim(self):
        return len(self.normals[0])

    @property
    def size(self):
        return len(self.normals)

    def subsets(self, k=None):
        k = self.dim if k is None else k
        return list(combinations(range(self.size), k))

    def unit_normal(self, i):
        g = self.normals[i]
        return g / np.linalg.norm(g)

    def spacing(self, i):
        return float(np.linalg.norm(self.normals[i]))

    def grid_parameter(self, i, points):
        """t_i(x) = (<x, g/|g|> - gamma_i) / |g|; integer values on hyperplanes."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        s = self.spacing(i)
        return (pts @ self.unit_normal(i) - self.gammas[i]) / s

    def to_document(self):
        return {
            "dimension": self.dim,
            "normals": [list(map(float, g)) for g in self.normals],
            "translations": list(self.gammas),
            "primal_edges": [list(map(float, e)) for e in self.edges],
            "ordering": list(range(self.size)),
        }

    @classmethod
    def from_document(cls, doc):
        normals = [tuple(g) for g in doc["normals"]]
        edges = [tuple(e) for e in doc.get("primal_edges", doc["normals"])]
        if "translations" in doc:
            gammas = list(doc["translations"])
        else:
            gammas = seeded_translations(len(normals), doc["seed"])
        order = doc.get("ordering")
        if order:
            normals = [normals[i] for i in order]
            edges = [edges[i] for i in order]
            gammas = [gammas[i] for i in order]
        return cls(tuple(normals), tuple(gammas), tuple(edges))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_document(json.load(fh))


def seeded_translations(n, seed, lo=0.05, hi=0.95):
    rng = np.random.default_rng(seed)
    return [float(t) for t in rng.uniform(lo, hi, size=n)]


def square_bigrid(gammas=(0.25, 0.25)):
    return MultigridSpec(((1.0, 0.0), (0.0, 1.0)), tuple(gammas),
                         ((1.0, 0.0), (0.0, 1.0)))


def pentagrid(gammas=None, seed=11):
    """Five unit grids at 72 degrees; g~ = g (Penrose rhombus tiling)."""
    if gammas is None:
        gammas = seeded_translations(5, seed)
    gs = tuple((math.cos(2 * math.pi * j / 5), math.sin(2 * math.pi * j / 5))
               for j in range(5))
    return MultigridSpec(gs, tuple(gammas), gs)


def _minor_dets(spec):
    out = {}
    for j in spec.subsets():
        gd = np.linalg.det(np.column_stack([spec.normals[i] for i in j]))
        ed = np.linalg.det(np.column_stack([spec.edges[i] for i in j]))
        out[j] = (gd, ed)
    return out


@dataclass
class SpecReport:
    det_products: dict
    det_gram: float          # det(G G~^T) with normalized columns
    subset_sum: float        # Cauchy-Binet right-hand side
    genericity_ok: bool
    min_pair_distance: float


def _normalized_matrices(spec):
    g = np.column_stack([spec.unit_normal(i) for i in range(spec.size)])
    gt = np.column_stack([spec.edges[i] / spec.spacing(i)
                          for i in range(spec.size)])
    return g, gt


def validate_spec(spec: MultigridSpec, probe_pairs=1000, seed=0):
    """Compatibility, Cauchy-Binet cross-check and a genericity probe.

    Probes systematically over all pairs of d-subsets with small indices plus
    seeded random index windows; two distinct intersection points closer than
    1e-7 witness more than d concurrent hyperplanes.
    """
    d = spec.dim
    mins = _minor_dets(spec)
    bad = [j for j, (gd, ed) in mins.items() if gd * ed <= 0]
    if bad:
        raise DetConditionViolated(
            f"det(G_J) det(G~_J) <= 0 for subsets {bad}")

    g, gt = _normalized_matrices(spec)
    lhs = float(np.linalg.det(g @ gt.T))
    rhs = 0.0
    for j in spec.subsets():
        rhs += (np.linalg.det(g[:, j]) * np.linalg.det(gt[:, j]))
    rhs = float(rhs)

    rng = np.random.default_rng(seed)
    pairs = []
    subs = spec.subsets()
    for a in range(len(subs)):
        for b in range(a + 1, len(subs)):
            for ka in itertools.product((-1, 0, 1), repeat=d):
                pairs.append((subs[a], subs[b], ka, (0,) * d))
    if len(subs) > 1:
        for _ in range(probe_pairs):
            a, b = rng.choice(len(subs), size=2, replace=False)
            ka = tuple(int(k) for k in rng.integers(-3, 4, size=d))
            kb = tuple(int(k) for k in rng.integers(-3, 4, size=d))
            pairs.append((subs[a], subs[b], ka, kb))
    min_dist = np.inf
    for ja, jb, ka, kb in pairs:
        xa = intersection_point(spec, ja, ka)
        xb = intersection_point(spec, jb, kb)
        dist = float(np.linalg.norm(xa - xb))
        if set(ja) != set(jb) or ka != kb:
            min_dist = min(min_dist, dist)
    if min_dist < 1e-7:
        raise DegenerateTranslations(
            f"distinct d-fold intersections coincide (distance {min_dist:.2e})")
    return SpecReport(mins, lhs, rhs, True, min_dist)


def combinations_with_small(vals, d):
    return itertools.product(vals, repeat=d)


def perturb(spec: MultigridSpec, seed=1, scale=1e-3):
    """Add seeded offsets in (0, scale) to the translations and re-validate."""
    rng = np.random.default_rng(seed)
    gammas = tuple(g + float(o)
                   for g, o in zip(spec.gammas,
                                   rng.uniform(0, scale, spec.size)))
    out = MultigridSpec(spec.normals, gammas, spec.edges)
    validate_spec(out)
    return out


def intersection_point(spec, j, kj):
    """x(J, k_J): common point of the hyperplanes H(g_i, k_i) for i in J."""
    rows = np.array([spec.unit_normal(i) for i in j])
    rhs = np.array([spec.gammas[i] + kj[n] * spec.spacing(i)
                    for n, i in enumerate(j)])
    try:
        return np.linalg.solve(rows, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSubset(str(exc)) from exc


@dataclass(frozen=True)
class AffineMap:
    linear: np.ndarray
    offset: np.ndarray

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.linear.T + self.offset

    def inverse(self, y):
        return np.linalg.solve(self.linear,
                               (np.asarray(y, dtype=float) - self.offset).T).T

    @property
    def det(self):
        return float(np.linalg.det(self.linear))


def affine_map_and_bound(spec: MultigridSpec):
    """The comparison map A and the distortion bound of tile centers.

    A x = sum_g (1/|g|)(<x, g/|g|> - gamma_g) g~.  The center of the tile of
    an admissible point differs from A x by  (1/2) sum_J g~ - sum_{g not in
    J} {t_g} g~, so the bound is the max modulus of that polytope's corners.
    """
    d = spec.dim
    linear = np.zeros((d, d))
    offset = np.zeros(d)
    for i in range(spec.size):
        s = spec.spacing(i)
        linear += np.outer(spec.edges[i], spec.normals[i]) / (s * s)
        offset -= spec.gammas[i] / s * spec.edges[i]
    bound = 0.0
    for j in spec.subsets():
        half = 0.5 * sum(spec.edges[i] for i in j)
        rest = [i for i in range(spec.size) if i not in j]
        for mask in range(1 << len(rest)):
            acc = half.copy()
            for b, i in enumerate(rest):
                if mask >> b & 1:
                    acc += spec.edges[i]
            bound = max(bound, float(np.linalg.norm(acc)))
    return AffineMap(linear, offset), bound


@dataclass(frozen=True)
class RailFamily:
    """Line direction v dual to the (d-1)-subset J', with primal normal v~."""
    index: int
    subset: tuple          # (d-1)-subset of grid indices, ordered
    v: np.ndarray          # unit line direction, det(g_1..g_{d-1}, v) > 0
    v_tilde: np.ndarray    # unit primal facet normal, det(g~.., v~) > 0
    cell_measure: float    # H^{d-1}(U_{Lambda_{J'}})
    primal_direction: np.ndarray


def _oriented_orthogonal(vectors, d):
    """Unit vector orthogonal to d-1 vectors with positive determinant."""
    if d == 2:
        g = vectors[0]
        v = np.array([-g[1], g[0]])
    else:
        v = np.cross(vectors[0], vectors[1])
    n = np.linalg.norm(v)
    if n < 1e-12:
        raise SingularSubset("degenerate (d-1)-subset")
    v = v / n
    m = np.column_stack(list(vectors) + [v])
    if np.linalg.det(m) < 0:
        v = -v
    return v


def rail_families(spec: MultigridSpec):
    """One family per (d-1)-subset of the normals, in lexicographic order."""
    d = spec.dim
    linear = affine_map_and_bound(spec)[0].linear
    out = []
    for idx, sub in enumerate(spec.subsets(d - 1)):
        gs = [spec.normals[i] for i in sub]
        es = [spec.edges[i] for i in sub]
        v = _oriented_orthogonal(gs, d)
        vt = _oriented_orthogonal(es, d)
        if d == 2:
            wedge = float(np.linalg.norm(gs[0]))
        else:
            wedge = float(np.linalg.norm(np.cross(gs[0], gs[1])))
        cell = math.prod(float(np.dot(g, g)) for g in gs) / wedge
        prim = linear @ v
        out.append(RailFamily(idx, sub, v, vt, cell,
                              prim / np.linalg.norm(prim)))
    return out


@dataclass(frozen=True)
class DualLatticeInfo:
    subset: tuple
    basis: np.ndarray       # columns generate Lambda_J - p_J
    base_point: np.ndarray
    covolume: float
    rho: float              # asymptotic area fraction of the subtiling
    rail_generators: dict   # rail subset -> lambda_{v,J} > 0


def dual_lattice_info(spec: MultigridSpec, j):
    """Translated lattice of J-fold intersection points and its densities."""
    j = tuple(sorted(j))
    d = spec.dim
    b = np.column_stack([spec.normals[i] / float(np.dot(spec.normals[i],
                                                        spec.normals[i]))
                         for i in j])
    if abs(np.linalg.det(b)) < 1e-12:
        raise SingularSubset(f"subset {j} is singular")
    basis = np.linalg.inv(b).T
    p = intersection_point(spec, j, (0,) * d)
    covolume = abs(float(np.linalg.det(basis)))

    g, gt = _normalized_matrices(spec)
    rho = float(np.linalg.det(g[:, j]) * np.linalg.det(gt[:, j])
                / np.linalg.det(g @ gt.T))

    rails = {}
    for pos, drop in enumerate(j):
        sub = tuple(i for i in j if i != drop)
        gen = basis[:, pos]  # dual-basis vector of the dropped family
        rails[sub] = float(np.linalg.norm(gen))
    return DualLatticeInfo(j, basis, p, covolume, rho, rails)


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __init__(self, center, radius):
        object.__setattr__(self, "center", np.asarray(center, dtype=float))
        object.__setattr__(self, "radius", float(radius))

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        return np.linalg.norm(pts - self.center, axis=1) <= self.radius

    def k_window(self, b_col, p):
        c = float((self.center - p) @ b_col)
        r = self.radius * float(np.linalg.norm(b_col))
        return c - r, c + r


@dataclass(frozen=True)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def __init__(self, lo, hi):
        object.__setattr__(self, "lo", np.asarray(lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(hi, dtype=float))

    def contains(self, pts):
        pts = np.atleast_2d(pts)
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)

    def k_window(self, b_col, p):
        corners = []
        d = len(self.lo)
        for mask in range(1 << d):
            corner = np.where([(mask >> i) & 1 for i in range(d)],
                              self.hi, self.lo)
            corners.append(float((corner - p) @ b_col))
        return min(corners), max(corners)


@dataclass
class DualPoint:
    subset: tuple
    k_subset: tuple
    full_index: tuple
    position: np.ndarray

    @property
    def key(self):
        return (self.subset, self.k_subset)


@dataclass
class DualPointSet:
    """Admissible multigrid vertices grouped per defining d-subset."""
    spec: MultigridSpec
    groups: dict  # J -> dict(k=(m,d) int array, full=(m,n) int, x=(m,d) float)

    @property
    def count(self):
        return sum(len(g["k"]) for g in self.groups.values())

    def positions(self):
        if not self.groups:
            return np.zeros((0, self.spec.dim))
        return np.vstack([g["x"] for g in self.groups.values()])

    def full_indices(self):
        return np.vstack([g["full"] for g in self.groups.values()])

    def iter_points(self):
        for j, g in self.groups.items():
            for k, full, x in zip(g["k"], g["full"], g["x"]):
                yield DualPoint(j, tuple(int(c) for c in k),
                                tuple(int(c) for c in full), x)

    def keys(self):
        for j, g in self.groups.items():
            for k in g["k"]:
                yield (j, tuple(int(c) for c in k))


def dual_points_in_region(spec: MultigridSpec, region,
                          strict_genericity=True):
    """All admissible dual points whose position lies in the region.

    Enumerates each lattice Lambda_J over an index window covering the
    region, filters, then computes slab floors for the remaining grids.
    Fractional parts inside the incidence guard band raise
    GenericityViolation (or drop the point when strict_genericity=False).
    """
    d = spec.dim
    groups = {}
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
        inside = region.contains(x)
        mesh, x = mesh[inside], x[inside]
        if len(mesh) == 0:
            continue
        full = np.zeros((len(mesh), spec.size), dtype=np.int64)
        keep = np.ones(len(mesh), dtype=bool)
        for i in range(spec.size):
            if i in j:
                full[:, i] = mesh[:, j.index(i)]
                continue
            t = spec.grid_parameter(i, x)
            k = np.floor(t).astype(np.int64)
            frac = t - k
            bad = (frac < INCIDENCE_TOL) | (frac > 1 - INCIDENCE_TOL)
            if bad.any():
                if strict_genericity:
                    w = x[bad][0]
                    raise GenericityViolation(
                        f"fractional part within 1e-9 of an integer at {w}")
                keep &= ~bad
            full[:, i] = k
        groups[j] = {"k": mesh[keep], "full": full[keep], "x": x[keep]}
    return DualPointSet(spec, groups)


@dataclass
class Tile:
    subset: tuple
    anchor: np.ndarray
    generators: tuple
    center: np.ndarray
    volume: float


def tile_of(spec: MultigridSpec, point: DualPoint):
    """Parallelotope dual to an admissible multigrid vertex.

    The anchor is  sum_g k_g g~ - sum_{g in J} g~ : the floor image of the
    face of the hyperplane arrangement on the negative side of the J
    hyperplanes.  (Anchoring at sum_g k_g g~ directly would translate each
    tile by the J-dependent vector sum_J g~ and the pieces no longer tile.)
    """
    edges = np.array([spec.edges[i] for i in range(spec.size)])
    gens = tuple(spec.edges[i] for i in point.subset)
    anchor = np.asarray(point.full_index, dtype=float) @ edges - sum(gens)
    center = anchor + 0.5 * sum(gens)
    vol = abs(float(np.linalg.det(np.column_stack(gens))))
    return Tile(point.subset, anchor, gens, center, vol)


def tile_arrays(spec: MultigridSpec, dps: DualPointSet):
    """Vectorized anchors/centers per group: dict J -> (anchors, centers)."""
    edges = np.array([spec.edges[i] for i in range(spec.size)])
    out = {}
    for j, g in dps.groups.items():
        gen_sum = np.sum([spec.edges[i] for i in j], axis=0)
        anchors = g["full"].astype(float) @ edges - gen_sum
        centers = anchors + 0.5 * gen_sum
        out[j] = (anchors, centers)
    return out


def max_tile_diameter(spec: MultigridSpec):
    best = 0.0
    for j in spec.subsets():
        gens = [spec.edges[i] for i in j]
        for mask in range(1 << len(gens)):
            acc = np.zeros(spec.dim)
            for b, e in enumerate(gens):
                acc = acc + (e if (mask >> b) & 1 else -e)
            best = max(best, float(np.linalg.norm(acc)))
    return best


@dataclass
class TilingReport:
    n_tiles: int
    n_samples: int
    n_resampled: int
    window_area: float
    covered_lower: float
    covered_upper: float
    ok: bool


def verify_tiling(spec: MultigridSpec, region: Ball, n_samples=10000,
                  seed=4, tol=INCIDENCE_TOL):
    """Check that the dual tiles cover the region once.

    Tiles are generated for every dual point mapping (via A, padded by the
    distortion bound plus the largest tile diameter) into the region; each
    uniform sample in the eroded region must lie in exactly one tile.
    Samples within ``tol`` of a tile wall are re-drawn.
    """
    validate_spec(spec, probe_pairs=200, seed=seed)
    amap, bd = affine_map_and_bound(spec)
    pad = bd + max_tile_diameter(spec)
    inv_norm = float(np.linalg.norm(np.linalg.inv(amap.linear), 2))
    dual_center = amap.inverse(region.center)
    dual = dual_points_in_region(
        spec, Ball(dual_center, inv_norm * (region.radius + 2 * pad)))

    tiles = []
    for j, (anchors, centers) in tile_arrays(spec, dual).items():
        gen = np.column_stack([spec.edges[i] for i in j])
        inv = np.linalg.inv(gen)
        keep = np.linalg.norm(centers - region.center, axis=1) \
            <= region.radius + pad
        for a in anchors[keep]:
            tiles.append((a, inv, gen))
    if not tiles:
        raise GapDetected(region.center)

    # bucket tiles by anchor cell for point queries
    cell = max_tile_diameter(spec)
    buckets = {}
    for idx, (a, inv, gen) in enumerate(tiles):
        center = a + 0.5 * gen.sum(axis=1)
        key = tuple((center // cell).astype(int))
        for off in combinations_with_small((-1, 0, 1), spec.dim):
            buckets.setdefault(tuple(np.add(key, off)), []).append(idx)

    rng = np.random.default_rng(seed)
    target = region.radius - pad
    if target <= 0:
        raise MultigridError("region too small for the erosion pad")
    hits = 0
    resampled = 0
    done = 0
    while done < n_samples:
        p = rng.uniform(-target, target, size=spec.dim) + region.center
        if np.linalg.norm(p - region.center) > target:
            continue
        key = tuple((p // cell).astype(int))
        count = 0
        boundary = False
        for idx in buckets.get(key, ()):
            a, inv, gen = tiles[idx]
            u = inv @ (p - a)
            if np.all(u > tol) and np.all(u < 1 - tol):
                count += 1
            elif np.all(u > -tol) and np.all(u < 1 + tol):
                boundary = True
        if boundary and count != 1:
            resampled += 1
            continue
        if count == 0:
            raise GapDetected(p)
        if count > 1:
            raise OverlapDetected(p)
        hits += 1
        done += 1

    # area audit over an inscribed window
    half = target / math.sqrt(spec.dim)
    window = Box(region.center - half, region.center + half)
    w_area = (2 * half) ** spec.dim
    lower = upper = 0.0
    for a, inv, gen in tiles:
        vol = abs(float(np.linalg.det(gen)))
        corners = [a + gen @ np.array(eps, dtype=float)
                   for eps in combinations_with_small((0, 1), spec.dim)]
        ins = window.contains(np.array(corners))
        if ins.all():
            lower += vol
        if ins.any():
            upper += vol
    ok = lower <= w_area + 1e-9 and upper >= w_area - 1e-9
    return TilingReport(len(tiles), n_samples, resampled, w_area, lower,
                        upper, ok)


def line_through(point: DualPoint, rail: RailFamily):
    """Line parameters (J', k_{J'}) of the rail line through a dual point."""
    if not set(rail.subset) <= set(point.subset):
        return None
    kvals = tuple(point.k_subset[point.subset.index(i)] for i in rail.subset)
    return (rail.subset, kvals)


def step_along_line(spec: MultigridSpec, x0, rail: RailFamily, direction,
                    tol=INCIDENCE_TOL):
    """Next multigrid vertex along the rail line from x0.

    Returns (key, position): the neighbor's (J, k_J) key and its coordinates.
    The crossing families are exactly those not in the rail subset; ties
    inside the incidence tolerance are genericity violations.
    """
    v = rail.v if direction > 0 else -rail.v
    best_t, best = np.inf, None
    for h in range(spec.size):
        if h in rail.subset:
            continue
        nh = spec.unit_normal(h)
        s = spec.spacing(h)
        denom = float(v @ nh)
        tau0 = (spec.gammas[h] - float(np.dot(x0, nh))) / denom
        step = s / denom
        if step > 0:
            k = math.floor((tol - tau0) / step) + 1
        else:
            k = math.ceil((tol - tau0) / step) - 1
        t = tau0 + k * step
        if t <= tol:  # float edge of the floor/ceil above
            k += 1 if step > 0 else -1
            t = tau0 + k * step
        if t < best_t:
            best_t, best = t, (h, k)
    h, k = best
    x1 = np.asarray(x0, dtype=float) + best_t * v
    j_new = tuple(sorted(rail.subset + (h,)))
    ks = {}
    for i in rail.subset:
        t_i = float(spec.grid_parameter(i, x1)[0])
        ks[i] = int(round(t_i))
    ks[h] = k
    k_new = tuple(ks[i] for i in j_new)
    return (j_new, k_new), x1


def tiling_records(spec: MultigridSpec, dps: DualPointSet):
    """Line-delimited {J, k, anchor, generators} records, deterministic order."""
    rows = []
    for p in dps.iter_points():
        t = tile_of(spec, p)
        rows.append({
            "J": list(p.subset),
            "k": list(p.full_index),
            "anchor": [round(float(c), 9) for c in t.anchor],
            "generators": [[round(float(c), 9) for c in g]
                           for g in t.generators],
        })
    rows.sort(key=lambda r: (r["J"], r["k"]))
    return "\n".join(json.dumps(r, separators=(",", ":")) for r in rows) + "\n"
