"""Discrete lattice energies, their channel splitting, and recovery sequences.

Two weight conventions coexist:

* ``crystal``: weights are <= 0 (bond formation lowers the energy) and the
  surface energy is the nonnegative excess  -sum_{x in X} sum_{x' not in X}
  V(x' - x), i.e. each missing bond costs |V|.
* ``signed``: weights carry their own sign and the surface energy is the
  signed cut-bond total  sum_v V(v) * #{x in X : x + v not in X}.  This is
  the convention under which the checkerboard pathology produces negative
  rescaled energies while the continuum anisotropy stays positive.

Configurations are finite subsets of Z^d stored as integer arrays; the heavy
counting paths are vectorized through an integer encoding of coordinates.
"""

from dataclasses import dataclass, field

import numpy as np

from .geom import intlattice
from .geom.polytope import ConvexPolytope, polytope_measure

CONVENTIONS = ("crystal", "signed")
MODES = ("positive_part", "abs")


class EnergyError(Exception):
    pass


class ChannelNotInSupport(EnergyError):
    pass


class ZeroDirection(EnergyError):
    pass


class SingularMap(EnergyError):
    pass


class InfeasibleCount(EnergyError):
    pass


class SpanDeficient(EnergyError):
    pass


@dataclass(frozen=True)
class Potential:
    """Finitely supported weight map on lattice vectors."""
    atoms: dict
    convention: str = "crystal"
    mode: str = "positive_part"

    def __post_init__(self):
        clean = {}
        for v, w in self.atoms.items():
            key = tuple(int(c) for c in v)
            if all(c == 0 for c in key):
                raise EnergyError("0 must not be in the support")
            if w != 0:
                clean[key] = float(w)
        if not clean:
            raise EnergyError("empty support")
        if self.convention not in CONVENTIONS:
            raise EnergyError(f"unknown convention {self.convention!r}")
        if self.mode not in MODES:
            raise EnergyError(f"unknown mode {self.mode!r}")
        if self.convention == "crystal":
            if any(w > 0 for w in clean.values()):
                raise EnergyError("crystal convention requires weights <= 0")
        object.__setattr__(self, "atoms", dict(sorted(clean.items())))

    @property
    def dim(self):
        return len(next(iter(self.atoms)))

    @property
    def support(self):
        return tuple(self.atoms)

    def weight(self, v):
        return self.atoms.get(tuple(int(c) for c in v), 0.0)

    def positive_part(self):
        return {v: w for v, w in self.atoms.items() if w > 0}

    def negative_part(self):
        return {v: -w for v, w in self.atoms.items() if w < 0}

    @classmethod
    def nearest_neighbor(cls, d, weight=-1.0):
        atoms = {}
        for i in range(d):
            e = [0] * d
            e[i] = 1
            atoms[tuple(e)] = weight
            atoms[tuple(-c for c in e)] = weight
        return cls(atoms)

    def to_config(self):
        return {
            "convention": self.convention,
            "mode": self.mode,
            "atoms": [{"vector": list(v), "weight": w}
                      for v, w in self.atoms.items()],
        }

    @classmethod
    def from_config(cls, doc):
        atoms = {tuple(a["vector"]): a["weight"] for a in doc["atoms"]}
        return cls(atoms, doc.get("convention", "crystal"),
                   doc.get("mode", "positive_part"))


@dataclass(frozen=True)
class SublatticeChannel:
    """Direction v with a canonical coset representative tau of tau + Lambda_v."""
    v: tuple
    tau: tuple


@dataclass
class Configuration:
    """Finite set of distinct points of Z^d (ambient lattice = basis @ Z^d)."""
    points: np.ndarray
    basis: np.ndarray = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64)
        if pts.ndim != 2:
            pts = pts.reshape(-1, pts.shape[-1] if pts.size else 1)
        pts = np.unique(pts, axis=0)
        self.points = pts
        if self.basis is None:
            self.basis = np.eye(pts.shape[1])

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def size(self):
        return len(self.points)

    def as_set(self):
        return set(map(tuple, self.points.tolist()))

    def to_text(self):
        lines = sorted(tuple(p) for p in self.points.tolist())
        return "\n".join(" ".join(str(c) for c in p) for p in lines) + "\n"

    @classmethod
    def from_text(cls, text):
        pts = [tuple(int(c) for c in line.split())
               for line in text.strip().splitlines() if line.strip()]
        return cls(np.array(pts, dtype=np.int64))


def _encode(points, lo, strides):
    return (points - lo) @ strides


def _membership_tools(points, margin):
    """Encoder + sorted code table for O(log n) membership of shifted copies."""
    lo = points.min(axis=0) - margin - 1
    hi = points.max(axis=0) + margin + 1
    spans = (hi - lo + 1).astype(np.int64)
    strides = np.ones(points.shape[1], dtype=np.int64)
    for i in range(points.shape[1] - 2, -1, -1):
        strides[i] = strides[i + 1] * spans[i + 1]
    codes = np.sort(_encode(points, lo, strides))
    return lo, strides, codes


def cut_counts(x: Configuration, potential: Potential):
    """#{x in X : x + v not in X} for every v in the support."""
    pts = x.points
    out = {}
    if len(pts) == 0:
        return {v: 0 for v in potential.support}
    margin = max(max(abs(c) for c in v) for v in potential.support)
    lo, strides, codes = _membership_tools(pts, margin)
    for v in potential.support:
        shifted = _encode(pts + np.asarray(v, dtype=np.int64), lo, strides)
        idx = np.searchsorted(codes, shifted)
        idx = np.clip(idx, 0, len(codes) - 1)
        present = codes[idx] == shifted
        out[v] = int(len(pts) - present.sum())
    return out


def total_energy(x: Configuration, potential: Potential):
    """Pairwise interaction energy sum_{x} sum_{x' != x} V(x' - x)."""
    cuts = cut_counts(x, potential)
    n = x.size
    return float(sum(w * (n - cuts[v]) for v, w in potential.atoms.items()))


def bulk_constant(potential: Potential):
    return float(sum(potential.atoms.values()))


def surface_energy(x: Configuration, potential: Potential):
    """Surface energy; sign handled per the potential's convention."""
    cuts = cut_counts(x, potential)
    sign = -1.0 if potential.convention == "crystal" else 1.0
    return float(sign * sum(w * cuts[v] for v, w in potential.atoms.items()))


def channels_for_direction(v):
    """All sublattice channels (v, tau) with canonical representatives."""
    info = intlattice.kernel_sublattice(v)
    d = len(v)
    cols = [list(row) for row in zip(*info.basis, v)] if d > 1 else [[v[0]]]
    reps = sorted(intlattice.reduce_mod_cell(r, cols) for r in info.reps)
    return [SublatticeChannel(tuple(v), tau) for tau in reps], cols


def split_surface_energy(x: Configuration, potential: Potential,
                         channel: SublatticeChannel):
    """Per-channel energy  -V(v) * #{x in tau + Lambda_v : x + v not in X}.

    In the signed convention the global sign flips along with
    ``surface_energy`` so that the splitting identity holds verbatim.
    """
    v = tuple(int(c) for c in channel.v)
    w = potential.weight(v)
    if w == 0.0:
        raise ChannelNotInSupport(f"V({v}) = 0")
    _, cols = channels_for_direction(v)
    target = tuple(channel.tau)
    pts = x.as_set()
    count = 0
    varr = np.asarray(v, dtype=np.int64)
    for p in x.points:
        if intlattice.reduce_mod_cell(tuple(p), cols) != target:
            continue
        if tuple(p + varr) not in pts:
            count += 1
    sign = -1.0 if potential.convention == "crystal" else 1.0
    return float(sign * w * count)


def phi_V(nu, potential: Potential, basis=None):
    """Limit anisotropy of the rescaled surface energies.

    crystal + positive_part:  (1/det L) sum |V(v)| <v, nu>_+
    signed:                    sum V(v) <v, nu>_+   (det factor omitted)
    ``abs`` mode replaces the positive part by |<v, nu>|.
    """
    nu = np.asarray(nu, dtype=float)
    if np.linalg.norm(nu) == 0:
        raise ZeroDirection("phi_V needs a nonzero direction")
    det = 1.0
    if basis is not None and potential.convention == "crystal":
        det = abs(np.linalg.det(np.asarray(basis, dtype=float)))
    total = 0.0
    for v, w in potential.atoms.items():
        s = float(np.dot(v, nu))
        s = abs(s) if potential.mode == "abs" else max(s, 0.0)
        total += (abs(w) if potential.convention == "crystal" else w) * s
    return total / det


def perimeter_P_V(e: ConvexPolytope, potential: Potential, basis=None):
    """Anisotropic perimeter: facet sum of phi_V(normal) * area."""
    m = polytope_measure(e)
    return float(sum(phi_V(n, potential, basis) * a for n, a in m["facets"]))


def symmetrize(potential: Potential):
    """v -> (V(v) + V(-v)) / 2 on the symmetrized support."""
    sym = {}
    for v in set(potential.support) | {tuple(-c for c in v)
                                       for v in potential.support}:
        neg = tuple(-c for c in v)
        sym[v] = 0.5 * (potential.weight(v) + potential.weight(neg))
    sym = {v: w for v, w in sym.items() if w != 0}
    return Potential(sym, potential.convention, potential.mode)


def transform_by_map(potential: Potential, x: Configuration, m):
    """Pull back (V, X) through an integer matrix M: returns (V∘M, M^{-1}X).

    Requires M^{-1} to act integrally on the support and the configuration.
    """
    m_int = [[int(c) for c in row] for row in np.asarray(m)]
    det = intlattice.det_exact(m_int)
    if det == 0:
        raise SingularMap("map is singular")
    adj = intlattice.adjugate(m_int)

    def pull(vec):
        out = []
        for i in range(len(vec)):
            a = sum(adj[i][j] * int(vec[j]) for j in range(len(vec)))
            if a % det != 0:
                raise SingularMap(f"{tuple(vec)} not in M Z^d")
            out.append(a // det)
        return tuple(out)

    atoms = {pull(v): w for v, w in potential.atoms.items()}
    new_pot = Potential(atoms, potential.convention, potential.mode)
    new_pts = np.array([pull(p) for p in x.points], dtype=np.int64) \
        if x.size else x.points.copy()
    return new_pot, Configuration(new_pts)


def lattice_points_in_polytope(poly: ConvexPolytope, scale=1.0):
    """Integer points of ``scale * poly`` under the half-open boundary rule.

    Facets whose outward normal is lexicographically positive are open,
    the others closed, so axis-aligned boxes [0, L)^d get exact counts.
    """
    body = poly.scale(scale) if scale != 1.0 else poly
    lo = np.floor(body.vertices.min(axis=0)).astype(np.int64) - 1
    hi = np.ceil(body.vertices.max(axis=0)).astype(np.int64) + 1
    axes = [np.arange(lo[i], hi[i] + 1) for i in range(body.dim)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    pts = grid.reshape(-1, body.dim).astype(np.int64)
    keep = np.ones(len(pts), dtype=bool)
    for normal, offset in body.facets:
        s = pts @ normal
        lexpos = next((c > 0 for c in normal if abs(c) > 1e-12), False)
        if lexpos:
            keep &= s < offset - 1e-9
        else:
            keep &= s <= offset + 1e-9
    return pts[keep]


@dataclass
class RecoveryResult:
    configuration: Configuration
    raw_count: int
    correction: int
    bound_constant: float


def recovery_configuration(e: ConvexPolytope, n: int):
    """Discrete recovery of a unit-volume body with exactly n points.

    Intersects the rescaled body with Z^d (half-open rule) and corrects the
    count with a quasi-cubic cluster grown outward, or carved inward, at the
    lexicographically smallest boundary cell.
    """
    d = e.dim
    vol = polytope_measure(e)["volume"]
    if abs(vol - 1.0) > 1e-6:
        raise EnergyError(f"recovery needs |E| = 1, got {vol}")
    if n < 1:
        raise InfeasibleCount("n must be positive")
    shift = -e.vertices.min(axis=0)
    body = e.translate(shift)
    scale = n ** (1.0 / d)
    pts = lattice_points_in_polytope(body, scale)
    raw = len(pts)
    k = raw - n
    if raw == 0 or k >= raw:
        raise InfeasibleCount(f"n = {n} below the feasible threshold")

    boundary_area = sum(a for _, a in polytope_measure(e)["facets"])
    if k != 0:
        pts = _apply_cluster_correction(pts, k)
    const = abs(k) / max(boundary_area * n ** ((d - 1) / d), 1e-12)
    return RecoveryResult(Configuration(pts), raw, abs(k), const)


def _apply_cluster_correction(pts, k):
    """Add (k < 0) or remove (k > 0) |k| points as a quasi-cube at the anchor.

    Anchor = lexicographically smallest boundary cell; candidates are ordered
    by Chebyshev distance from the anchor, then lexicographically.
    """
    d = pts.shape[1]
    lo, strides, codes = _membership_tools(pts, 1)
    on_boundary = np.zeros(len(pts), dtype=bool)
    for i in range(d):
        for sign in (1, -1):
            shift = np.zeros(d, dtype=np.int64)
            shift[i] = sign
            enc = _encode(pts + shift, lo, strides)
            idx = np.clip(np.searchsorted(codes, enc), 0, len(codes) - 1)
            on_boundary |= codes[idx] != enc
    border = pts[on_boundary]
    border = border[np.lexsort(tuple(border[:, i] for i in range(d - 1, -1, -1)))]
    anchor = border[0].astype(np.int64)
    cells = set(map(tuple, pts.tolist()))

    removing = k > 0
    need = abs(k)
    chosen = []
    radius = 0
    while len(chosen) < need:
        radius += 1
        lo = anchor - radius
        hi = anchor + radius
        axes = [np.arange(lo[i], hi[i] + 1) for i in range(d)]
        ball = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, d)
        cheb = np.abs(ball - anchor).max(axis=1)
        order = np.lexsort(tuple(ball[:, i] for i in range(d - 1, -1, -1)))
        ball = ball[order]
        cheb = cheb[order]
        ball = ball[np.argsort(cheb, kind="stable")]
        chosen = []
        for p in map(tuple, ball.tolist()):
            inside = p in cells
            if removing == inside:
                chosen.append(p)
                if len(chosen) == need:
                    break
    if removing:
        cells -= set(chosen)
    else:
        cells |= set(chosen)
    return np.array(sorted(cells), dtype=np.int64)


def cube_perimeter(x: Configuration):
    """Standard perimeter of the union of unit cubes centered on X (E_1 scale)."""
    d = x.dim
    atoms = {}
    for i in range(d):
        e = [0] * d
        e[i] = 1
        atoms[tuple(e)] = -1.0
        atoms[tuple(-c for c in e)] = -1.0
    cuts = cut_counts(x, Potential(atoms))
    return float(sum(cuts.values()))


@dataclass
class PerimeterBoundReport:
    constant: float
    holds: bool
    perimeter: float
    energy: float
    coeff_bound: int
    weight_floor: float


def perimeter_bound(x: Configuration, potential: Potential):
    """Combinatorial bound  P(E_1(X)) <= K F(X)  with K = 2 d A / c.

    A bounds the integer coefficients expressing the unit vectors over the
    support (first unimodular d-subset in lexicographic order when one
    exists, Hermite expansion otherwise), c is the smallest |V| among the
    support vectors actually used.
    """
    if potential.convention != "crystal":
        raise EnergyError("perimeter_bound applies to the crystal convention")
    support = list(potential.support)
    d = potential.dim
    red = intlattice.lattice_reduce(support)
    if red.rank < d or round(red.det) != 1:
        raise SpanDeficient(
            f"span_Z N has rank {red.rank}, covolume {red.det}")

    basis = _first_unimodular_subset(support, d)
    coeffs = []
    if basis is not None:
        adj = intlattice.adjugate([list(r) for r in zip(*basis)])
        det = intlattice.det_exact([list(r) for r in zip(*basis)])
        for i in range(d):
            e = [0] * d
            e[i] = 1
            col = [sum(adj[r][j] * e[j] for j in range(d)) // det
                   for r in range(d)]
            coeffs.append({basis[r]: col[r] for r in range(d)})
    else:
        for i in range(d):
            e = [0] * d
            e[i] = 1
            expansion = intlattice.expand_over(tuple(e), support)
            coeffs.append({support[j]: expansion[j]
                           for j in range(len(support))})

    used = {v for row in coeffs for v, a in row.items() if a != 0}
    a_max = max(abs(a) for row in coeffs for a in row.values())
    c_min = min(-potential.atoms[v] for v in used)
    if c_min <= 0:
        raise EnergyError("a used support vector has zero weight")
    constant = 2.0 * d * a_max / c_min
    per = cube_perimeter(x)
    energy = surface_energy(x, potential)
    return PerimeterBoundReport(constant, per <= constant * energy + 1e-9,
                                per, energy, a_max, c_min)


def _first_unimodular_subset(support, d):
    from itertools import combinations
    for combo in combinations(sorted(support), d):
        mat = [list(r) for r in zip(*combo)]
        if abs(intlattice.det_exact(mat)) == 1:
            return list(combo)
    return None


@dataclass
class StructureReport:
    span_rank: int
    span_covolume: float
    spans_ambient: bool
    plus_connected: bool
    unreachable: tuple
    path_overlap_constant: int
    stability_constant: float
    probe_ratios: tuple
    condition_holds: bool


def potential_structure(potential: Potential, probes=(), epsilon=1.0):
    """Structural diagnostics for a signed potential.

    Reports the span of the support, whether N_- ∪ {0} is connected by
    N_+ steps, the path-overlap constant C1 with C_V = C1 * inf V_+, and an
    empirical check of  F_V(X) >= eps * F_{1_N}(X)  on the probes.  All
    findings are report fields; nothing raises.
    """
    if potential.convention != "signed":
        raise EnergyError("potential_structure applies to signed potentials")
    n_plus = sorted(potential.positive_part())
    n_minus = sorted(potential.negative_part())
    red = intlattice.lattice_reduce(potential.support)
    d = potential.dim
    spans = red.rank == d and round(red.det) == 1

    connected, unreachable, c1 = _plus_connectivity(n_plus, n_minus, d)
    inf_vplus = min(potential.positive_part().values()) if n_plus else 0.0
    c_v = float(c1 * inf_vplus) if connected and n_plus else float("nan")

    ones = Potential({v: 1.0 for v in potential.support}, "signed",
                     potential.mode)
    ratios = []
    ok = True
    for probe in probes:
        fv = surface_energy(probe, potential)
        f1 = surface_energy(probe, ones)
        ratios.append((fv, f1))
        if fv < epsilon * f1 - 1e-9:
            ok = False
    return StructureReport(red.rank, red.det, spans, connected,
                           tuple(unreachable), c1, c_v, tuple(ratios), ok)


def _plus_connectivity(n_plus, n_minus, d):
    """BFS over N_- ∪ {0} with steps in N_+, plus the path-overlap constant.

    Paths realizing each v in N_- are shortest N_+ walks through the ambient
    lattice; C1 counts the worst per-direction step reuse over all assigned
    paths (single-step paths for v in N_+ included).
    """
    targets = set(n_minus) | {tuple([0] * d)}
    start = tuple([0] * d)
    if not n_plus:
        return len(n_minus) == 0, tuple(sorted(n_minus)), 1

    # connectivity of N_- ∪ {0} through N_+ steps *within the set*
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for p in frontier:
            for s in n_plus:
                q = tuple(np.add(p, s))
                if q in targets and q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    unreachable = sorted(targets - seen)
    connected = not unreachable

    # lattice paths 0 -> v for v in N_- (BFS in span of N_+), for C1
    step_use = {s: 0 for s in n_plus}
    for s in n_plus:
        step_use[s] += 1  # the single-step path assigned to each N_+ bond
    reachable_paths = True
    for v in n_minus:
        path = _bfs_path(v, n_plus, d)
        if path is None:
            reachable_paths = False
            continue
        for s in path:
            step_use[s] += 1
    c1 = max(step_use.values()) if step_use else 1
    return connected and reachable_paths, unreachable, c1


def _bfs_path(target, steps, d, limit=200000):
    from collections import deque
    start = tuple([0] * d)
    if target == start:
        return []
    prev = {start: None}
    queue = deque([start])
    while queue and len(prev) < limit:
        p = queue.popleft()
        for s in steps:
            q = tuple(np.add(p, s))
            if q in prev or any(abs(c) > 4 * max(map(abs, target), default=1) + 4
                                for c in q):
                continue
            prev[q] = (p, s)
            if q == target:
                path = []
                cur = q
                while prev[cur] is not None:
                    cur, step = prev[cur]
                    path.append(step)
                return path[::-1]
            queue.append(q)
    return None
