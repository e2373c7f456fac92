"""Convex polytope kernel for dimensions 2 and 3.

Polytopes carry both a vertex description and a facet (outward unit normal,
offset) description, cross-validated at construction.  Orderings are
deterministic throughout: 2D vertices run counterclockwise from the
lexicographic minimum, 3D vertices are sorted lexicographically and facets by
their normals, so repeated runs produce identical output files.

Degenerate (lower-dimensional) bodies are representable: they keep their
vertex set, have no facet description, and answer ``degenerate == True``.
Only full-dimensional polytopes support measures and halfspace queries.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull as _QhullHull
from scipy.spatial import HalfspaceIntersection as _QhullHSI
from scipy.spatial import QhullError

TOL = 1e-9


class GeometryError(Exception):
    pass


class DegenerateHull(GeometryError):
    """Input points are not full-dimensional."""


class Unbounded(GeometryError):
    """Halfspace intersection has a recession direction."""


class Empty(GeometryError):
    """Halfspace intersection is infeasible."""


class DimensionMismatch(GeometryError):
    pass


@dataclass(frozen=True)
class Hyperplane:
    """Oriented hyperplane {x : <normal, x> = offset} with |normal| = 1."""
    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        norm = np.linalg.norm(n)
        if abs(norm - 1.0) > 1e-12:
            if norm == 0:
                raise GeometryError("zero normal")
            object.__setattr__(self, "normal", n / norm)
            object.__setattr__(self, "offset", float(self.offset) / norm)
        else:
            object.__setattr__(self, "normal", n)
            object.__setattr__(self, "offset", float(self.offset))


@dataclass
class ConvexPolytope:
    """Bounded convex body with vertex and halfspace descriptions.

    vertices: (n, d) array in canonical order.
    facets:   list of (unit outward normal, offset) pairs.
    faces:    per-facet vertex index loops (d=3) or edge pairs (d=2).
    """
    vertices: np.ndarray
    facets: list = field(default_factory=list)
    faces: list = field(default_factory=list)
    degenerate: bool = False

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_facets(self):
        return len(self.facets)

    @property
    def edges(self):
        """Sorted list of vertex index pairs forming 1-faces."""
        if self.dim == 2:
            return sorted(tuple(sorted(f)) for f in self.faces)
        seen = set()
        for loop in self.faces:
            m = len(loop)
            for i in range(m):
                seen.add(tuple(sorted((loop[i], loop[(i + 1) % m]))))
        return sorted(seen)

    @property
    def n_edges(self):
        return len(self.edges)

    def support(self, direction):
        """Support function h(direction) = max over vertices of the inner product."""
        return float(np.max(self.vertices @ np.asarray(direction, dtype=float)))

    def contains(self, point, tol=TOL):
        p = np.asarray(point, dtype=float)
        return all(float(n @ p) <= c + tol for n, c in self.facets)

    def translate(self, t):
        t = np.asarray(t, dtype=float)
        facets = [(n.copy(), c + float(n @ t)) for n, c in self.facets]
        return ConvexPolytope(self.vertices + t, facets,
                              [list(f) for f in self.faces], self.degenerate)

    def scale(self, lam):
        lam = float(lam)
        if lam <= 0:
            raise GeometryError("scale factor must be positive")
        facets = [(n.copy(), c * lam) for n, c in self.facets]
        return ConvexPolytope(self.vertices * lam, facets,
                              [list(f) for f in self.faces], self.degenerate)

    @property
    def volume(self):
        return polytope_measure(self)["volume"]

    def centroid(self):
        return self.vertices.mean(axis=0)


def _affine_rank(points, tol=1e-9):
    pts = np.asarray(points, dtype=float)
    if len(pts) <= 1:
        return 0
    q = pts - pts[0]
    s = np.linalg.svd(q, compute_uv=False)
    scale = max(1.0, s[0] if len(s) else 1.0)
    return int(np.sum(s > tol * scale))


def _dedupe(points, tol=1e-9):
    pts = np.asarray(points, dtype=float)
    order = np.lexsort(pts.T[::-1])
    out = []
    for i in order:
        if not out or np.linalg.norm(pts[i] - out[-1]) > tol:
            out.append(pts[i])
        # keep lexicographically first representative of a cluster
    return np.array(out)


def _hull2d(points):
    """Monotone chain; returns CCW vertices starting at the lex minimum."""
    pts = _dedupe(points)
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    scale = max(1.0, np.abs(pts).max())
    eps = 1e-12 * scale * scale
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= eps:
            lower.pop()
        lower.append(p)
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= eps:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def convex_hull(points):
    """Convex hull of points in R^2 or R^3 with full face data.

    Raises DegenerateHull when the points are not full-dimensional; use
    hull_any_rank when lower-dimensional hulls are a legitimate outcome.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise DimensionMismatch("convex_hull supports d in {2, 3}")
    d = pts.shape[1]
    if _affine_rank(pts) < d:
        raise DegenerateHull("points are not full-dimensional")
    if d == 2:
        verts = _hull2d(pts)
        return _polytope_from_ccw_polygon(verts)
    return _hull3d(pts)


def hull_any_rank(points):
    """Hull that tolerates lower-dimensional input (degenerate polytopes)."""
    pts = _dedupe(points)
    d = pts.shape[1]
    rank = _affine_rank(pts)
    if rank == d:
        return convex_hull(pts)
    if rank == 0:
        return ConvexPolytope(pts[:1], degenerate=True)
    base = pts[0]
    q = pts - base
    _, _, vt = np.linalg.svd(q, full_matrices=False)
    frame = vt[:rank]
    proj = q @ frame.T
    if rank == 1:
        lo, hi = np.argmin(proj[:, 0]), np.argmax(proj[:, 0])
        verts = _dedupe(pts[[lo, hi]])
        return ConvexPolytope(verts, degenerate=True)
    sub = _hull2d(proj)
    verts = base + sub @ frame
    return ConvexPolytope(_dedupe(verts), degenerate=True)


def _polytope_from_ccw_polygon(verts):
    n = len(verts)
    facets, faces = [], []
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        t = b - a
        normal = np.array([t[1], -t[0]])  # outward for CCW orientation
        normal /= np.linalg.norm(normal)
        facets.append((normal, float(normal @ a)))
        faces.append([i, (i + 1) % n])
    return ConvexPolytope(np.array(verts), facets, faces)


def _hull3d(pts):
    hull = _QhullHull(pts)
    vid = np.array(sorted(hull.vertices.tolist(),
                          key=lambda i: tuple(pts[i])))
    remap = {int(old): new for new, old in enumerate(vid)}
    verts = pts[vid]

    # merge coplanar triangles into facets via adjacency + equal normals
    nf = len(hull.simplices)
    eqs = hull.equations
    parent = list(range(nf))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    scale = max(1.0, np.abs(verts).max())
    for i in range(nf):
        for j in hull.neighbors[i]:
            if j < 0:
                continue
            if np.linalg.norm(eqs[i] - eqs[j]) < 1e-7 * scale:
                parent[find(i)] = find(int(j))

    groups = {}
    for i in range(nf):
        groups.setdefault(find(i), []).append(i)

    facets, faces = [], []
    for gid, simplices in groups.items():
        members = sorted({remap[int(v)] for s in simplices
                          for v in hull.simplices[s]})
        normal = eqs[gid][:3] / np.linalg.norm(eqs[gid][:3])
        pts_f = verts[members]
        center = pts_f.mean(axis=0)
        offset = float(normal @ center)
        # order the facet loop CCW when viewed from outside
        ref = pts_f[0] - center
        ref /= np.linalg.norm(ref)
        side = np.cross(normal, ref)
        ang = np.arctan2((pts_f - center) @ side, (pts_f - center) @ ref)
        loop = [m for _, m in sorted(zip(ang, members))]
        k = loop.index(min(loop))
        loop = loop[k:] + loop[:k]
        facets.append((normal, offset))
        faces.append(loop)

    order = sorted(range(len(facets)),
                   key=lambda i: (tuple(np.round(facets[i][0], 12)),
                                  round(facets[i][1], 12)))
    facets = [facets[i] for i in order]
    faces = [faces[i] for i in order]
    return ConvexPolytope(verts, facets, faces)


def segment(a, b):
    """The segment [a, b] as a (degenerate unless d=1) polytope."""
    return hull_any_rank(np.array([a, b], dtype=float))


def halfspace_intersection(halfspaces, bounding_box=None, tol=TOL):
    """Bounded intersection of halfspaces {x : <n, x> <= c}.

    halfspaces: iterable of Hyperplane or (normal, offset) pairs.
    Raises Unbounded if a recession direction exists (pass bounding_box to
    truncate), Empty if infeasible.  The result has redundant halfspaces
    removed since facets are recomputed from the vertex set.  A feasible
    intersection with empty interior is returned as a degenerate polytope
    with a witness point.
    """
    pairs = []
    for h in halfspaces:
        if isinstance(h, Hyperplane):
            pairs.append((h.normal, h.offset))
        else:
            n = np.asarray(h[0], dtype=float)
            norm = np.linalg.norm(n)
            if norm == 0:
                raise GeometryError("zero normal in halfspace list")
            pairs.append((n / norm, float(h[1]) / norm))
    if not pairs:
        raise Unbounded("no halfspaces")
    d = len(pairs[0][0])
    if bounding_box is not None:
        lo, hi = (np.asarray(b, dtype=float) for b in bounding_box)
        for i in range(d):
            e = np.zeros(d)
            e[i] = 1.0
            pairs.append((e.copy(), hi[i]))
            pairs.append((-e, -lo[i]))
    normals = np.array([p[0] for p in pairs])
    offsets = np.array([p[1] for p in pairs])

    # recession cone must be {0}: probe the 2d axis directions
    for i in range(d):
        for sign in (1.0, -1.0):
            c = np.zeros(d)
            c[i] = -sign
            res = linprog(c, A_ub=normals, b_ub=np.zeros(len(normals)),
                          bounds=[(-1, 1)] * d, method="highs")
            if res.status == 0 and -res.fun > 1e-7:
                raise Unbounded("recession direction exists; "
                                "supply a bounding box")

    # Chebyshev center: max r s.t. <n, x> + r <= c
    a_ub = np.hstack([normals, np.ones((len(normals), 1))])
    c_obj = np.zeros(d + 1)
    c_obj[-1] = -1.0
    res = linprog(c_obj, A_ub=a_ub, b_ub=offsets,
                  bounds=[(None, None)] * d + [(None, None)],
                  method="highs")
    if res.status != 0:
        raise Empty("infeasible halfspace system")
    x0, radius = res.x[:d], res.x[d]
    if radius < -tol:
        raise Empty("infeasible halfspace system")
    if radius < tol:
        return ConvexPolytope(np.array([x0]), degenerate=True)

    hsi = _QhullHSI(np.hstack([normals, -offsets[:, None]]), x0)
    return convex_hull(hsi.intersections)


def minkowski_sum(p, q):
    """Minkowski sum of two convex bodies (degenerate summands allowed)."""
    if p.dim != q.dim:
        raise DimensionMismatch("summands live in different dimensions")
    sums = (p.vertices[:, None, :] + q.vertices[None, :, :]).reshape(-1, p.dim)
    return hull_any_rank(sums)


def minkowski_diff_segment(p, v):
    """Minkowski difference  p - [-v, v]  =  (p + v) ∩ (p - v).

    Returns None when the difference is empty (a legitimate outcome, not an
    error).  Iterating over a zonotope's generators realizes subtraction of
    the whole zonotope.
    """
    v = np.asarray(v, dtype=float)
    if p.degenerate or not p.facets:
        raise GeometryError("minkowski_diff_segment needs a full-dim body")
    tightened = [(n, c - abs(float(n @ v))) for n, c in p.facets]
    try:
        return halfspace_intersection(tightened)
    except Empty:
        return None


def polytope_measure(p):
    """Volume and per-facet (normal, area) of a full-dimensional polytope."""
    if p.degenerate:
        return {"volume": 0.0, "facets": []}
    d = p.dim
    out = []
    vol = 0.0
    if d == 2:
        v = p.vertices
        n = len(v)
        for i in range(n):
            a, b = v[i], v[(i + 1) % n]
            vol += (a[0] * b[1] - b[0] * a[1]) / 2.0
            normal, _ = p.facets[i]
            out.append((normal, float(np.linalg.norm(b - a))))
        return {"volume": abs(vol), "facets": out}
    for (normal, offset), loop in zip(p.facets, p.faces):
        pts = p.vertices[loop]
        area = 0.0
        for i in range(1, len(pts) - 1):
            area += 0.5 * np.linalg.norm(
                np.cross(pts[i] - pts[0], pts[i + 1] - pts[0]))
        out.append((normal, float(area)))
        vol += offset * area / 3.0
    return {"volume": float(vol), "facets": out}


def _dist_point_segment(x, a, b):
    ab = b - a
    t = float(np.clip(np.dot(x - a, ab) / max(np.dot(ab, ab), 1e-300), 0, 1))
    return float(np.linalg.norm(x - (a + t * ab)))


def dist_point_polytope(x, p):
    """Euclidean distance from a point to a convex polytope (d <= 3)."""
    x = np.asarray(x, dtype=float)
    if not p.degenerate and p.contains(x, tol=0):
        return 0.0
    if p.dim == 2 or p.degenerate:
        verts = p.vertices
        n = len(verts)
        if n == 1:
            return float(np.linalg.norm(x - verts[0]))
        if p.degenerate:
            # distance to the vertex polyline hull (segments between extremes)
            return min(_dist_point_segment(x, verts[i], verts[j])
                       for i in range(n) for j in range(i + 1, n))
        return min(_dist_point_segment(x, verts[i], verts[(i + 1) % n])
                   for i in range(n))
    best = np.inf
    for (normal, offset), loop in zip(p.facets, p.faces):
        # project onto facet plane, then clamp into the polygon
        proj = x - (float(normal @ x) - offset) * normal
        pts = p.vertices[loop]
        center = pts.mean(axis=0)
        ref = pts[0] - center
        ref /= np.linalg.norm(ref)
        side = np.cross(normal, ref)
        u = np.array([(q - center) @ ref for q in pts])
        w = np.array([(q - center) @ side for q in pts])
        pu, pw = (proj - center) @ ref, (proj - center) @ side
        inside = True
        m = len(pts)
        for i in range(m):
            j = (i + 1) % m
            cr = (u[j] - u[i]) * (pw - w[i]) - (w[j] - w[i]) * (pu - u[i])
            if cr < 0:
                inside = False
                break
        if inside:
            best = min(best, float(np.linalg.norm(x - proj)))
        for i in range(m):
            best = min(best, _dist_point_segment(x, pts[i], pts[(i + 1) % m]))
    return float(best)


def hausdorff_distance(p, q):
    """Hausdorff distance between convex polytopes (exact on vertices)."""
    d1 = max(dist_point_polytope(v, q) for v in p.vertices)
    d2 = max(dist_point_polytope(v, p) for v in q.vertices)
    return max(d1, d2)


def closedness_defect(p):
    """|sum of area-weighted outward normals|; zero for a closed boundary."""
    m = polytope_measure(p)
    acc = np.zeros(p.dim)
    for normal, area in m["facets"]:
        acc += normal * area
    return float(np.linalg.norm(acc))
