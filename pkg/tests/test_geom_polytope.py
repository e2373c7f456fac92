import numpy as np
import pytest

from wulffgrid.geom.polytope import (
    ConvexPolytope, DegenerateHull, Empty, Unbounded, closedness_defect,
    convex_hull, dist_point_polytope, halfspace_intersection,
    hausdorff_distance, hull_any_rank, minkowski_diff_segment, minkowski_sum,
    polytope_measure, segment,
)


def square(a=1.0):
    return convex_hull([(0, 0), (a, 0), (a, a), (0, a)])


def test_hull_drops_interior_point():
    p = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1), (0.5, 0.5)])
    assert p.n_vertices == 4
    assert sorted(map(tuple, p.vertices.tolist())) == [
        (0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]


def test_cube_combinatorics():
    cube = convex_hull([(x, y, z) for x in (0, 1) for y in (0, 1)
                        for z in (0, 1)])
    assert (cube.n_vertices, cube.n_edges, cube.n_facets) == (8, 12, 6)
    m = polytope_measure(cube)
    assert m["volume"] == pytest.approx(1.0, abs=1e-12)


def test_circle_points_all_extreme():
    rng = np.random.default_rng(7)
    th = np.sort(rng.uniform(0, 2 * np.pi, 50))
    pts = np.c_[np.cos(th), np.sin(th)]
    hull = convex_hull(pts)
    assert hull.n_vertices == 50
    # oracle: every input point is extreme (outside the hull of the others)
    for i in range(50):
        others = convex_hull(np.delete(pts, i, axis=0))
        assert not others.contains(pts[i], tol=-1e-12)


def test_degenerate_hull_raises():
    with pytest.raises(DegenerateHull):
        convex_hull([(0, 0), (1, 1), (2, 2)])


def test_halfspace_square():
    p = halfspace_intersection([((1, 0), 1), ((-1, 0), 1),
                                ((0, 1), 1), ((0, -1), 1)])
    assert hausdorff_distance(p, convex_hull([(-1, -1), (1, -1), (1, 1),
                                              (-1, 1)])) < 1e-12


def test_halfspace_octahedron_vertex_oracle():
    hs = [(np.array(s, float), 3.0)
          for s in [(a, b, c) for a in (-1, 1) for b in (-1, 1)
                    for c in (-1, 1)]]
    octa = halfspace_intersection(hs)
    # oracle: enumerate vertices by solving 3x3 systems of active constraints
    from itertools import combinations
    cand = []
    normals = np.array([h[0] / np.linalg.norm(h[0]) for h in hs])
    offs = np.array([3.0 / np.linalg.norm(h[0]) for h in hs])
    for idx in combinations(range(8), 3):
        a = normals[list(idx)]
        if abs(np.linalg.det(a)) < 1e-9:
            continue
        x = np.linalg.solve(a, offs[list(idx)])
        if np.all(normals @ x <= offs + 1e-9):
            cand.append(tuple(np.round(x, 9)))
    expected = sorted(set(cand))
    got = sorted(map(tuple, np.round(octa.vertices, 9).tolist()))
    assert len(got) == 6
    assert got == expected
    m = polytope_measure(octa)
    assert m["volume"] == pytest.approx(36.0, rel=1e-9)
    for _, area in m["facets"]:
        assert area == pytest.approx(9 * np.sqrt(3) / 2, rel=1e-9)


def test_halfspace_empty_and_unbounded():
    with pytest.raises(Empty):
        halfspace_intersection([((1, 0), 1), ((-1, 0), -2),
                                ((0, 1), 1), ((0, -1), 1)])
    with pytest.raises(Unbounded):
        halfspace_intersection([((1, 0), 1), ((0, 1), 1)])


def test_halfspace_bounding_box_truncates():
    p = halfspace_intersection([((1.0, 0.0), 0.25)],
                               bounding_box=((-1, -1), (1, 1)))
    expected = convex_hull([(-1, -1), (0.25, -1), (0.25, 1), (-1, 1)])
    assert hausdorff_distance(p, expected) < 1e-9


def test_minkowski_sum_examples():
    sq = convex_hull([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    ident = minkowski_sum(sq, hull_any_rank([(0.0, 0.0)]))
    assert hausdorff_distance(ident, sq) < 1e-12

    s = minkowski_sum(segment((-1, 0), (1, 0)), segment((0, -1), (0, 1)))
    assert hausdorff_distance(s, sq) < 1e-12

    hexa = minkowski_sum(s, segment((-1, -1), (1, 1)))
    expected = convex_hull([(2, 2), (2, 0), (0, -2), (-2, -2), (-2, 0),
                            (0, 2)])
    assert hausdorff_distance(hexa, expected) < 1e-12
    # oracle: hull of all 8 signed generator corner sums
    corners = []
    for s1 in (-1, 1):
        for s2 in (-1, 1):
            for s3 in (-1, 1):
                corners.append((s1 + s3, s2 + s3))
    assert hausdorff_distance(hexa, convex_hull(corners)) < 1e-12


def test_minkowski_sum_support_additive():
    rng = np.random.default_rng(3)
    for d in (2, 3):
        p = convex_hull(rng.normal(size=(12, d)))
        q = convex_hull(rng.normal(size=(12, d)))
        s = minkowski_sum(p, q)
        for n, _ in s.facets:
            assert s.support(n) == pytest.approx(
                p.support(n) + q.support(n), abs=1e-9)


def test_minkowski_diff_segment():
    sq = convex_hull([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    d = minkowski_diff_segment(sq, (0.5, 0))
    expected = convex_hull([(-0.5, -1), (0.5, -1), (0.5, 1), (-0.5, 1)])
    assert hausdorff_distance(d, expected) < 1e-9
    assert hausdorff_distance(minkowski_diff_segment(sq, (0, 0)), sq) < 1e-12
    assert minkowski_diff_segment(sq, (2, 0)) is None


def test_minkowski_diff_inverse_bound():
    rng = np.random.default_rng(5)
    for _ in range(20):
        p = convex_hull(rng.normal(size=(10, 2)) * 2)
        v = rng.normal(size=2) * 0.3
        d = minkowski_diff_segment(p, v)
        if d is None or d.degenerate:
            continue
        back = minkowski_sum(d, segment(-v, v))
        for w in back.vertices:
            assert p.contains(w, tol=1e-9)


def test_zonotope_volume_formula():
    # volume = sum over d-subsets of |det| of generators (McMullen)
    rng = np.random.default_rng(11)
    from itertools import combinations
    for d in (2, 3):
        gens = rng.normal(size=(5, d))
        body = hull_any_rank([np.zeros(d)])
        for g in gens:
            body = minkowski_sum(body, segment(np.zeros(d), g))
        expected = sum(abs(np.linalg.det(np.array(c)))
                       for c in combinations(gens, d))
        assert polytope_measure(body)["volume"] == pytest.approx(
            expected, rel=1e-9)


def test_roundtrip_and_closedness_random():
    rng = np.random.default_rng(2)
    for d in (2, 3):
        for _ in range(10):
            p = convex_hull(rng.normal(size=(14, d)))
            q = halfspace_intersection(p.facets)
            assert hausdorff_distance(p, q) < 1e-9
            assert closedness_defect(p) < 1e-9


def test_degenerate_segment_and_distance():
    s = segment((0, 0, 0), (1, 0, 0))
    assert s.degenerate
    assert dist_point_polytope((0.5, 1, 0), s) == pytest.approx(1.0)
    cube = convex_hull([(x, y, z) for x in (0, 1) for y in (0, 1)
                        for z in (0, 1)])
    assert dist_point_polytope((2, 0.5, 0.5), cube) == pytest.approx(1.0)
    assert dist_point_polytope((2, 2, 2), cube) == pytest.approx(np.sqrt(3))
    assert dist_point_polytope((0.5, 0.5, 0.5), cube) == 0.0
