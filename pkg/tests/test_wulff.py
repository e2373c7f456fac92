import math

import numpy as np
import pytest

from wulffgrid.energy import Potential
from wulffgrid.geom.polytope import (convex_hull, hausdorff_distance,
                                     minkowski_sum)
from wulffgrid.wulff import (
    AXIS_VECTORS, FCC_VECTORS, Degenerate, MixedSigns, SupportFunction,
    classify_shape, fcc_minus_axes, icosahedral_family,
    icosahedron_edge_midpoints, icosahedron_vertices, parameter_scan,
    positivity_check, pyritohedron_family, signed_wulff, wulff_from_halfspaces,
    zonotope_of,
)


def test_zonotope_square():
    v = Potential({(1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1},
                  convention="signed")
    z = zonotope_of(v)
    expected = convex_hull([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    assert hausdorff_distance(z.body, expected) < 1e-12
    assert not z.degenerate


def test_zonotope_single_atom_degenerate():
    z = zonotope_of(SupportFunction.make([((1.0, 0.0), 1.0)]))
    assert z.degenerate
    assert sorted(map(tuple, z.body.vertices.tolist())) == [
        (0.0, 0.0), (1.0, 0.0)]


def test_zonotope_fcc_support():
    v = Potential({w: 1.0 for w in FCC_VECTORS}, convention="signed")
    z = zonotope_of(v)
    assert z.body.support((1, 0, 0)) == pytest.approx(4.0)
    cls = classify_shape(z)
    assert cls.zonotope
    # 12 fcc generators pair into 6 segments: the truncated octahedron
    assert (cls.n_vertices, cls.n_edges, cls.n_facets) == (24, 36, 14)


def test_zonotope_planar_in_3d_is_degenerate():
    z = zonotope_of(SupportFunction.make(
        [((1.0, 0.0, 0.0), 1.0), ((0.0, 1.0, 0.0), 1.0)], mode="abs"))
    assert z.degenerate
    assert z.body.n_vertices == 4  # a parallelogram inside a plane
    assert z.body.support((1, 0, 0)) == pytest.approx(1.0)
    assert z.body.support((0, 0, 1)) == pytest.approx(0.0, abs=1e-12)


def test_zonotope_mixed_signs_raises():
    with pytest.raises(MixedSigns):
        zonotope_of(SupportFunction.make([((1.0, 0.0), 1.0),
                                          ((0.0, 1.0), -1.0)]))


def test_signed_wulff_no_negative_part_is_zonotope():
    v = Potential({(1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1},
                  convention="signed")
    w = signed_wulff(v)
    assert hausdorff_distance(w.body, zonotope_of(v).body) < 1e-12


def test_signed_wulff_octahedron():
    w = signed_wulff(fcc_minus_axes(0.75))
    expected = convex_hull([(3, 0, 0), (-3, 0, 0), (0, 3, 0), (0, -3, 0),
                            (0, 0, 3), (0, 0, -3)])
    assert hausdorff_distance(w.body, expected) < 1e-9
    cls = classify_shape(w)
    assert cls.label == "octahedron"
    assert cls.centrally_symmetric and not cls.zonotope


def test_signed_wulff_degenerate_below_half():
    w = signed_wulff(fcc_minus_axes(0.4))
    assert w.empty and w.degenerate
    with pytest.raises(Degenerate):
        classify_shape(w)


def test_positivity_examples():
    p = positivity_check(SupportFunction.make(
        [((1, 0), 1.0), ((-1, 0), 1.0), ((0, 1), 1.0), ((0, -1), 1.0)]))
    assert p.min_value == pytest.approx(1.0)
    assert max(abs(c) for c in p.argmin) == pytest.approx(1.0)

    p = positivity_check(fcc_minus_axes(0.5))
    assert p.min_value == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(np.abs(p.argmin), 1 / math.sqrt(3), atol=1e-9)

    # sorted-coordinate closed form: (8c-2) a + (4c-2) b - 2 c3
    rng = np.random.default_rng(8)
    for c in (0.55, 0.75, 1.1):
        phi = SupportFunction.from_potential(fcc_minus_axes(c))
        for _ in range(50):
            nu = rng.normal(size=3)
            a, b, c3 = sorted(np.abs(nu), reverse=True)
            assert phi(nu) == pytest.approx(
                (8 * c - 2) * a + (4 * c - 2) * b - 2 * c3, rel=1e-12)

    pos = SupportFunction.make([(np.array([1.0, 0, 0]), 1.0),
                                ((0.0, 1.0, 0.0), 2.0)], mode="abs")
    assert positivity_check(pos).min_value == pytest.approx(0.0, abs=1e-12)


def test_classify_examples():
    cube = zonotope_of(SupportFunction.make(
        [((1, 0, 0), 1.0), ((0, 1, 0), 1.0), ((0, 0, 1), 1.0)], mode="abs"))
    cls = classify_shape(cube)
    assert cls.label == "cube" and cls.zonotope and cls.centrally_symmetric

    hexagon = zonotope_of(SupportFunction.make(
        [((1, 0), 1.0), ((0, 1), 1.0), ((1, 1), 1.0)], mode="abs"))
    cls = classify_shape(hexagon)
    assert cls.n_vertices == 6 and cls.zonotope


def test_sum_law_random():
    rng = np.random.default_rng(5)
    for d in (2, 3):
        for _ in range(6):
            a1 = [(rng.normal(size=d), float(rng.uniform(0.2, 2)))
                  for _ in range(4)]
            a2 = [(rng.normal(size=d), float(rng.uniform(0.2, 2)))
                  for _ in range(4)]
            p1 = SupportFunction.make(a1, "abs")
            p2 = SupportFunction.make(a2, "abs")
            lhs = zonotope_of(p1 + p2).body
            rhs = minkowski_sum(zonotope_of(p1).body, zonotope_of(p2).body)
            assert hausdorff_distance(lhs, rhs) < 1e-9


def test_difference_consistency_and_support():
    # signed_wulff, the halfspace oracle, and the support inequality agree
    rng = np.random.default_rng(6)
    tried = 0
    while tried < 8:
        atoms = [(rng.normal(size=3), float(rng.uniform(0.5, 1.5)))
                 for _ in range(5)]
        atoms += [(rng.normal(size=3), -float(rng.uniform(0.05, 0.2)))
                  for _ in range(2)]
        phi = SupportFunction.make(atoms, "abs")
        w = signed_wulff(phi)  # cross-validates internally
        if w.empty or w.degenerate:
            continue
        tried += 1
        for v, _ in phi.atoms:
            assert w.body.support(v) <= phi(v) + 1e-9
        for n, _ in w.body.facets:
            assert w.body.support(n) == pytest.approx(phi(n), abs=1e-9)


def test_scale_equivariance():
    phi = SupportFunction.from_potential(fcc_minus_axes(0.75))
    w1 = signed_wulff(phi)
    w2 = signed_wulff(phi.scaled(2.5))
    assert hausdorff_distance(w2.body, w1.body.scale(2.5)) < 1e-9


def test_parameter_scan_fcc():
    scan = parameter_scan(fcc_minus_axes, np.arange(0.30, 1.2001, 0.05),
                          claimed=(0.25, 0.5))
    octa = scan.intervals.get("octahedron")
    assert octa is not None
    assert octa[0] <= 0.75 <= octa[1]
    assert scan.claimed == (0.25, 0.5)
    by_c = {round(r.c, 2): r for r in scan.rows}
    assert by_c[0.40].degenerate
    assert by_c[0.75].label == "octahedron"
    assert not by_c[1.15].zonotope


def test_pyritohedron_family_pentagons():
    w = signed_wulff(pyritohedron_family(0.22), cross_validate=False)
    cls = classify_shape(w)
    assert cls.facet_sizes.count(5) == 12
    # vertex pattern (a,a,a) x8 and cyc(0, 3a/4, 3a/2) x12, the pyritohedron
    verts = np.round(np.abs(w.body.vertices), 6)
    patterns = {tuple(sorted(v)) for v in verts.tolist()}
    assert len(patterns) == 2
    cubic = max(patterns, key=lambda p: p[0])
    zero = min(patterns, key=lambda p: p[0])
    a = cubic[0]
    assert cubic == pytest.approx((a, a, a))
    assert zero == pytest.approx((0.0, 0.75 * a, 1.5 * a), abs=1e-5)


def test_icosahedral_family_dodecahedron():
    phi = icosahedral_family(5.0 / 6.0)
    w = signed_wulff(phi, cross_validate=False)
    cls = classify_shape(w)
    assert cls.facet_sizes == tuple([5] * 12)
    # regular: all edge lengths equal
    verts = w.body.vertices
    lens = {round(float(np.linalg.norm(verts[i] - verts[j])), 6)
            for i, j in w.body.edges}
    assert len(lens) == 1
    assert len(icosahedron_vertices()) == 12
    assert len(icosahedron_edge_midpoints()) == 30


def test_halfspace_oracle_matches():
    phi = SupportFunction.from_potential(fcc_minus_axes(0.75))
    dirs = [np.array(v, float) for v in FCC_VECTORS + AXIS_VECTORS]
    dirs += [np.array([a, b, c], float) for a in (-1, 1) for b in (-1, 1)
             for c in (-1, 1)]
    oracle = wulff_from_halfspaces(phi, dirs)
    assert hausdorff_distance(oracle.body, signed_wulff(phi).body) < 1e-9
