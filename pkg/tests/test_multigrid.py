import math

import numpy as np
import pytest

from wulffgrid.multigrid import (
    Ball, Box, DegenerateTranslations, DetConditionViolated,
    GenericityViolation, MultigridSpec, affine_map_and_bound,
    dual_lattice_info, dual_points_in_region, intersection_point,
    max_tile_diameter, pentagrid, perturb, rail_families, seeded_translations,
    square_bigrid, step_along_line, tile_arrays, tile_of, tiling_records,
    validate_spec, verify_tiling,
)

PG = pentagrid(seed=11)
SB = square_bigrid()


def random_valid_spec(rng, n=None, d=2):
    while True:
        n_grids = n or int(rng.integers(d + 1, d + 3))
        if d == 2:
            angs = np.sort(rng.uniform(0, np.pi * 0.97, size=n_grids))
            gs = [(math.cos(a), math.sin(a)) for a in angs]
            es = [(math.cos(a + rng.uniform(-0.25, 0.25)),
                   math.sin(a + rng.uniform(-0.25, 0.25))) for a in angs]
        else:
            gs = [tuple(v) for v in rng.normal(size=(n_grids, 3))]
            es = gs
        spec = MultigridSpec(
            tuple(gs), tuple(seeded_translations(n_grids,
                                                 int(rng.integers(1 << 20)))),
            tuple(es))
        try:
            validate_spec(spec, probe_pairs=100, seed=3)
            return spec
        except (DetConditionViolated, DegenerateTranslations):
            continue


def test_validate_bigrid_and_pentagrid():
    rep = validate_spec(SB)
    assert rep.det_gram == pytest.approx(1.0, abs=1e-12)
    rep = validate_spec(PG)
    assert rep.det_gram == pytest.approx(6.25, abs=1e-12)
    assert rep.subset_sum == pytest.approx(6.25, abs=1e-12)
    assert abs(rep.det_gram - 5 * (math.sin(math.radians(72)) ** 2 +
                                   math.sin(math.radians(144)) ** 2)) < 1e-12


def test_detcond_violation():
    edges = list(PG.edges)
    edges[0] = tuple(-np.asarray(edges[0]))
    with pytest.raises(DetConditionViolated):
        validate_spec(MultigridSpec(PG.normals, PG.gammas, tuple(edges)))


def test_degenerate_translations():
    with pytest.raises(DegenerateTranslations):
        validate_spec(pentagrid(gammas=[0.0] * 5))
    fixed = perturb(pentagrid(gammas=[0.0] * 5), seed=5)
    validate_spec(fixed)


def test_affine_map_examples():
    amap, bound = affine_map_and_bound(square_bigrid(gammas=(0.0, 0.0)))
    assert np.allclose(amap.linear, np.eye(2), atol=1e-12)
    assert np.allclose(amap.offset, 0.0)
    _, bound = affine_map_and_bound(SB)
    assert bound == pytest.approx(math.sqrt(2) / 2)
    amap5, _ = affine_map_and_bound(PG)
    assert np.allclose(amap5.linear, 2.5 * np.eye(2), atol=1e-12)


def test_rail_families():
    rails = rail_families(PG)
    assert len(rails) == 5
    first = rails[0]
    assert first.subset == (0,)
    assert np.allclose(first.v, (0, 1), atol=1e-12)
    assert first.cell_measure == pytest.approx(1.0)

    rails_sb = rail_families(SB)
    assert {tuple(np.round(r.v, 9)) for r in rails_sb} == {(0.0, 1.0),
                                                           (-1.0, 0.0)}

    g3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1),
          (1 / math.sqrt(3),) * 3)
    sp3 = MultigridSpec(g3, (0.13, 0.27, 0.41, 0.55), g3)
    assert len(rail_families(sp3)) == 6


def test_dual_lattice_info():
    info = dual_lattice_info(SB, (0, 1))
    assert info.covolume == pytest.approx(1.0)
    assert info.rho == pytest.approx(1.0)
    assert np.allclose(info.base_point, (0.25, 0.25))

    adjacent = dual_lattice_info(PG, (0, 1))
    assert adjacent.covolume == pytest.approx(1 / math.sin(math.radians(72)))
    assert adjacent.rho == pytest.approx(
        4 / 25 * math.sin(math.radians(72)) ** 2)
    total = sum(dual_lattice_info(PG, j).rho for j in PG.subsets())
    assert total == pytest.approx(1.0, abs=1e-12)


def test_lambda_consistency():
    rails = {r.subset: r for r in rail_families(PG)}
    for j in PG.subsets():
        info = dual_lattice_info(PG, j)
        for sub, lam in info.rail_generators.items():
            assert info.covolume / lam == pytest.approx(
                rails[sub].cell_measure, abs=1e-9)


def test_dual_points_examples():
    dps = dual_points_in_region(SB, Box((0, 0), (1, 1)))
    pts = list(dps.iter_points())
    assert len(pts) == 1
    assert np.allclose(pts[0].position, (0.25, 0.25))
    assert pts[0].full_index == (0, 0)

    pg02 = pentagrid(gammas=[0.2] * 5)
    dps = dual_points_in_region(pg02, Ball((0.2, 0.1453), 1e-3))
    pts = [p for p in dps.iter_points() if p.subset == (0, 1)]
    assert len(pts) == 1
    p = pts[0]
    assert p.k_subset == (0, 0)
    assert p.full_index == (0, 0, -1, -1, -1)
    assert np.allclose(p.position, (0.2, 0.14531), atol=1e-4)

    tile = tile_of(pg02, p)
    # anchor: sum k_g g~ - sum_J g~; the k-sums cancel via sum g_j = 0
    assert np.allclose(tile.anchor, (0.0, 0.0), atol=1e-9)
    assert np.allclose(tile.center,
                       0.5 * (np.asarray(pg02.edges[0]) + pg02.edges[1]))


def test_dual_point_count_matches_density():
    r = 50.0
    dps = dual_points_in_region(PG, Ball((0, 0), r))
    density = sum(1 / dual_lattice_info(PG, j).covolume
                  for j in PG.subsets())
    expected = density * math.pi * r * r
    assert abs(dps.count - expected) / expected < 0.03


def test_tile_classes_are_two_rhombi():
    dps = dual_points_in_region(PG, Ball((0, 0), 10))
    vols = set()
    for p in dps.iter_points():
        vols.add(round(tile_of(PG, p).volume, 9))
    assert vols == {round(math.sin(math.radians(72)), 9),
                    round(math.sin(math.radians(144)), 9)}


def test_genericity_guard():
    # gammas aligned so that a dual point of families (0,2) lands exactly
    # on a hyperplane of family 1 at the origin: fractional part 0
    gs = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0))
    spec = MultigridSpec(gs, (0.0, 0.0, 0.0), ((1.0, 0.0), (0.0, 1.0),
                                               (0.5, 0.5)))
    with pytest.raises(GenericityViolation):
        dual_points_in_region(spec, Ball((0, 0), 2.0))


def test_bigrid_tiling_and_pentagrid_patch():
    rep = verify_tiling(SB, Ball((0.0, 0.0), 10.0), n_samples=1500, seed=1)
    assert rep.ok and rep.n_tiles > 0
    rep = verify_tiling(PG, Ball((0.0, 0.0), 14.0), n_samples=2000, seed=2)
    assert rep.ok
    assert rep.covered_lower <= rep.window_area <= rep.covered_upper


def test_random_spec_tilings():
    rng = np.random.default_rng(10)
    for _ in range(2):
        spec = random_valid_spec(rng)
        rep = verify_tiling(spec, Ball((0.0, 0.0), 9.0), n_samples=800,
                            seed=5)
        assert rep.ok


def test_cauchy_binet_random_specs():
    rng = np.random.default_rng(44)
    for _ in range(100):
        d = int(rng.integers(2, 4))
        n = int(rng.integers(d, 9))
        spec = MultigridSpec(
            tuple(tuple(v) for v in rng.normal(size=(n, d))),
            tuple(rng.uniform(0.05, 0.95, size=n)),
            tuple(tuple(v) for v in rng.normal(size=(n, d))))
        from wulffgrid.multigrid import _normalized_matrices
        g, gt = _normalized_matrices(spec)
        lhs = float(np.linalg.det(g @ gt.T))
        rhs = float(sum(np.linalg.det(g[:, j]) * np.linalg.det(gt[:, j])
                        for j in spec.subsets()))
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


def test_bounded_distortion_small_radius():
    amap, bound = affine_map_and_bound(PG)
    dps = dual_points_in_region(PG, Ball((0, 0), 25.0))
    worst = 0.0
    for j, (anchors, centers) in tile_arrays(PG, dps).items():
        dev = np.linalg.norm(centers - amap(dps.groups[j]["x"]), axis=1)
        worst = max(worst, float(dev.max()))
    assert worst <= bound


def test_step_along_line_roundtrip():
    rails = rail_families(PG)
    dps = dual_points_in_region(PG, Ball((0, 0), 6.0))
    keys = set(dps.keys())
    pts = list(dps.iter_points())
    for p in pts[::7]:
        for rail in rails:
            if not set(rail.subset) <= set(p.subset):
                continue
            fwd, x1 = step_along_line(PG, p.position, rail, +1)
            # walking back returns to the original point
            back, x0 = step_along_line(PG, x1, rail, -1)
            assert back == (p.subset, p.k_subset)
            assert np.allclose(x0, p.position, atol=1e-9)
            recomputed = intersection_point(PG, fwd[0], fwd[1])
            assert np.allclose(recomputed, x1, atol=1e-9)
            if np.linalg.norm(x1) < 5.0:
                assert fwd in keys


def test_singular_subset_raises():
    from wulffgrid.multigrid import SingularSubset
    gs = ((1.0, 0.0), (2.0, 0.0), (0.0, 1.0))
    spec = MultigridSpec(gs, (0.1, 0.2, 0.3), gs)
    with pytest.raises(SingularSubset):
        dual_lattice_info(spec, (0, 1))


def test_records_and_documents_roundtrip():
    doc = PG.to_document()
    spec2 = MultigridSpec.from_document(doc)
    assert np.allclose(spec2.gammas, PG.gammas)
    dps = dual_points_in_region(PG, Ball((0, 0), 3.0))
    text = tiling_records(PG, dps)
    assert text.startswith('{"J":[0,')
    assert len(text.strip().splitlines()) == dps.count
    assert max_tile_diameter(PG) > 1.0
