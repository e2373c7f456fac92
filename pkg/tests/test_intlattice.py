import math

import numpy as np
import pytest

from wulffgrid.geom.intlattice import (
    ZeroVector, det_exact, expand_over, kernel_sublattice, lattice_reduce,
    reduce_mod_cell,
)


def test_lattice_reduce_examples():
    r = lattice_reduce([(1, 0), (-1, 0), (0, 1), (0, -1)])
    assert (r.rank, r.det) == (2, 1.0)
    r = lattice_reduce([(1, 1), (1, -1)])
    assert (r.rank, r.det) == (2, 2.0)
    r = lattice_reduce([(2, 0)])
    assert r.rank == 1


def test_lattice_reduce_canonical_and_span_preserving():
    rng = np.random.default_rng(0)
    for _ in range(30):
        d = int(rng.integers(2, 4))
        vecs = [tuple(int(c) for c in rng.integers(-4, 5, size=d))
                for _ in range(int(rng.integers(2, 6)))]
        if all(all(c == 0 for c in v) for v in vecs):
            continue
        r = lattice_reduce(vecs)
        # every generator lies in the span of the basis and vice versa
        for v in vecs:
            assert expand_over(v, list(r.basis)) is not None
        for b in r.basis:
            assert expand_over(b, vecs) is not None


def test_kernel_sublattice_examples():
    k = kernel_sublattice((1, 0))
    assert k.basis == ((0, 1),)
    assert k.cell_measure == pytest.approx(1.0)
    assert k.coset_count == 1

    k = kernel_sublattice((1, 1))
    assert k.basis == ((1, -1),)
    assert k.cell_measure == pytest.approx(math.sqrt(2))
    assert k.coset_count == 2
    assert k.reps == ((0, 0), (1, 0))

    k = kernel_sublattice((1, 1, 1))
    assert k.cell_measure == pytest.approx(math.sqrt(3))
    assert k.coset_count == 3


def test_kernel_sublattice_zero_raises():
    with pytest.raises(ZeroVector):
        kernel_sublattice((0, 0))


def test_coset_count_brute_force_50_random():
    rng = np.random.default_rng(42)
    done = 0
    while done < 50:
        d = int(rng.integers(2, 4))
        v = tuple(int(c) for c in rng.integers(-5, 6, size=d))
        if all(c == 0 for c in v):
            continue
        k = kernel_sublattice(v)
        # brute force: integer points in the half-open cell
        cols = [list(row) for row in zip(*k.basis, v)]
        corners = []
        import itertools
        for eps in itertools.product((0, 1), repeat=d):
            corners.append([sum(cols[i][j] * eps[j] for j in range(d))
                            for i in range(d)])
        lo = [min(c[i] for c in corners) for i in range(d)]
        hi = [max(c[i] for c in corners) for i in range(d)]
        adj = np.array([[float(x) for x in row] for row in cols])
        count = 0
        for p in itertools.product(*[range(lo[i], hi[i] + 1)
                                     for i in range(d)]):
            t = np.linalg.solve(adj, np.array(p, dtype=float))
            if np.all(t >= -1e-12) and np.all(t < 1 - 1e-12):
                count += 1
        assert count == k.coset_count
        assert k.cell_measure * math.sqrt(sum(c * c for c in v)) == \
            pytest.approx(k.coset_count, abs=1e-9)
        assert all(g @ np.array(v) == 0
                   for g in np.array(k.basis).reshape(-1, d))
        done += 1


def test_reduce_mod_cell_is_canonical():
    cols = [[1, 1], [-1, 1]]  # columns (1,-1) and (1,1)
    reps = {reduce_mod_cell((x, y), cols)
            for x in range(-4, 5) for y in range(-4, 5)}
    assert reps == {(0, 0), (1, 0)}


def test_det_exact_matches_numpy():
    rng = np.random.default_rng(1)
    for _ in range(50):
        d = int(rng.integers(1, 5))
        m = rng.integers(-6, 7, size=(d, d))
        assert det_exact(m.tolist()) == round(float(np.linalg.det(m)))
