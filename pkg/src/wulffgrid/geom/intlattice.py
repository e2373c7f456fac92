"""Exact integer-lattice algebra: Hermite forms, kernel sublattices, cosets.

Everything here works on plain Python integers so that spans, determinants
and coset representatives are exact.  Vectors are tuples of ints; matrices
are lists of row tuples.
"""

from dataclasses import dataclass
from itertools import product
import math

import numpy as np


class ZeroVector(ValueError):
    pass


def _as_int_rows(vectors):
    rows = [tuple(int(c) for c in v) for v in vectors]
    if not rows:
        raise ValueError("empty vector list")
    d = len(rows[0])
    if any(len(r) != d for r in rows):
        raise ValueError("mixed dimensions")
    return rows, d


def det_exact(rows):
    """Determinant of a square integer matrix, exact (Bareiss)."""
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[-1][-1]


def adjugate(rows):
    """Adjugate of a square integer matrix (inverse times determinant)."""
    n = len(rows)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [rows[r][c] for c in range(n) if c != j]
                for r in range(n) if r != i
            ]
            adj[j][i] = (-1) ** (i + j) * det_exact(minor)
    return adj


def hermite_rows(vectors):
    """Row-style Hermite form of the lattice spanned by ``vectors``.

    Returns (basis_rows, rank, transform) with ``transform @ vectors == basis``
    padded by zero rows; transform spans the integer row operations applied,
    so coordinates of lattice members over the input generators can be pulled
    back through it.
    """
    rows, d = _as_int_rows(vectors)
    m = len(rows)
    work = [list(r) for r in rows]
    trans = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    pivot_row = 0
    for col in range(d):
        # eliminate below pivot_row in this column via gcd combinations
        piv = None
        for i in range(pivot_row, m):
            if work[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        work[pivot_row], work[piv] = work[piv], work[pivot_row]
        trans[pivot_row], trans[piv] = trans[piv], trans[pivot_row]
        for i in range(pivot_row + 1, m):
            while work[i][col] != 0:
                a, b = work[pivot_row][col], work[i][col]
                if abs(b) < abs(a):
                    work[pivot_row], work[i] = work[i], work[pivot_row]
                    trans[pivot_row], trans[i] = trans[i], trans[pivot_row]
                    continue
                q = b // a
                work[i] = [x - q * y for x, y in zip(work[i], work[pivot_row])]
                trans[i] = [x - q * y for x, y in zip(trans[i], trans[pivot_row])]
        if work[pivot_row][col] < 0:
            work[pivot_row] = [-x for x in work[pivot_row]]
            trans[pivot_row] = [-x for x in trans[pivot_row]]
        pivot_row += 1
        if pivot_row == m:
            break

    rank = pivot_row
    # reduce entries above each pivot to the canonical range [0, pivot)
    pivots = []
    for i in range(rank):
        col = next(c for c in range(d) if work[i][c] != 0)
        pivots.append(col)
    for i in range(rank - 1, -1, -1):
        col = pivots[i]
        p = work[i][col]
        for j in range(i):
            q = work[j][col] // p
            if q:
                work[j] = [x - q * y for x, y in zip(work[j], work[i])]
                trans[j] = [x - q * y for x, y in zip(trans[j], trans[i])]
    basis = [tuple(work[i]) for i in range(rank)]
    return basis, rank, trans


@dataclass(frozen=True)
class LatticeReduction:
    basis: tuple
    rank: int
    det: float


def lattice_reduce(vectors):
    """Canonical basis (Hermite form), rank and covolume of span_Z(vectors)."""
    basis, rank, _ = hermite_rows(vectors)
    if rank == 0:
        return LatticeReduction((), 0, 0.0)
    b = np.array(basis, dtype=float)
    det = math.sqrt(max(np.linalg.det(b @ b.T), 0.0))
    return LatticeReduction(tuple(basis), rank, det)


def in_span(vector, vectors):
    """Exact membership of ``vector`` in span_Z(vectors)."""
    return expand_over(vector, vectors) is not None


def expand_over(vector, vectors):
    """Integer coefficients expressing ``vector`` over ``vectors``, or None.

    Deterministic: back-substitution through the Hermite form, pulled back
    with the recorded row transform.
    """
    rows, d = _as_int_rows(vectors)
    basis, rank, trans = hermite_rows(rows)
    target = [int(c) for c in vector]
    coeffs_h = [0] * rank
    residue = list(target)
    for i in range(rank):
        col = next(c for c in range(d) if basis[i][c] != 0)
        if residue[col] % basis[i][col] != 0:
            return None
        q = residue[col] // basis[i][col]
        coeffs_h[i] = q
        residue = [x - q * y for x, y in zip(residue, basis[i])]
    if any(residue):
        return None
    m = len(rows)
    coeffs = [0] * m
    for i in range(rank):
        for j in range(m):
            coeffs[j] += coeffs_h[i] * trans[i][j]
    return tuple(coeffs)


@dataclass(frozen=True)
class KernelInfo:
    basis: tuple          # integral basis of {w : <w,v> = 0}
    cell_measure: float   # H^{d-1} of its fundamental cell
    coset_count: int      # index of  ker + Zv  in Z^d
    reps: tuple           # integer coset representatives inside U_v


def kernel_sublattice(v):
    """Basis, cell measure and coset data for the sublattice orthogonal to v.

    The coset representatives are the integer points of the half-open
    fundamental cell U_v spanned by the kernel basis together with v.
    """
    v = tuple(int(c) for c in v)
    d = len(v)
    if all(c == 0 for c in v):
        raise ZeroVector("kernel_sublattice requires v != 0")

    # unimodular column transform sending v^T to (g, 0, ..., 0)
    u = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    w = list(v)
    while True:
        nz = [i for i in range(d) if w[i] != 0]
        if len(nz) == 1:
            lead = nz[0]
            break
        i, j = sorted(nz, key=lambda t: abs(w[t]))[:2]
        q = w[j] // w[i]
        w[j] -= q * w[i]
        for r in range(d):
            u[r][j] -= q * u[r][i]
    kernel_cols = [tuple(u[r][c] for r in range(d))
                   for c in range(d) if c != lead]
    basis, rank, _ = hermite_rows(kernel_cols) if kernel_cols else ((), 0, [])
    assert rank == d - 1

    b = np.array(basis, dtype=float).reshape(d - 1, d)
    cell = math.sqrt(max(np.linalg.det(b @ b.T), 0.0)) if d > 1 else 1.0

    cols = [list(row) for row in zip(*basis, v)] if d > 1 else [[v[0]]]
    count = abs(det_exact(cols))
    reps = _cell_integer_points(cols)
    assert len(reps) == count
    return KernelInfo(tuple(basis), cell, count, tuple(sorted(reps)))


def _cell_integer_points(cols):
    """Integer points of the half-open parallelepiped spanned by ``cols``."""
    d = len(cols)
    det = det_exact(cols)
    adj = adjugate(cols)
    corners = []
    for eps in product((0, 1), repeat=d):
        corners.append(tuple(sum(cols[i][j] * eps[j] for j in range(d))
                             for i in range(d)))
    lo = [min(c[i] for c in corners) for i in range(d)]
    hi = [max(c[i] for c in corners) for i in range(d)]
    points = []
    for p in product(*[range(lo[i], hi[i] + 1) for i in range(d)]):
        ok = True
        for i in range(d):
            a = sum(adj[i][j] * p[j] for j in range(d))
            # need a/det in [0, 1)
            if det > 0:
                if not (0 <= a < det):
                    ok = False
                    break
            else:
                if not (det < a <= 0):
                    ok = False
                    break
        if ok:
            points.append(tuple(p))
    return points


def reduce_mod_cell(x, cols):
    """Canonical representative of x modulo the lattice with columns ``cols``."""
    d = len(cols)
    det = det_exact(cols)
    adj = adjugate(cols)
    q = []
    for i in range(d):
        a = sum(adj[i][j] * int(x[j]) for j in range(d))
        q.append(a // det)  # python floor division also floors for det < 0
    return tuple(int(x[i]) - sum(cols[i][j] * q[j] for j in range(d))
                 for i in range(d))
