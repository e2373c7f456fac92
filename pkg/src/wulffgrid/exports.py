"""Bit-stable exporters: OFF meshes, SVG drawings, CSV tables.

All floating-point output is printed with 9 fixed decimals and rows are
emitted in sorted deterministic order, so re-running a scenario with the
same seed reproduces byte-identical files.
"""

import numpy as np


class FormatMismatch(Exception):
    pass


def fmt(x):
    return f"{float(x):.9f}"


def polytope_to_off(poly):
    """OFF mesh of a 3-dimensional polytope."""
    if poly.dim != 3:
        raise FormatMismatch("OFF export requires d = 3")
    verts = poly.vertices
    lines = [f"{len(verts)} {len(poly.faces)} {poly.n_edges}"]
    lines = ["OFF", lines[0]]
    for v in verts:
        lines.append(" ".join(fmt(c) for c in v))
    for loop in poly.faces:
        lines.append(str(len(loop)) + " " + " ".join(str(i) for i in loop))
    return "\n".join(lines) + "\n"


def polygon_to_svg_path(poly):
    """Closed SVG path of a 2-dimensional polytope (y axis flipped)."""
    if poly.dim != 2:
        raise FormatMismatch("SVG path export requires d = 2")
    pts = poly.vertices
    parts = [f"M {fmt(pts[0][0])} {fmt(-pts[0][1])}"]
    for p in pts[1:]:
        parts.append(f"L {fmt(p[0])} {fmt(-p[1])}")
    parts.append("Z")
    return " ".join(parts)


PALETTE = ("#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee",
           "#aa3377", "#bbbbbb", "#222255", "#225555", "#552222")


def write_polytope_svg(path, poly, stroke="#333333", fill="#88aacc"):
    body = (f'<path d="{polygon_to_svg_path(poly)}" fill="{fill}" '
            f'stroke="{stroke}" stroke-width="0.02"/>')
    _write_svg(path, [body], poly.vertices)


def write_tiling_svg(path, spec, dps, stroke_width=0.04):
    """Tiles colored by their d-subset class J (planar tilings only)."""
    if spec.dim != 2:
        raise FormatMismatch("tiling SVG export requires d = 2")
    from .multigrid import tile_arrays
    subs = spec.subsets()
    color = {j: PALETTE[i % len(PALETTE)] for i, j in enumerate(subs)}
    elems = []
    allpts = []
    arrays = tile_arrays(spec, dps)
    for j in sorted(arrays):
        anchors, _ = arrays[j]
        gens = [np.asarray(spec.edges[i]) for i in j]
        order = np.lexsort((anchors[:, 1], anchors[:, 0]))
        for a in anchors[order]:
            corners = [a, a + gens[0], a + gens[0] + gens[1], a + gens[1]]
            allpts += corners
            d = (f"M {fmt(corners[0][0])} {fmt(-corners[0][1])} " +
                 " ".join(f"L {fmt(c[0])} {fmt(-c[1])}"
                          for c in corners[1:]) + " Z")
            elems.append(f'<path d="{d}" fill="{color[j]}" '
                         f'stroke="#222222" stroke-width="{stroke_width}"/>')
    _write_svg(path, elems, np.array(allpts))


def _write_svg(path, elements, points):
    pts = np.asarray(points, dtype=float)
    lo = pts.min(axis=0) - 0.5
    hi = pts.max(axis=0) + 0.5
    w, h = hi - lo
    header = (f'<svg xmlns="http://www.w3.org/2000/svg" '
              f'viewBox="{fmt(lo[0])} {fmt(-hi[1])} {fmt(w)} {fmt(h)}">')
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for e in elements:
            fh.write(e + "\n")
        fh.write("</svg>\n")


def export(artifact, fmt, path):
    """Write an artifact in one of {csv, svg, off}.

    csv expects (header, rows); svg and off expect a polytope of the right
    dimension.  Mismatches raise FormatMismatch.
    """
    if fmt == "csv":
        header, rows = artifact
        write_csv(path, header, rows)
    elif fmt == "off":
        with open(path, "w") as fh:
            fh.write(polytope_to_off(artifact))
    elif fmt == "svg":
        write_polytope_svg(path, artifact)
    else:
        raise FormatMismatch(f"unknown format {fmt!r}")
    return path


def write_csv(path, header, rows):
    """Rows of ints/floats/strings; floats printed at fixed 9 decimals."""
    def cell(x):
        if isinstance(x, bool):
            return str(int(x))
        if isinstance(x, (int, np.integer)):
            return str(int(x))
        if isinstance(x, (float, np.floating)):
            return fmt(x)
        return str(x)

    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(cell(x) for x in row) + "\n")
