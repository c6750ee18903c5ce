#!/usr/bin/env python3
"""Writes the channel-with-cylinder mesh used by `nsbench cylinder`.

Channel (0, 2.2) x (0, 0.41), cylinder of radius 0.05 centred at (0.2, 0.2).
Points: polar rings around the cylinder, a graded hexagonal lattice elsewhere,
and equispaced boundary points; triangulated by Delaunay, the cylinder interior
removed. Boundary tags: inlet (x = 0), outlet (x = 2.2), wall (rest).

    python3 tools/gen_cylinder_mesh.py data/cylinder_channel.mesh
"""
import argparse
import math

import numpy as np
from scipy.spatial import Delaunay

L, H = 2.2, 0.41
CX, CY, R = 0.2, 0.2, 0.05


def spacing(x, y):
    """Target point spacing: fine near the cylinder and in the near wake."""
    d = math.hypot(x - CX, y - CY) - R
    wake = 0.03 if CX < x < 1.0 else 0.045
    return min(wake, 0.008 + 0.25 * d)


def points():
    pts = []
    n_theta = 64
    r, ring = R, 0
    while r < 0.14:
        offset = 0.5 * ring
        for j in range(n_theta):
            a = 2 * math.pi * (j + offset) / n_theta
            pts.append((CX + r * math.cos(a), CY + r * math.sin(a)))
        r += 2 * math.pi * r / n_theta * 0.87
        ring += 1
    r_rings = r
    # Boundary points.
    def edge(a, b, h):
        n = max(2, math.ceil(math.dist(a, b) / h))
        return [(a[0] + (b[0] - a[0]) * i / n, a[1] + (b[1] - a[1]) * i / n) for i in range(n)]
    h_in = 0.02
    pts += edge((0, 0), (L, 0), h_in) + edge((L, 0), (L, H), 0.04)
    pts += edge((L, H), (0, H), h_in) + edge((0, H), (0, 0), h_in)
    # Graded interior lattice: accept a candidate if it is not too close to
    # accepted points (grid-bucket check).
    cell = 0.004
    buckets = {}
    def key(p):
        return (int(p[0] / cell), int(p[1] / cell))
    def far_enough(p, h):
        kx, ky = key(p)
        reach = int(math.ceil(h / cell))
        for i in range(kx - reach, kx + reach + 1):
            for j in range(ky - reach, ky + reach + 1):
                for q in buckets.get((i, j), ()):
                    if math.dist(p, q) < 0.8 * h:
                        return False
        return True
    for p in pts:
        buckets.setdefault(key(p), []).append(p)
    h0 = 0.006
    rows = int(H / (h0 * math.sqrt(3) / 2)) + 1
    cols = int(L / h0) + 1
    for j in range(1, rows):
        y = j * h0 * math.sqrt(3) / 2
        if y >= H - 0.5 * h_in:
            continue
        for i in range(1, cols):
            x = (i + 0.5 * (j % 2)) * h0
            if x >= L - 0.02 or y < 0.5 * h_in:
                continue
            if math.hypot(x - CX, y - CY) < r_rings:
                continue
            h = spacing(x, y)
            if far_enough((x, y), h):
                buckets.setdefault(key((x, y)), []).append((x, y))
                pts.append((x, y))
    return np.array(pts), n_theta


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("output")
    args = ap.parse_args()
    pts, n_theta = points()
    tri = Delaunay(pts)
    if len(tri.coplanar):
        raise SystemExit("Delaunay dropped points")
    keep = []
    for t in tri.simplices:
        c = pts[t].mean(axis=0)
        if math.hypot(c[0] - CX, c[1] - CY) < R:
            continue
        a, b, d = pts[t]
        area = 0.5 * ((b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]))
        if abs(area) < 1e-14:
            raise SystemExit("degenerate triangle")
        keep.append(t if area > 0 else t[[0, 2, 1]])
    keep = np.array(keep)
    # Boundary edges: edges used by exactly one kept triangle.
    count = {}
    for t in keep:
        for i in range(3):
            e = (t[(i + 1) % 3], t[(i + 2) % 3])
            k = tuple(sorted(e))
            count[k] = count.get(k, 0) + 1
    boundary = []
    for (a, b), n in sorted(count.items()):
        if n != 1:
            continue
        m = 0.5 * (pts[a] + pts[b])
        if abs(m[0]) < 1e-12:
            tag = "inlet"
        elif abs(m[0] - L) < 1e-12:
            tag = "outlet"
        else:
            tag = "wall"
            on_box = abs(m[1]) < 1e-12 or abs(m[1] - H) < 1e-12
            on_circle = abs(math.hypot(m[0] - CX, m[1] - CY) - R) < 0.01
            if not (on_box or on_circle):
                raise SystemExit(f"unexpected boundary edge at {m}")
        boundary.append((a, b, tag))
    circle_edges = sum(1 for a, b, t in boundary if t == "wall" and abs(0.5 * (pts[a][0] + pts[b][0]) - CX) < 2 * R
                       and 1e-12 < 0.5 * (pts[a][1] + pts[b][1]) < H - 1e-12)
    if circle_edges != n_theta:
        raise SystemExit(f"cylinder boundary not recovered ({circle_edges} of {n_theta} edges)")
    with open(args.output, "w") as f:
        f.write("ns-mesh v1\n")
        f.write(f"vertices {len(pts)}\n")
        for x, y in pts:
            f.write(f"{x:.17g} {y:.17g}\n")
        f.write(f"triangles {len(keep)}\n")
        for t in keep:
            f.write(f"{t[0]} {t[1]} {t[2]}\n")
        f.write(f"boundary {len(boundary)}\n")
        for a, b, tag in boundary:
            f.write(f"{a} {b} {tag}\n")
    print(f"{len(pts)} vertices, {len(keep)} triangles, {len(boundary)} boundary edges")


if __name__ == "__main__":
    main()
