"""Planar Delaunay triangulation and the triangle utilities used by the optimizer.

The triangulation is built incrementally (Bowyer-Watson). Instead of a finite
super-triangle, hull edges are closed off with "ghost" triangles that share one
vertex at infinity; this keeps the union of real triangles equal to the convex
hull no matter how thin the hull triangles get.
"""
from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from . import _kernels
from .errors import (DegenerateInput, DegenerateTriangle, DuplicatePoint,
                     EmptyIntersection, OutsideHull, TooFewPoints)

if TYPE_CHECKING:
    from .scenario import Rect

PREDICATE_TOL = 1e-12
GHOST = -1

Triangle = tuple  # (v1, v2, v3) vertex indices, counter-clockwise


def orient2d(a, b, c) -> float:
    """Twice the signed area of (a, b, c); 0.0 when collinear within tolerance.

    Positive means counter-clockwise.
    """
    left = (a[0] - c[0]) * (b[1] - c[1])
    right = (a[1] - c[1]) * (b[0] - c[0])
    det = left - right
    if abs(det) <= PREDICATE_TOL * (abs(left) + abs(right)):
        return 0.0
    return det


def incircle(a, b, c, d) -> float:
    """Positive when d lies strictly inside the circumcircle of ccw (a, b, c)."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    bc1, bc2 = bdx * cdy, cdx * bdy
    ca1, ca2 = cdx * ady, adx * cdy
    ab1, ab2 = adx * bdy, bdx * ady
    det = alift * (bc1 - bc2) + blift * (ca1 - ca2) + clift * (ab1 - ab2)
    permanent = (alift * (abs(bc1) + abs(bc2)) + blift * (abs(ca1) + abs(ca2))
                 + clift * (abs(ab1) + abs(ab2)))
    if abs(det) <= PREDICATE_TOL * permanent:
        return 0.0
    return det


def _strictly_between(a, b, p) -> bool:
    # p is assumed collinear with a-b
    dx, dy = b[0] - a[0], b[1] - a[1]
    t = (p[0] - a[0]) * dx + (p[1] - a[1]) * dy
    return 0.0 < t < dx * dx + dy * dy


def _canonical(tri):
    a, b, c = tri
    if b < a and b < c:
        return (b, c, a)
    if c < a and c < b:
        return (c, a, b)
    return (a, b, c)


class Triangulation:
    """Delaunay triangulation of a planar point sequence.

    ``triangles`` lists counter-clockwise vertex-index triples, each rotated to
    start at its smallest index, sorted; a triangle's id is its position in
    that list. ``neighbors[t][i]`` is the triangle across the edge opposite
    vertex ``i`` of triangle ``t`` (-1 on the hull).
    """

    def __init__(self):
        self._pts: list[tuple[float, float]] = []
        self._tris: dict[int, tuple[int, int, int]] = {}
        self._edge: dict[tuple[int, int], int] = {}
        self._next_id = 0
        self._last = -1
        self._cache = None

    # construction ------------------------------------------------------

    @classmethod
    def build(cls, points) -> "Triangulation":
        pts = [(float(x), float(y)) for x, y in np.asarray(points, dtype=float).reshape(-1, 2)]
        if len(pts) < 3:
            raise TooFewPoints(f"need at least 3 points, got {len(pts)}")
        self = cls()
        self._pts = pts
        i0 = 0
        i1 = next((i for i in range(1, len(pts)) if pts[i] != pts[i0]), None)
        if i1 is None:
            raise DegenerateInput("all points coincide")
        i2 = next((i for i in range(i1 + 1, len(pts))
                   if orient2d(pts[i0], pts[i1], pts[i]) != 0.0), None)
        if i2 is None:
            raise DegenerateInput("all points are collinear")
        if orient2d(pts[i0], pts[i1], pts[i2]) < 0:
            i1, i2 = i2, i1
        self._add((i0, i1, i2))
        self._add((i1, i0, GHOST))
        self._add((i2, i1, GHOST))
        self._add((i0, i2, GHOST))
        first = {i0, i1, i2}
        for i in range(len(pts)):
            if i not in first:
                self._insert_index(i, require_inside=False)
        self._canonicalize()
        return self

    def copy(self) -> "Triangulation":
        other = Triangulation()
        other._pts = list(self._pts)
        other._tris = dict(self._tris)
        other._edge = dict(self._edge)
        other._next_id = self._next_id
        other._last = self._last
        return other

    def insert(self, p) -> int:
        """Insert ``p`` in place; returns its vertex index."""
        p = (float(p[0]), float(p[1]))
        self._pts.append(p)
        idx = len(self._pts) - 1
        try:
            self._insert_index(idx, require_inside=True)
        except Exception:
            self._pts.pop()
            raise
        self._canonicalize()
        return idx

    # internals ---------------------------------------------------------

    def _add(self, tri) -> int:
        if tri[0] == GHOST:
            tri = (tri[1], tri[2], tri[0])
        elif tri[1] == GHOST:
            tri = (tri[2], tri[0], tri[1])
        tid = self._next_id
        self._next_id += 1
        self._tris[tid] = tri
        a, b, c = tri
        self._edge[(a, b)] = tid
        self._edge[(b, c)] = tid
        self._edge[(c, a)] = tid
        if c != GHOST:
            self._last = tid
        self._cache = None
        return tid

    def _remove(self, tid) -> None:
        a, b, c = self._tris.pop(tid)
        for e in ((a, b), (b, c), (c, a)):
            if self._edge.get(e) == tid:
                del self._edge[e]
        self._cache = None

    def _in_conflict(self, tid, p) -> bool:
        a, b, c = self._tris[tid]
        pts = self._pts
        if c == GHOST:
            o = orient2d(pts[a], pts[b], p)
            return o > 0 or (o == 0.0 and _strictly_between(pts[a], pts[b], p))
        return incircle(pts[a], pts[b], pts[c], p) > 0

    def _locate(self, p) -> int:
        """Real triangle containing p, or a ghost whose open half-plane holds p."""
        pts = self._pts
        tid = self._last if self._last in self._tris else next(
            t for t, tri in self._tris.items() if tri[2] != GHOST)
        for _ in range(4 * len(self._tris) + 10):
            tri = self._tris[tid]
            if tri[2] == GHOST:
                return tid
            for k in range(3):
                u, v = tri[k], tri[(k + 1) % 3]
                if orient2d(pts[u], pts[v], p) < 0:
                    tid = self._edge[(v, u)]
                    break
            else:
                return tid
        # walk failed to settle (tolerance cycling); fall back to a scan
        for tid, tri in sorted(self._tris.items()):
            if tri[2] != GHOST and all(
                    orient2d(pts[tri[k]], pts[tri[(k + 1) % 3]], p) >= 0 for k in range(3)):
                return tid
        for tid in sorted(self._tris):
            if self._in_conflict(tid, p):
                return tid
        raise DegenerateInput(f"cannot locate point {p}")

    def _insert_index(self, idx, require_inside) -> None:
        pts = self._pts
        p = pts[idx]
        start = self._locate(p)
        tri = self._tris[start]
        if require_inside and tri[2] == GHOST:
            raise OutsideHull(f"point {p} lies outside the convex hull")
        for v in tri:
            if v != GHOST and math.dist(pts[v], p) <= 1e-12 * (1.0 + math.hypot(*p)):
                raise DuplicatePoint(f"point {p} duplicates vertex {v}")

        cavity = {start}
        stack = [start]
        while stack:
            tid = stack.pop()
            a, b, c = self._tris[tid]
            for u, v in ((a, b), (b, c), (c, a)):
                nb = self._edge.get((v, u))
                if nb is not None and nb not in cavity and self._in_conflict(nb, p):
                    cavity.add(nb)
                    stack.append(nb)

        # grow the cavity until p sees every real boundary edge from the inside
        while True:
            boundary = self._boundary(cavity)
            bad = [(u, v) for u, v in boundary
                   if u != GHOST and v != GHOST and orient2d(pts[u], pts[v], p) <= 0]
            if not bad:
                break
            grew = False
            for u, v in bad:
                nb = self._edge.get((v, u))
                if nb is not None and nb not in cavity:
                    cavity.add(nb)
                    grew = True
            if not grew:
                raise DegenerateInput(f"cannot insert point {p}: cavity not star-shaped")

        for tid in sorted(cavity):
            self._remove(tid)
        for u, v in boundary:
            self._add((u, v, idx))

    def _boundary(self, cavity):
        edges = []
        for tid in sorted(cavity):
            a, b, c = self._tris[tid]
            for u, v in ((a, b), (b, c), (c, a)):
                if self._edge.get((v, u)) not in cavity:
                    edges.append((u, v))
        return edges

    def _canonicalize(self) -> None:
        """Resolve cocircular quadruples so the diagonal touches the lowest index."""
        pts = self._pts
        for _ in range(10 * len(self._tris) + 10):
            flipped = False
            for (u, v), tid in sorted(self._edge.items()):
                if u == GHOST or v == GHOST or u > v:
                    continue
                other = self._edge.get((v, u))
                t1, t2 = self._tris[tid], self._tris.get(other)
                if t2 is None or GHOST in t1 or GHOST in t2:
                    continue
                w = next(x for x in t1 if x != u and x != v)
                x = next(y for y in t2 if y != u and y != v)
                if incircle(pts[u], pts[v], pts[w], pts[x]) != 0.0:
                    continue
                if min(w, x) > min(u, v):
                    continue
                # flip u-v to w-x; both new triangles must be proper
                if orient2d(pts[w], pts[x], pts[v]) <= 0 or orient2d(pts[x], pts[w], pts[u]) <= 0:
                    continue
                self._remove(tid)
                self._remove(other)
                self._add((w, x, v) if orient2d(pts[w], pts[x], pts[v]) > 0 else (x, w, v))
                self._add((x, w, u) if orient2d(pts[x], pts[w], pts[u]) > 0 else (w, x, u))
                flipped = True
                break
            if not flipped:
                return

    # public views ------------------------------------------------------

    def _views(self):
        if self._cache is None:
            tris = sorted(_canonical(t) for t in self._tris.values() if GHOST not in t)
            owner = {}
            for i, (a, b, c) in enumerate(tris):
                owner[(a, b)] = owner[(b, c)] = owner[(c, a)] = i
            nbrs = []
            for a, b, c in tris:
                nbrs.append((owner.get((c, b), -1), owner.get((a, c), -1), owner.get((b, a), -1)))
            self._cache = (tris, nbrs)
        return self._cache

    @property
    def points(self) -> np.ndarray:
        return np.array(self._pts, dtype=float).reshape(-1, 2)

    @property
    def triangles(self) -> list[Triangle]:
        return list(self._views()[0])

    @property
    def neighbors(self) -> list[tuple[int, int, int]]:
        return list(self._views()[1])

    def __len__(self) -> int:
        return len(self._views()[0])

    def triangle_set(self) -> set[frozenset]:
        return {frozenset(t) for t in self._views()[0]}

    def to_text(self) -> str:
        lines = [f"points {len(self._pts)}"]
        lines += [f"{x!r},{y!r}" for x, y in self._pts]
        tris = self._views()[0]
        lines.append(f"triangles {len(tris)}")
        lines += [f"{a},{b},{c}" for a, b, c in tris]
        return "\n".join(lines) + "\n"


def delaunay_triangulate(points) -> Triangulation:
    return Triangulation.build(points)


def insert_point(tri: Triangulation, p) -> Triangulation:
    """Return a copy of ``tri`` with ``p`` inserted; ``tri`` is left untouched."""
    out = tri.copy()
    out.insert(p)
    return out


def triangle_vertices(t: Triangle, points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    return pts[list(t)]


def triangle_area(t: Triangle, points) -> float:
    (x1, y1), (x2, y2), (x3, y3) = triangle_vertices(t, points)
    return 0.5 * ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1))


def barycentric(t: Triangle, points, p) -> tuple[float, float, float]:
    (x1, y1), (x2, y2), (x3, y3) = triangle_vertices(t, points)
    det = (y2 - y3) * (x1 - x3) + (x3 - x2) * (y1 - y3)
    scale = max(abs(x1 - x3), abs(x2 - x3), abs(y1 - y3), abs(y2 - y3)) ** 2
    if scale == 0.0 or abs(det) <= PREDICATE_TOL * scale:
        raise DegenerateTriangle(f"triangle {tuple(t)} is degenerate")
    px, py = float(p[0]), float(p[1])
    l1 = ((y2 - y3) * (px - x3) + (x3 - x2) * (py - y3)) / det
    l2 = ((y3 - y1) * (px - x3) + (x1 - x3) * (py - y3)) / det
    return (l1, l2, 1.0 - l1 - l2)


def contains(t: Triangle, points, p, eps: float = 1e-12) -> bool:
    return min(barycentric(t, points, p)) >= -eps


def centroid(t: Triangle, points) -> tuple[float, float]:
    v = triangle_vertices(t, points)
    return (float((v[0, 0] + v[1, 0] + v[2, 0]) / 3.0),
            float((v[0, 1] + v[1, 1] + v[2, 1]) / 3.0))


def edge_midpoints(t: Triangle, points) -> list[tuple[float, float]]:
    v = triangle_vertices(t, points)
    return [(float((v[i, 0] + v[(i + 1) % 3, 0]) / 2), float((v[i, 1] + v[(i + 1) % 3, 1]) / 2))
            for i in range(3)]


def diameter(t: Triangle, points) -> float:
    v = triangle_vertices(t, points)
    return max(math.dist(v[i], v[j]) for i, j in ((0, 1), (1, 2), (2, 0)))


def clip_to_rect(polygon, rect: "Rect") -> np.ndarray:
    """Sutherland-Hodgman clip of a ccw convex polygon against ``rect``.

    Returns the ccw vertex array of the intersection, possibly empty.
    """
    poly = [(float(x), float(y)) for x, y in polygon]
    planes = (
        (lambda q: q[0] - rect.min_x, 0, rect.min_x),
        (lambda q: rect.max_x - q[0], 0, rect.max_x),
        (lambda q: q[1] - rect.min_y, 1, rect.min_y),
        (lambda q: rect.max_y - q[1], 1, rect.max_y),
    )
    for side, axis, value in planes:
        if not poly:
            break
        out = []
        n = len(poly)
        for i in range(n):
            cur, nxt = poly[i], poly[(i + 1) % n]
            dc, dn = side(cur), side(nxt)
            if dc >= 0:
                out.append(cur)
            if (dc >= 0) != (dn >= 0):
                s = dc / (dc - dn)
                q = [cur[0] + s * (nxt[0] - cur[0]), cur[1] + s * (nxt[1] - cur[1])]
                q[axis] = value
                out.append((q[0], q[1]))
        poly = out
    dedup = []
    for q in poly:
        if not dedup or q != dedup[-1]:
            dedup.append(q)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return np.array(dedup, dtype=float).reshape(-1, 2)


def polygon_area(poly) -> float:
    poly = np.asarray(poly, dtype=float)
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def feasible_region(t: Triangle, points, rect: "Rect") -> np.ndarray:
    """Vertices of triangle ``t`` intersected with ``rect`` (ccw)."""
    v = triangle_vertices(t, points)
    if triangle_area(t, points) < 0:
        v = v[::-1]
    return clip_to_rect(v, rect)


def project_to_polygon(p, poly) -> tuple[float, float]:
    poly = np.ascontiguousarray(poly, dtype=float)
    if len(poly) == 0:
        raise EmptyIntersection("cannot project onto an empty set")
    x, y = _kernels.project_to_polygon(float(p[0]), float(p[1]), poly[:, 0].copy(), poly[:, 1].copy())
    return (x, y)


def clamp_to_triangle_and_rect(p, t: Triangle, points, rect: "Rect") -> tuple[float, float]:
    """Euclidean projection of ``p`` onto the closed convex set ``t`` cap ``rect``."""
    barycentric(t, points, p)  # raises on degenerate triangles
    poly = feasible_region(t, points, rect)
    if len(poly) == 0:
        raise EmptyIntersection(f"triangle {tuple(t)} does not meet the rectangle")
    return project_to_polygon(p, poly)
