"""Brute-force reference computations, written independently of the package kernels."""
import numpy as np


def field_on(xs, ys, stations):
    """g(z) on the grid xs x ys (rows follow ys), plain numpy."""
    g = np.zeros((len(ys), len(xs)))
    X = xs[None, :]
    for sx, sy in stations.positions:
        for r0 in range(0, len(ys), 256):
            Y = ys[r0:r0 + 256, None]
            d2 = (X - sx) ** 2 + (Y - sy) ** 2
            g[r0:r0 + 256] += d2 ** (-stations.alpha / 2)
    return g


def inside_polygon(X, Y, poly, tol=1e-12):
    """Mask of grid points inside the convex ccw polygon."""
    mask = np.ones(X.shape, dtype=bool)
    n = len(poly)
    for i in range(n):
        (x0, y0), (x1, y1) = poly[i], poly[(i + 1) % n]
        mask &= (x1 - x0) * (Y - y0) - (y1 - y0) * (X - x0) >= -tol
    return mask


def dense_argmin(poly, stations, n=2000):
    """Argmin of g over samples of the closed polygon.

    Samples are the n x n lattice spanning the bounding box, restricted to the
    polygon, plus points along every edge at the lattice spacing (a minimum on
    a slanted edge is otherwise only reachable by lattice points off the edge).
    Returns (point, cell size along x, cell size along y).
    """
    poly = np.asarray(poly)
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    xs = np.linspace(lo[0], hi[0], n)
    ys = np.linspace(lo[1], hi[1], n)
    hx, hy = xs[1] - xs[0], ys[1] - ys[0]
    with np.errstate(divide="ignore"):
        g = field_on(xs, ys, stations)
    X, Y = np.meshgrid(xs, ys)
    g[~inside_polygon(X, Y, poly)] = np.inf
    r, c = np.unravel_index(np.argmin(g), g.shape)
    best, best_g = (xs[c], ys[r]), g[r, c]
    for i in range(len(poly)):
        a, b = poly[i], poly[(i + 1) % len(poly)]
        m = max(2, int(np.hypot(*(b - a)) / min(hx, hy)) + 1)
        for t in np.linspace(0.0, 1.0, m):
            q = a + t * (b - a)
            d2 = np.sum((stations.positions - q) ** 2, axis=1)
            if d2.min() == 0.0:
                continue
            gq = np.sum(d2 ** (-stations.alpha / 2))
            if gq < best_g:
                best, best_g = (q[0], q[1]), gq
    return best, hx, hy


def sinr_grid(stations, roi, res, cap=1e6):
    """All per-station SINRs at roi cell centres, shape (res, res, n)."""
    k = np.arange(res) + 0.5
    xs = roi.min_x + k * roi.width / res
    ys = roi.min_y + k * roi.height / res
    X, Y = np.meshgrid(xs, ys)
    p = np.stack([((X - sx) ** 2 + (Y - sy) ** 2) ** (-stations.alpha / 2)
                  for sx, sy in stations.positions], axis=-1)
    total = p.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = p / (total - p)
    s[~np.isfinite(s)] = cap
    return np.minimum(s, cap)
