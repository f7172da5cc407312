"""Compiled inner loops: field evaluation, projected descent, grid metrics.

Kept free of Python objects so numba can compile them; the public modules wrap
them with validation and dataclasses.
"""
import math

import numpy as np
from numba import njit, prange
from numba.core import config

# an outdated TBB is probed first and warns on every run; prefer OpenMP
if config.THREADING_LAYER == "default":
    config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

# descent exit states
CONVERGED_GRAD = 0
CONVERGED_MOVE = 1
MAX_ITERS = 2
NO_DESCENT = 3

MIN_STEP = 1e-15


@njit(cache=True, inline="always")
def _power(d2, e):
    # d2 ** e, with the alpha = 4 case spelled out (pow() dominates run time)
    if e == -2.0:
        r = 1.0 / d2
        return r * r
    return d2 ** e


@njit(cache=True)
def field_value(px, py, sx, sy, alpha):
    e = -0.5 * alpha
    g = 0.0
    for i in range(sx.shape[0]):
        dx = px - sx[i]
        dy = py - sy[i]
        d2 = dx * dx + dy * dy
        if d2 == 0.0:
            return math.inf
        g += _power(d2, e)
    return g


@njit(cache=True)
def field_value_grad(px, py, sx, sy, alpha):
    e = -0.5 * alpha
    g = 0.0
    gx = 0.0
    gy = 0.0
    for i in range(sx.shape[0]):
        dx = px - sx[i]
        dy = py - sy[i]
        d2 = dx * dx + dy * dy
        if d2 == 0.0:
            return math.inf, 0.0, 0.0
        t = _power(d2, e)
        g += t
        w = -alpha * t / d2
        gx += w * dx
        gy += w * dy
    return g, gx, gy


@njit(cache=True)
def project_to_polygon(px, py, xs, ys):
    """Closest point to (px, py) in the convex ccw polygon (xs, ys)."""
    n = xs.shape[0]
    if n == 1:
        return xs[0], ys[0]
    if n >= 3:
        inside = True
        for i in range(n):
            j = (i + 1) % n
            cross = (xs[j] - xs[i]) * (py - ys[i]) - (ys[j] - ys[i]) * (px - xs[i])
            if cross < 0.0:
                inside = False
                break
        if inside:
            return px, py
    best = math.inf
    bx = xs[0]
    by = ys[0]
    m = n if n >= 3 else 1
    for i in range(m):
        j = (i + 1) % n
        ex = xs[j] - xs[i]
        ey = ys[j] - ys[i]
        ll = ex * ex + ey * ey
        t = 0.0
        if ll > 0.0:
            t = ((px - xs[i]) * ex + (py - ys[i]) * ey) / ll
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
        if t == 0.0:
            qx, qy = xs[i], ys[i]
        elif t == 1.0:
            qx, qy = xs[j], ys[j]
        else:
            qx = xs[i] + t * ex
            qy = ys[i] + t * ey
        d = (qx - px) * (qx - px) + (qy - py) * (qy - py)
        if d < best:
            best = d
            bx = qx
            by = qy
    return bx, by


@njit(cache=True)
def descend(x0, y0, sx, sy, alpha, polyx, polyy, step_dt, max_iters,
            grad_tol, move_tol, shrink, hist, pathx, pathy):
    """Normalized-gradient descent with backtracking, projected onto a polygon.

    Every accepted step strictly lowers the field value. Fills ``hist`` and
    ``path*`` with the accepted iterates and returns
    (x, y, g, n_accepted, status).
    """
    x = x0
    y = y0
    g, gx, gy = field_value_grad(x, y, sx, sy, alpha)
    hist[0] = g
    pathx[0] = x
    pathy[0] = y
    n = 0
    status = MAX_ITERS
    while n < max_iters:
        gn = math.sqrt(gx * gx + gy * gy)
        if gn < grad_tol:
            status = CONVERGED_GRAD
            break
        ux = gx / gn
        uy = gy / gn
        s = step_dt
        accepted = False
        done = False
        while True:
            qx, qy = project_to_polygon(x - s * ux, y - s * uy, polyx, polyy)
            moved = math.sqrt((qx - x) * (qx - x) + (qy - y) * (qy - y))
            if n > 0 and (moved < move_tol or s < MIN_STEP):
                status = CONVERGED_MOVE
                done = True
                break
            if n == 0 and s < MIN_STEP:
                status = NO_DESCENT
                done = True
                break
            gq = field_value(qx, qy, sx, sy, alpha)
            if gq < g:
                accepted = True
                break
            s *= shrink
        if done:
            break
        if accepted:
            n += 1
            x = qx
            y = qy
            g, gx, gy = field_value_grad(x, y, sx, sy, alpha)
            hist[n] = g
            pathx[n] = x
            pathy[n] = y
            if moved < move_tol:
                status = CONVERGED_MOVE
                break
    return x, y, g, n, status


@njit(parallel=True, cache=True)
def grid_field(xs, ys, sx, sy, alpha, beta, cap, eps2,
               best, sinr_best, cap_all, cap_best, counts, n_over_one):
    """Per-cell best server, its SINR, Shannon sums and per-station coverage counts.

    ``counts[r, i]`` counts cells of row r where station i has SINR >= beta;
    ``n_over_one`` counts stations with SINR > 1 at each cell.
    """
    ny = ys.shape[0]
    nx = xs.shape[0]
    ns = sx.shape[0]
    e = -0.5 * alpha
    for r in prange(ny):
        f = np.empty(ns)
        d2s = np.empty(ns)
        py = ys[r]
        for c in range(nx):
            px = xs[c]
            bi = 0
            bd = math.inf
            for i in range(ns):
                dx = px - sx[i]
                dy = py - sy[i]
                d2 = dx * dx + dy * dy
                d2s[i] = d2
                if d2 < bd:
                    bd = d2
                    bi = i
            singular = bd <= eps2
            rest = 0.0
            for i in range(ns):
                if i != bi and not singular:
                    f[i] = _power(d2s[i], e)
                    rest += f[i]
            if singular:
                sb = cap
                fb = math.inf
            else:
                fb = _power(bd, e)
                if rest == 0.0 or fb >= cap * rest:
                    sb = cap
                else:
                    sb = fb / rest
            best[r, c] = bi
            sinr_best[r, c] = sb
            lb = math.log2(1.0 + sb)
            cap_best[r, c] = lb
            total = lb
            over = 1 if sb > 1.0 else 0
            if sb >= beta:
                counts[r, bi] += 1
            if not singular:
                for i in range(ns):
                    if i == bi:
                        continue
                    si = f[i] / (fb + rest - f[i])
                    if si > cap:
                        si = cap
                    total += math.log2(1.0 + si)
                    if si >= beta:
                        counts[r, i] += 1
                    if si > 1.0:
                        over += 1
            cap_all[r, c] = total
            n_over_one[r, c] = over
