"""Per-triangle minimization of the interference field.

Each Delaunay triangle (clipped to the region of interest) gets a projected,
normalized-gradient descent started from its centroid and, by default, from
its three edge midpoints; the lowest end point becomes the triangle's
candidate site.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import _kernels
from .errors import EmptyIntersection, InvalidParameter, NoDescent, PlannerError
from .geometry import (centroid, edge_midpoints, feasible_region, polygon_area,
                       project_to_polygon, triangle_area)
from .radio import EPS_SINGULAR

if TYPE_CHECKING:
    from .geometry import Triangulation
    from .scenario import Rect, StationSet

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DescentConfig:
    """Descent settings. ``step_dt=None`` means 1% of the mean station spacing."""

    step_dt: float | None = None
    max_iters: int = 10000
    grad_tol: float = 1e-10
    move_tol: float = 1e-9
    shrink_factor: float = 0.5
    multistart: bool = True

    def __post_init__(self):
        if self.step_dt is not None and not self.step_dt > 0:
            raise InvalidParameter(f"step_dt must be positive, got {self.step_dt}")
        if not 0 < self.shrink_factor < 1:
            raise InvalidParameter("shrink_factor must lie in (0, 1)")
        if self.max_iters < 1:
            raise InvalidParameter("max_iters must be >= 1")
        if self.grad_tol < 0 or self.move_tol < 0:
            raise InvalidParameter("tolerances must be >= 0")

    def resolve(self, lambda_: float) -> "DescentConfig":
        if self.step_dt is not None or not lambda_ > 0:
            return self
        return dataclasses.replace(self, step_dt=0.01 * math.sqrt(1.0 / lambda_))

    def resolve_for(self, stations: "StationSet") -> "DescentConfig":
        """Fill a missing step from the station density over their bounding box."""
        if self.step_dt is not None:
            return self
        p = stations.positions
        span = np.ptp(p, axis=0) if len(p) else np.zeros(2)
        area = float(span[0] * span[1])
        if len(p) < 2 or area <= 0:
            return dataclasses.replace(self, step_dt=0.01)
        return self.resolve(len(p) / area)


@dataclass(frozen=True, eq=False)
class DescentRun:
    start: tuple[float, float]
    position: tuple[float, float]
    interference: float
    iterations: int
    status: int
    history: np.ndarray  # accepted field values, start first
    path: np.ndarray  # accepted iterates, shape (iterations + 1, 2)

    @property
    def converged(self) -> bool:
        return self.status in (_kernels.CONVERGED_GRAD, _kernels.CONVERGED_MOVE)


@dataclass(frozen=True, eq=False)
class CandidateSite:
    position: tuple[float, float]
    interference: float
    triangle_id: int
    iterations: int
    converged: bool
    start: tuple[float, float] | None = None
    history: np.ndarray = field(default_factory=lambda: np.empty(0))
    path: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    runs: tuple[DescentRun, ...] = ()

    def start_spread(self) -> float:
        """Largest distance between the end points of the individual starts."""
        ends = [r.position for r in self.runs]
        return max((math.dist(a, b) for i, a in enumerate(ends) for b in ends[i + 1:]),
                   default=0.0)


def _station_arrays(stations):
    p = stations.positions
    return np.ascontiguousarray(p[:, 0]), np.ascontiguousarray(p[:, 1])


def descend_from(start, stations: "StationSet", poly: np.ndarray, cfg: DescentConfig) -> DescentRun:
    """Single projected descent from ``start`` (already inside ``poly``)."""
    if cfg.step_dt is None:
        cfg = cfg.resolve_for(stations)
    sx, sy = _station_arrays(stations)
    px = np.ascontiguousarray(poly[:, 0])
    py = np.ascontiguousarray(poly[:, 1])
    hist = np.empty(cfg.max_iters + 1)
    pathx = np.empty(cfg.max_iters + 1)
    pathy = np.empty(cfg.max_iters + 1)
    x, y, g, n, status = _kernels.descend(
        float(start[0]), float(start[1]), sx, sy, stations.alpha, px, py,
        float(cfg.step_dt), int(cfg.max_iters), float(cfg.grad_tol), float(cfg.move_tol),
        float(cfg.shrink_factor), hist, pathx, pathy)
    if status == _kernels.NO_DESCENT:
        raise NoDescent(f"no decreasing step from {tuple(start)}")
    return DescentRun(
        start=(float(start[0]), float(start[1])),
        position=(float(x), float(y)),
        interference=float(g),
        iterations=int(n),
        status=int(status),
        history=hist[:n + 1].copy(),
        path=np.column_stack([pathx[:n + 1], pathy[:n + 1]]),
    )


def _stuck_run(start, stations) -> DescentRun:
    sx, sy = _station_arrays(stations)
    g = _kernels.field_value(float(start[0]), float(start[1]), sx, sy, stations.alpha)
    s = (float(start[0]), float(start[1]))
    return DescentRun(s, s, float(g), 0, _kernels.NO_DESCENT, np.array([g]), np.array([s]))


def _clear_of_stations(p, poly, stations) -> tuple[float, float]:
    """Move a start that sits on a station a little toward the polygon's interior.

    A station can be a vertex of t cap roi (including a site added on the roi
    boundary), and the field is singular there.
    """
    d = np.hypot(*(stations.positions - np.asarray(p)).T)
    if len(d) == 0 or d.min() >= EPS_SINGULAR:
        return p
    c = poly.mean(axis=0)
    f = 1e-6
    while True:
        q = (p[0] + f * (c[0] - p[0]), p[1] + f * (c[1] - p[1]))
        if np.hypot(*(stations.positions - np.asarray(q)).T).min() >= EPS_SINGULAR or f >= 0.5:
            return q
        f *= 10


def feasible_polygon(t, points, roi: "Rect") -> np.ndarray:
    """t cap roi, or an empty array when that set has no interior."""
    poly = feasible_region(t, points, roi)
    if len(poly) < 3 or polygon_area(poly) <= 1e-9 * abs(triangle_area(t, points)):
        return np.empty((0, 2))
    return poly


def minimize_in_triangle(t, points, stations: "StationSet", roi: "Rect",
                         cfg: DescentConfig = DescentConfig(), triangle_id: int = -1) -> CandidateSite:
    poly = feasible_polygon(t, points, roi)
    if len(poly) == 0:
        raise EmptyIntersection(f"triangle {tuple(t)} has no interior inside the roi")
    cfg = cfg.resolve_for(stations)
    starts = [centroid(t, points)]
    if cfg.multistart:
        starts += edge_midpoints(t, points)
    starts = [_clear_of_stations(project_to_polygon(s, poly), poly, stations) for s in starts]

    runs = []
    for s in starts:
        try:
            runs.append(descend_from(s, stations, poly, cfg))
        except NoDescent:
            runs.append(_stuck_run(s, stations))
    if all(r.status == _kernels.NO_DESCENT for r in runs):
        raise NoDescent(f"triangle {tuple(t)}: no start admits a decreasing step")
    # lowest field value; converged runs, then earlier starts, win ties
    best = min(runs, key=lambda r: (r.interference, not r.converged))
    return CandidateSite(
        position=best.position,
        interference=best.interference,
        triangle_id=triangle_id,
        iterations=best.iterations,
        converged=best.converged,
        start=starts[0],
        history=best.history,
        path=best.path,
        runs=tuple(runs),
    )


def candidate_minima(tri: "Triangulation", stations: "StationSet", roi: "Rect",
                     cfg: DescentConfig = DescentConfig()) -> list[CandidateSite]:
    """One candidate per triangle whose intersection with ``roi`` has interior."""
    points = tri.points
    cfg = cfg.resolve_for(stations)
    out = []
    for tid, t in enumerate(tri.triangles):
        poly = feasible_polygon(t, points, roi)
        if len(poly) == 0:
            continue
        try:
            out.append(minimize_in_triangle(t, points, stations, roi, cfg, triangle_id=tid))
        except PlannerError as exc:
            log.info("triangle %d: %s", tid, exc)
            s = _clear_of_stations(project_to_polygon(centroid(t, points), poly), poly, stations)
            run = _stuck_run(s, stations)
            out.append(CandidateSite(s, run.interference, tid, 0, False, start=s,
                                     history=run.history, path=run.path, runs=(run,)))
    return out


def format_candidates(cands: Sequence[CandidateSite]) -> str:
    lines = ["# triangle_id,x,y,g,iterations,converged"]
    for c in cands:
        lines.append(f"{c.triangle_id},{c.position[0]!r},{c.position[1]!r},"
                     f"{c.interference!r},{c.iterations},{str(c.converged).lower()}")
    return "\n".join(lines) + "\n"


def parse_candidates(text: str) -> list[CandidateSite]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tid, x, y, g, it, conv = line.split(",")
        out.append(CandidateSite((float(x), float(y)), float(g), int(tid), int(it), conv == "true"))
    return out
