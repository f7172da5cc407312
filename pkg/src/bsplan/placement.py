"""Greedy selection of new base-station sites from the candidate minima.

Heuristic 1 ranks the candidate set once and takes the k lowest. Heuristic 2
adds one station at a time and recomputes every candidate against the grown
network, re-triangulating incrementally after each addition.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import ConfigError, InvalidParameter, TooFewPoints
from .geometry import delaunay_triangulate, insert_point
from .optimizer import CandidateSite, DescentConfig, candidate_minima

if TYPE_CHECKING:
    from .scenario import Rect, StationSet

TIE_RTOL = 1e-12
SAME_SITE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PlacementPlan:
    added: list[tuple[float, float]]
    heuristic_id: int
    per_addition_interference: list[float]
    requested: int = 0
    # candidate pools, one per selection round (a single pool for heuristic 1)
    rounds: list[list[CandidateSite]] = field(default_factory=list, repr=False)
    roi: "Rect | None" = None

    @property
    def short(self) -> bool:
        """True when fewer sites than requested could be found."""
        return len(self.added) < self.requested

    def __len__(self) -> int:
        return len(self.added)


def _compare(a: CandidateSite, b: CandidateSite) -> int:
    if math.isclose(a.interference, b.interference, rel_tol=TIE_RTOL, abs_tol=0.0):
        return (a.triangle_id > b.triangle_id) - (a.triangle_id < b.triangle_id)
    return -1 if a.interference < b.interference else 1


def rank_candidates(cands: Sequence[CandidateSite]) -> list[CandidateSite]:
    """Ascending interference; near-ties go to the smaller triangle id."""
    return sorted(cands, key=functools.cmp_to_key(_compare))


def _check_stations(stations: "StationSet", k: int) -> None:
    if k < 0:
        raise InvalidParameter(f"k must be >= 0, got {k}")
    if len(stations) < 3:
        raise TooFewPoints(f"need at least 3 stations, got {len(stations)}")


def heuristic1(stations: "StationSet", roi: "Rect", k: int,
               cfg: DescentConfig = DescentConfig()) -> PlacementPlan:
    _check_stations(stations, k)
    tri = delaunay_triangulate(stations.positions)
    cfg = cfg.resolve_for(stations)
    pool = candidate_minima(tri, stations, roi, cfg)
    added, values = [], []
    for c in rank_candidates(pool):
        if len(added) == k:
            break
        # neighbouring triangles can share a boundary minimum; one site only
        if any(math.dist(c.position, a) <= SAME_SITE_TOL for a in added):
            continue
        added.append(c.position)
        values.append(c.interference)
    return PlacementPlan(added, 1, values, requested=k, rounds=[pool], roi=roi)


def heuristic2(stations: "StationSet", roi: "Rect", k: int,
               cfg: DescentConfig = DescentConfig(), rebuild: bool = False) -> PlacementPlan:
    """Greedy additions with re-ranking against the augmented network.

    ``rebuild=True`` re-triangulates from scratch each round instead of
    inserting the new site; both paths must pick the same sites.
    """
    _check_stations(stations, k)
    tri = delaunay_triangulate(stations.positions)
    cfg = cfg.resolve_for(stations)
    current = stations
    added, values, rounds = [], [], []
    for _ in range(k):
        pool = candidate_minima(tri, current, roi, cfg)
        rounds.append(pool)
        if not pool:
            break
        pick = rank_candidates(pool)[0]
        added.append(pick.position)
        values.append(pick.interference)
        current = current.with_added([pick.position])
        if rebuild:
            tri = delaunay_triangulate(current.positions)
        else:
            tri = insert_point(tri, pick.position)
    return PlacementPlan(added, 2, values, requested=k, rounds=rounds, roi=roi)


def run_heuristic(heuristic_id: int, stations, roi, k, cfg=DescentConfig()) -> PlacementPlan:
    if heuristic_id == 1:
        return heuristic1(stations, roi, k, cfg)
    if heuristic_id == 2:
        return heuristic2(stations, roi, k, cfg)
    raise ConfigError(f"unknown heuristic {heuristic_id!r} (expected 1 or 2)")


def format_plan(plan: PlacementPlan) -> str:
    lines = [f"heuristic,{plan.heuristic_id}"]
    if plan.roi is not None:
        lines.append(f"# roi,{plan.roi}")
    lines.append(f"# requested,{plan.requested}")
    for i, ((x, y), g) in enumerate(zip(plan.added, plan.per_addition_interference), 1):
        lines.append(f"{i},{x!r},{y!r},{g!r}")
    return "\n".join(lines) + "\n"


def parse_plan(text: str) -> PlacementPlan:
    from .scenario import Rect

    heuristic_id = None
    roi = None
    requested = 0
    added, values = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, rest = line[1:].strip().partition(",")
            if key == "roi":
                roi = Rect.parse(rest)
            elif key == "requested":
                requested = int(rest)
            continue
        parts = line.split(",")
        try:
            if heuristic_id is None:
                if parts[0] != "heuristic" or len(parts) != 2:
                    raise ConfigError(f"line {lineno}: expected 'heuristic,<1|2>' header")
                heuristic_id = int(parts[1])
                if heuristic_id not in (1, 2):
                    raise ConfigError(f"line {lineno}: unknown heuristic {parts[1]!r}")
                continue
            if len(parts) != 4 or int(parts[0]) != len(added) + 1:
                raise ConfigError(f"line {lineno}: expected 'order,x,y,g_at_selection'")
            added.append((float(parts[1]), float(parts[2])))
            values.append(float(parts[3]))
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(f"line {lineno}: malformed plan line {line!r}") from None
    if heuristic_id is None:
        raise ConfigError("plan file has no header")
    return PlacementPlan(added, heuristic_id, values, requested=requested or len(added), roi=roi)


def read_plan(path) -> PlacementPlan:
    try:
        return parse_plan(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read plan {path}: {exc}") from None


def plan_positions(plan: PlacementPlan) -> np.ndarray:
    return np.array(plan.added, dtype=float).reshape(-1, 2)
