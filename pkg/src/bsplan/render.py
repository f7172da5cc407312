"""SVG 1.1 drawings of a scenario.

The output is a pure function of the inputs: coordinates are printed with a
fixed precision, elements are emitted in a fixed order and no timestamps or
random ids are written, so identical inputs give identical bytes.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Sequence
from xml.sax.saxutils import escape

from .errors import InvalidSpec
from .metrics import evaluate_grid
from .radio import RadioParams

if TYPE_CHECKING:
    from .geometry import Triangulation
    from .optimizer import CandidateSite
    from .placement import PlacementPlan
    from .scenario import Rect, StationSet

# drawing order, bottom to top
LAYERS = ("reception_areas", "triangulation", "roi", "stations",
          "descent_paths", "candidates", "added_stations")

# station i is shaded with PALETTE[i % len(PALETTE)]
PALETTE = (
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
)
BACKGROUND = "#ffffff"


@dataclass(frozen=True)
class RenderSpec:
    width: int = 800
    height: int = 800
    layers: tuple[str, ...] = ("reception_areas", "stations", "roi")
    raster_resolution: int = 250
    view: "Rect | None" = None  # world window; defaults to stations plus roi

    def __post_init__(self):
        if self.width < 100 or self.height < 100:
            raise InvalidSpec(f"canvas must be at least 100x100, got {self.width}x{self.height}")
        if not self.layers:
            raise InvalidSpec("no layers enabled")
        unknown = [name for name in self.layers if name not in LAYERS]
        if unknown:
            raise InvalidSpec(f"unknown layer(s): {', '.join(unknown)}")
        if len(set(self.layers)) != len(self.layers):
            raise InvalidSpec("duplicate layer")
        if self.raster_resolution < 2:
            raise InvalidSpec("raster_resolution must be >= 2")

    @property
    def layerset(self) -> str:
        return "-".join(name for name in LAYERS if name in self.layers)


def output_name(scenario: str, spec: RenderSpec) -> str:
    return f"{scenario}.{spec.layerset}.svg"


def _num(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Canvas:
    """World-to-pixel map with uniform scale and y pointing up."""

    def __init__(self, view: "Rect", width: int, height: int, pad: float = 10.0):
        self.view = view
        self.scale = min((width - 2 * pad) / view.width, (height - 2 * pad) / view.height)
        self.ox = (width - self.scale * view.width) / 2
        self.oy = (height - self.scale * view.height) / 2
        self.height = height

    def x(self, wx: float) -> float:
        return self.ox + (wx - self.view.min_x) * self.scale

    def y(self, wy: float) -> float:
        return self.height - self.oy - (wy - self.view.min_y) * self.scale

    def pt(self, p) -> str:
        return f"{_num(self.x(p[0]))},{_num(self.y(p[1]))}"


def _default_view(stations: "StationSet", roi: "Rect") -> "Rect":
    from .scenario import Rect

    xs = [roi.min_x, roi.max_x] + [float(v) for v in stations.positions[:, 0]]
    ys = [roi.min_y, roi.max_y] + [float(v) for v in stations.positions[:, 1]]
    return Rect(min(xs), min(ys), max(xs), max(ys))


def _reception(out, cv, stations, roi, params, res) -> None:
    grid = evaluate_grid(stations, roi, params, res)
    covered = grid.covered
    cw = roi.width / res
    ch = roi.height / res
    body = []
    total = 0
    for r in range(res):
        row_best = grid.best[r]
        row_cov = covered[r]
        c = 0
        while c < res:
            if not row_cov[c]:
                c += 1
                continue
            k = int(row_best[c])
            start = c
            while c < res and row_cov[c] and row_best[c] == k:
                c += 1
            n = c - start
            total += n
            x0 = cv.x(roi.min_x + start * cw)
            y1 = cv.y(roi.min_y + (r + 1) * ch)
            body.append(
                f'<rect x="{_num(x0)}" y="{_num(y1)}" width="{_num(n * cw * cv.scale)}" '
                f'height="{_num(ch * cv.scale)}" fill="{PALETTE[k % len(PALETTE)]}" '
                f'data-station="{k}" data-cells="{n}"/>')
    out.append(f'<g id="reception_areas" shape-rendering="crispEdges" '
               f'data-resolution="{res}" data-covered-cells="{total}">')
    out.extend(body)
    out.append("</g>")


def _triangulation(out, cv, tri) -> None:
    edges = set()
    for a, b, c in tri.triangles:
        for u, v in ((a, b), (b, c), (c, a)):
            edges.add((min(u, v), max(u, v)))
    pts = tri.points
    out.append('<g id="triangulation" stroke="#555555" stroke-width="0.8" fill="none">')
    for u, v in sorted(edges):
        out.append(f'<line x1="{_num(cv.x(pts[u][0]))}" y1="{_num(cv.y(pts[u][1]))}" '
                   f'x2="{_num(cv.x(pts[v][0]))}" y2="{_num(cv.y(pts[v][1]))}"/>')
    out.append("</g>")


def _roi(out, cv, roi) -> None:
    out.append(f'<rect id="roi" x="{_num(cv.x(roi.min_x))}" y="{_num(cv.y(roi.max_y))}" '
               f'width="{_num(roi.width * cv.scale)}" height="{_num(roi.height * cv.scale)}" '
               f'fill="none" stroke="#000000" stroke-width="4"/>')


def _stations(out, cv, stations) -> None:
    out.append('<g id="stations" fill="#000000">')
    for i, p in enumerate(stations.positions):
        out.append(f'<circle cx="{_num(cv.x(p[0]))}" cy="{_num(cv.y(p[1]))}" r="3" '
                   f'data-index="{i}"/>')
    out.append("</g>")


def _cross(cv, p, size=4.0) -> str:
    x, y = cv.x(p[0]), cv.y(p[1])
    return (f'<path class="start" d="M{_num(x - size)},{_num(y - size)}L{_num(x + size)},{_num(y + size)}'
            f'M{_num(x - size)},{_num(y + size)}L{_num(x + size)},{_num(y - size)}"/>')


def _candidates(out, cv, cands) -> None:
    out.append('<g id="candidates" stroke="#d62728" stroke-width="1.5" fill="none">')
    for c in cands:
        if c.start is not None:
            out.append(_cross(cv, c.start))
        out.append(f'<circle class="minimum" cx="{_num(cv.x(c.position[0]))}" '
                   f'cy="{_num(cv.y(c.position[1]))}" r="4" data-triangle="{c.triangle_id}"/>')
    out.append("</g>")


def _paths(out, cv, cands) -> None:
    out.append('<g id="descent_paths" stroke="#1f77b4" stroke-width="1" fill="none">')
    for c in cands:
        if len(c.path) < 2:
            continue
        pts = " ".join(cv.pt(p) for p in c.path)
        out.append(f'<polyline points="{pts}" data-triangle="{c.triangle_id}"/>')
    out.append("</g>")


def _added(out, cv, plan) -> None:
    out.append('<g id="added_stations">')
    for i, p in enumerate(plan.added, 1):
        x, y = cv.x(p[0]), cv.y(p[1])
        out.append(f'<rect x="{_num(x - 4)}" y="{_num(y - 4)}" width="8" height="8" '
                   f'fill="#000000" stroke="#ffffff" stroke-width="1"/>')
        out.append(f'<text class="added-label" x="{_num(x + 6)}" y="{_num(y - 6)}" '
                   f'font-family="sans-serif" font-size="14" font-weight="bold">{i}</text>')
    out.append("</g>")


def render_scenario(stations: "StationSet", roi: "Rect", tri: "Triangulation | None" = None,
                    candidates: "Sequence[CandidateSite] | None" = None,
                    plan: "PlacementPlan | None" = None, params: RadioParams | None = None,
                    spec: RenderSpec = RenderSpec(), title: str | None = None) -> str:
    """Serialize the requested layers; layers without data are skipped."""
    if not isinstance(spec, RenderSpec):
        raise InvalidSpec("spec must be a RenderSpec")
    if params is None:
        params = RadioParams(alpha=stations.alpha)
    view = spec.view or _default_view(stations, roi)
    cv = _Canvas(view, spec.width, spec.height)
    # the shading is the network after the planned additions, if any
    shown = stations.with_added(plan.added) if plan is not None and plan.added else stations

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{spec.width}" height="{spec.height}" '
        f'viewBox="0 0 {spec.width} {spec.height}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f'<rect width="{spec.width}" height="{spec.height}" fill="{BACKGROUND}"/>')
    for layer in LAYERS:
        if layer not in spec.layers:
            continue
        if layer == "reception_areas":
            _reception(out, cv, shown, roi, params, spec.raster_resolution)
        elif layer == "triangulation" and tri is not None:
            _triangulation(out, cv, tri)
        elif layer == "roi":
            _roi(out, cv, roi)
        elif layer == "stations":
            _stations(out, cv, stations)
        elif layer == "descent_paths" and candidates:
            _paths(out, cv, candidates)
        elif layer == "candidates" and candidates:
            _candidates(out, cv, candidates)
        elif layer == "added_stations" and plan is not None:
            _added(out, cv, plan)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, document: str) -> Path:
    path = Path(path)
    path.write_text(document, encoding="utf-8")
    return path


__all__ = ["LAYERS", "PALETTE", "RenderSpec", "output_name", "render_scenario", "write_svg"]
