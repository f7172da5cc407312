"""Grid estimates of beta-coverage and capacity over the region of interest.

Every quantity is a cell-counting estimator on a uniform grid of cell centres.
Stations outside the roi still interfere; only roi cells are scored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numba
import numpy as np

from . import _kernels
from .errors import BadIndex, EmptySet, InvalidParameter, MismatchedConfig
from .radio import EPS_SINGULAR, RadioParams

if TYPE_CHECKING:
    from .scenario import Rect, StationSet

DEFAULT_RESOLUTION = 1000


def set_threads(n: int | None) -> None:
    """Cap worker threads for grid evaluation (None leaves numba's default)."""
    if n is not None:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


def cell_centers(roi: "Rect", resolution: int) -> tuple[np.ndarray, np.ndarray]:
    if resolution < 2:
        raise InvalidParameter(f"resolution must be >= 2, got {resolution}")
    k = np.arange(resolution) + 0.5
    return roi.min_x + k * (roi.width / resolution), roi.min_y + k * (roi.height / resolution)


@dataclass(frozen=True, eq=False)
class GridField:
    """Per-cell evaluation of the network over the roi (row = y index)."""

    xs: np.ndarray
    ys: np.ndarray
    best: np.ndarray
    sinr_best: np.ndarray
    capacity_all: np.ndarray
    capacity_best: np.ndarray
    station_cells: np.ndarray  # per station: cells with SINR >= beta
    over_one: np.ndarray  # per cell: stations with SINR > 1
    beta: float
    cell_area: float

    @property
    def covered(self) -> np.ndarray:
        return self.sinr_best >= self.beta


def evaluate_grid(stations: "StationSet", roi: "Rect", params: RadioParams,
                  resolution: int) -> GridField:
    if len(stations) == 0:
        raise EmptySet("no stations to evaluate")
    xs, ys = cell_centers(roi, resolution)
    sx = np.ascontiguousarray(stations.positions[:, 0])
    sy = np.ascontiguousarray(stations.positions[:, 1])
    shape = (resolution, resolution)
    best = np.zeros(shape, dtype=np.int64)
    sinr_best = np.zeros(shape)
    cap_all = np.zeros(shape)
    cap_best = np.zeros(shape)
    counts = np.zeros((resolution, len(stations)), dtype=np.int64)
    over = np.zeros(shape, dtype=np.int64)
    _kernels.grid_field(xs, ys, sx, sy, float(stations.alpha), float(params.beta),
                        float(params.sinr_cap), EPS_SINGULAR ** 2,
                        best, sinr_best, cap_all, cap_best, counts, over)
    return GridField(xs, ys, best, sinr_best, cap_all, cap_best, counts.sum(axis=0),
                     over, float(params.beta), roi.area / (resolution * resolution))


def _params(stations, beta, sinr_cap=None) -> RadioParams:
    kw = {"alpha": stations.alpha, "beta": beta}
    if sinr_cap is not None:
        kw["sinr_cap"] = sinr_cap
    return RadioParams(**kw)


def coverage(stations: "StationSet", roi: "Rect", beta: float,
             resolution: int = DEFAULT_RESOLUTION) -> tuple[float, float]:
    """(covered area, covered fraction of the roi) at SINR threshold ``beta``."""
    field_ = evaluate_grid(stations, roi, _params(stations, beta), resolution)
    frac = float(np.count_nonzero(field_.covered)) / field_.covered.size
    return frac * roi.area, frac


def reception_areas(stations: "StationSet", roi: "Rect", beta: float,
                    resolution: int = DEFAULT_RESOLUTION) -> np.ndarray:
    field_ = evaluate_grid(stations, roi, _params(stations, beta), resolution)
    return field_.station_cells * field_.cell_area


def reception_area(i: int, stations: "StationSet", roi: "Rect", beta: float,
                   resolution: int = DEFAULT_RESOLUTION) -> float:
    if not 0 <= i < len(stations):
        raise BadIndex(f"station index {i} out of range for {len(stations)} stations")
    return float(reception_areas(stations, roi, beta, resolution)[i])


def average_capacity(stations: "StationSet", roi: "Rect", params: RadioParams = RadioParams(),
                     resolution: int = DEFAULT_RESOLUTION, best_server_only: bool = False) -> float:
    """Grid mean of sum_k log2(1 + SINR_k) (bandwidth normalized to 1).

    With ``best_server_only`` only the serving station's rate is counted.
    """
    field_ = evaluate_grid(stations, roi, params, resolution)
    cap = field_.capacity_best if best_server_only else field_.capacity_all
    return float(cap.sum() / cap.size)


@dataclass(frozen=True)
class MetricsReport:
    coverage_area: float
    coverage_fraction: float
    avg_capacity_density: float
    station_count_roi: int
    grid_resolution: int
    avg_capacity_best_server: float = math.nan
    roi: "Rect | None" = field(default=None, compare=False)
    beta: float = 1.0
    alpha: float = 4.0
    station_count: int = 0


def evaluate(stations: "StationSet", roi: "Rect", params: RadioParams | None = None,
             resolution: int = DEFAULT_RESOLUTION) -> MetricsReport:
    """All metrics from a single grid pass."""
    from .scenario import stations_in

    if params is None:
        params = RadioParams(alpha=stations.alpha)
    if params.alpha != stations.alpha:
        raise MismatchedConfig("params.alpha differs from the station set's alpha")
    f = evaluate_grid(stations, roi, params, resolution)
    frac = float(np.count_nonzero(f.covered)) / f.covered.size
    return MetricsReport(
        coverage_area=frac * roi.area,
        coverage_fraction=frac,
        avg_capacity_density=float(f.capacity_all.sum() / f.capacity_all.size),
        avg_capacity_best_server=float(f.capacity_best.sum() / f.capacity_best.size),
        station_count_roi=len(stations_in(stations, roi)),
        grid_resolution=resolution,
        roi=roi,
        beta=params.beta,
        alpha=params.alpha,
        station_count=len(stations),
    )


def pct_increase(base: float, new: float) -> float:
    if base == 0:
        return 0.0 if new == 0 else math.copysign(math.inf, new)
    return 100.0 * (new - base) / base


@dataclass(frozen=True)
class Comparison:
    base: MetricsReport
    h1: MetricsReport
    h2: MetricsReport

    METRICS = ("coverage_area", "coverage_fraction", "avg_capacity_density",
               "avg_capacity_best_server", "station_count_roi")

    def rows(self):
        for name in self.METRICS:
            b, v1, v2 = (getattr(r, name) for r in (self.base, self.h1, self.h2))
            yield name, b, v1, v2, pct_increase(b, v1), pct_increase(b, v2)

    def pct(self, metric: str) -> tuple[float, float]:
        for name, _, _, _, p1, p2 in self.rows():
            if name == metric:
                return p1, p2
        raise KeyError(metric)

    def to_csv(self) -> str:
        lines = ["metric,scenario0,heuristic1,heuristic2,pct_increase_h1,pct_increase_h2"]
        for name, b, v1, v2, p1, p2 in self.rows():
            lines.append(f"{name},{b!r},{v1!r},{v2!r},{p1!r},{p2!r}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        head = f"{'':<28}{'Scenario 0':>14}{'Heuristic 1':>14}{'Heuristic 2':>14}"
        b, h1, h2 = self.base, self.h1, self.h2
        p_cap = self.pct("avg_capacity_density")
        p_cov = self.pct("coverage_area")
        p_best = self.pct("avg_capacity_best_server")

        def row(label, vals):
            return f"{label:<28}" + "".join(f"{v:>14}" for v in vals)

        lines = [
            f"Average capacity over the roi [bits/s/Hz per unit area], grid {b.grid_resolution}",
            head,
            row("Capacity", [f"{r.avg_capacity_density:.4f}" for r in (b, h1, h2)]),
            row("Percentage Increase", ["-", f"{p_cap[0]:.2f}%", f"{p_cap[1]:.2f}%"]),
            row("Capacity (best server)", [f"{r.avg_capacity_best_server:.4f}" for r in (b, h1, h2)]),
            row("Percentage Increase", ["-", f"{p_best[0]:.2f}%", f"{p_best[1]:.2f}%"]),
            "",
            f"Coverage of the roi [area units], beta={b.beta:g}",
            head,
            row("Total coverage area", [f"{r.coverage_area:.4f}" for r in (b, h1, h2)]),
            row("Coverage percentage", [f"{100 * r.coverage_fraction:.2f}%" for r in (b, h1, h2)]),
            row("Percentage Increase", ["-", f"{p_cov[0]:.2f}%", f"{p_cov[1]:.2f}%"]),
            row("Stations in roi", [str(r.station_count_roi) for r in (b, h1, h2)]),
        ]
        return "\n".join(lines) + "\n"


def compare_scenarios(base: MetricsReport, h1: MetricsReport, h2: MetricsReport) -> Comparison:
    for other in (h1, h2):
        if (other.grid_resolution != base.grid_resolution or other.beta != base.beta
                or (base.roi is not None and other.roi is not None and other.roi != base.roi)):
            raise MismatchedConfig("reports differ in roi, beta or grid resolution")
    return Comparison(base, h1, h2)


def report_to_csv(report: MetricsReport) -> str:
    lines = ["metric,value"]
    for name in Comparison.METRICS:
        lines.append(f"{name},{getattr(report, name)!r}")
    return "\n".join(lines) + "\n"


def report_to_text(report: MetricsReport, label: str = "Scenario") -> str:
    return (f"{label}\n"
            f"  coverage area        {report.coverage_area:.4f}\n"
            f"  coverage percentage  {100 * report.coverage_fraction:.2f}%\n"
            f"  capacity             {report.avg_capacity_density:.4f}\n"
            f"  capacity (best)      {report.avg_capacity_best_server:.4f}\n"
            f"  stations in roi      {report.station_count_roi}\n"
            f"  grid resolution      {report.grid_resolution}\n")
