"""Network scenarios: PPP base-station fields, rectangles and file formats."""
from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ConfigError, DuplicatePoint, InvalidParameter
from .optimizer import DescentConfig

RNG_ALGORITHM = f"numpy.random.PCG64 (numpy {np.__version__})"


@dataclass(frozen=True)
class Rect:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self):
        for name in ("min_x", "min_y", "max_x", "max_y"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidParameter(f"rect {name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if not (self.max_x > self.min_x and self.max_y > self.min_y):
            raise InvalidParameter(f"degenerate rectangle {self.as_tuple()}")

    @classmethod
    def parse(cls, text: str) -> "Rect":
        """Parse ``"x0,y0,x1,y1"``."""
        parts = [p.strip() for p in str(text).split(",")]
        if len(parts) != 4:
            raise ConfigError(f"expected 'x0,y0,x1,y1', got {text!r}")
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise ConfigError(f"bad rectangle {text!r}: {exc}") from None
        return cls(*vals)

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    @property
    def area(self) -> float:
        return self.width * self.height

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.min_x, self.min_y, self.max_x, self.max_y)

    def contains(self, x: float, y: float, tol: float = 0.0) -> bool:
        return (self.min_x - tol <= x <= self.max_x + tol
                and self.min_y - tol <= y <= self.max_y + tol)

    def contains_rect(self, other: "Rect") -> bool:
        return (self.min_x <= other.min_x and self.min_y <= other.min_y
                and other.max_x <= self.max_x and other.max_y <= self.max_y)

    def margin_to(self, inner: "Rect") -> float:
        """Smallest gap between ``inner`` and this rectangle's sides."""
        return min(inner.min_x - self.min_x, inner.min_y - self.min_y,
                   self.max_x - inner.max_x, self.max_y - inner.max_y)

    def __str__(self) -> str:
        return ",".join(repr(v) for v in self.as_tuple())


@dataclass(frozen=True, eq=False)
class StationSet:
    """Base-station positions (an ``(n, 2)`` float array) and path-loss exponent."""

    positions: np.ndarray
    alpha: float = 4.0

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(pos)):
            raise InvalidParameter("station positions must be finite")
        if len(pos) > 1 and len(np.unique(pos, axis=0)) != len(pos):
            raise DuplicatePoint("station positions must be pairwise distinct")
        if not self.alpha > 2:
            raise InvalidParameter(f"alpha must exceed 2, got {self.alpha}")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "alpha", float(self.alpha))

    def __len__(self) -> int:
        return len(self.positions)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StationSet):
            return NotImplemented
        return (self.alpha == other.alpha
                and np.array_equal(self.positions, other.positions))

    def with_added(self, points) -> "StationSet":
        extra = np.asarray(points, dtype=float).reshape(-1, 2)
        return StationSet(np.vstack([self.positions, extra]), self.alpha)


@dataclass(frozen=True)
class ScenarioConfig:
    extent: Rect = Rect(0.0, 0.0, 40.0, 40.0)
    roi: Rect = Rect(10.0, 10.0, 30.0, 30.0)
    lambda_: float = 0.075
    seed: int = 0
    alpha: float = 4.0
    beta: float = 1.0
    k_new: int = 5
    grid_resolution: int = 500
    descent: DescentConfig = field(default_factory=DescentConfig)

    def __post_init__(self):
        if not self.extent.contains_rect(self.roi):
            raise InvalidParameter("roi must lie inside extent")
        if not (self.lambda_ >= 0 and math.isfinite(self.lambda_)):
            raise InvalidParameter(f"lambda must be >= 0, got {self.lambda_}")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameter("seed must be an unsigned 64-bit integer")
        if not self.alpha > 2:
            raise InvalidParameter(f"alpha must exceed 2, got {self.alpha}")
        if not self.beta > 0:
            raise InvalidParameter(f"beta must be positive, got {self.beta}")
        if self.k_new < 0:
            raise InvalidParameter("k_new must be >= 0")
        if self.grid_resolution < 2:
            raise InvalidParameter("grid_resolution must be >= 2")

    @property
    def edge_buffer_ok(self) -> bool:
        """True when the roi keeps at least one mean spacing from the extent border."""
        if self.lambda_ <= 0:
            return True
        return self.extent.margin_to(self.roi) >= 1.0 / math.sqrt(self.lambda_)

    def resolved_descent(self) -> DescentConfig:
        """Descent settings with the default step tied to the mean spacing."""
        return self.descent.resolve(self.lambda_)

    def to_text(self) -> str:
        lines = [
            f"extent = {self.extent}",
            f"roi = {self.roi}",
            f"lambda = {self.lambda_!r}",
            f"seed = {self.seed}",
            f"alpha = {self.alpha!r}",
            f"beta = {self.beta!r}",
            f"k_new = {self.k_new}",
            f"grid_resolution = {self.grid_resolution}",
        ]
        for f in dataclasses.fields(DescentConfig):
            v = getattr(self.descent, f.name)
            if v is not None:
                lines.append(f"descent.{f.name} = {v!r}")
        return "\n".join(lines) + "\n"


_SCALARS = {
    "lambda": ("lambda_", float),
    "seed": ("seed", int),
    "alpha": ("alpha", float),
    "beta": ("beta", float),
    "k_new": ("k_new", int),
    "grid_resolution": ("grid_resolution", int),
}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(text: str) -> ScenarioConfig:
    """Parse a flat ``key = value`` scenario document.

    Keys are the ScenarioConfig field names (``lambda`` for the intensity);
    descent settings use ``descent.<field>``. Unknown keys raise ConfigError,
    out-of-range values raise InvalidParameter.
    """
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",),
                                       inline_comment_prefixes=None, strict=True)
    try:
        parser.read_string("[scenario]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None

    kwargs: dict = {}
    descent: dict = {}
    descent_fields = {f.name: f for f in dataclasses.fields(DescentConfig)}
    for key, raw in parser.items("scenario"):
        try:
            if key in ("extent", "roi"):
                kwargs[key] = Rect.parse(raw)
            elif key in _SCALARS:
                name, conv = _SCALARS[key]
                kwargs[name] = conv(raw.strip())
            elif key.startswith("descent.") and key[8:] in descent_fields:
                name = key[8:]
                if name == "multistart":
                    descent[name] = _parse_bool(raw)
                elif name == "max_iters":
                    descent[name] = int(raw.strip())
                else:
                    descent[name] = float(raw.strip())
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except (ValueError, TypeError) as exc:
            if isinstance(exc, InvalidParameter):
                raise
            raise ConfigError(f"bad value for {key!r}: {exc}") from None
    if descent:
        kwargs["descent"] = DescentConfig(**descent)
    return ScenarioConfig(**kwargs)


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def generate_ppp(extent: Rect, lambda_: float, seed: int, alpha: float = 4.0) -> StationSet:
    """Homogeneous PPP on ``extent``: N ~ Poisson(lambda * area), then N uniform points."""
    if not lambda_ >= 0:
        raise InvalidParameter(f"lambda must be >= 0, got {lambda_}")
    rng = np.random.Generator(np.random.PCG64(seed))
    n = int(rng.poisson(lambda_ * extent.area))
    xs = rng.uniform(extent.min_x, extent.max_x, n)
    ys = rng.uniform(extent.min_y, extent.max_y, n)
    return StationSet(np.column_stack([xs, ys]), alpha)


def stations_in(stations: StationSet, rect: Rect) -> StationSet:
    """Stations inside ``rect``, boundary included."""
    p = stations.positions
    mask = ((p[:, 0] >= rect.min_x) & (p[:, 0] <= rect.max_x)
            & (p[:, 1] >= rect.min_y) & (p[:, 1] <= rect.max_y))
    return StationSet(p[mask], stations.alpha)


def format_stations(points: Iterable) -> str:
    return "".join(f"{float(x)!r},{float(y)!r}\n" for x, y in points)


def write_stations(path, stations: StationSet, header: str | None = None) -> None:
    text = format_stations(stations.positions)
    if header:
        text = "".join(f"# {line}\n" for line in header.splitlines()) + text
    Path(path).write_text(text)


def parse_stations(text: str, alpha: float = 4.0) -> StationSet:
    pts = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ConfigError(f"line {lineno}: expected 'x,y', got {line!r}")
        try:
            pts.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ConfigError(f"line {lineno}: bad number in {line!r}") from None
    return StationSet(np.array(pts, dtype=float).reshape(-1, 2), alpha)


def read_stations(path, alpha: float = 4.0) -> StationSet:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read station file {path}: {exc}") from None
    return parse_stations(text, alpha)
