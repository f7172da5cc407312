"""Closed-form field math: interference, its gradient, SINR, gain and rate.

Transmit power is uniform and thermal noise is zero, so every quantity depends
only on distances and the path-loss exponent ``alpha``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import BadIndex, EmptySet, InvalidParameter, SingularPoint

if TYPE_CHECKING:
    from .scenario import StationSet

EPS_SINGULAR = 1e-9
DEFAULT_SINR_CAP = 1e6


@dataclass(frozen=True)
class RadioParams:
    alpha: float = 4.0
    beta: float = 1.0
    bandwidth_w: float = 1.0
    h: float = 0.0
    kappa: float = 1.0
    sinr_cap: float = DEFAULT_SINR_CAP

    def __post_init__(self):
        if not self.alpha > 2:
            raise InvalidParameter(f"alpha must exceed 2, got {self.alpha}")
        if not self.beta > 0:
            raise InvalidParameter(f"beta must be positive, got {self.beta}")
        if not self.bandwidth_w > 0:
            raise InvalidParameter("bandwidth_w must be positive")
        if not self.sinr_cap > 0:
            raise InvalidParameter("sinr_cap must be positive")
        if self.h < 0:
            raise InvalidParameter("h must be >= 0")


def _sq_distances(z, stations: "StationSet") -> np.ndarray:
    d = stations.positions - np.asarray(z, dtype=float).reshape(2)
    d2 = np.einsum("ij,ij->i", d, d)
    if len(d2) and d2.min() < EPS_SINGULAR ** 2:
        i = int(d2.argmin())
        raise SingularPoint(f"point {tuple(z)} coincides with station {i}")
    return d2


def interference(z, stations: "StationSet") -> float:
    """Sum of received powers at ``z``: sum_i |z - z_i|^-alpha."""
    d2 = _sq_distances(z, stations)
    return float(np.sum(d2 ** (-0.5 * stations.alpha)))


def interference_gradient(z, stations: "StationSet") -> np.ndarray:
    d = np.asarray(z, dtype=float).reshape(2) - stations.positions
    d2 = _sq_distances(z, stations)
    w = -stations.alpha * d2 ** (-0.5 * stations.alpha - 1.0)
    return w @ d


def sinr(z, k: int, stations: "StationSet", sinr_cap: float = DEFAULT_SINR_CAP) -> float:
    """SINR at ``z`` when served by station ``k`` (zero noise), capped at ``sinr_cap``."""
    n = len(stations)
    if not 0 <= k < n:
        raise BadIndex(f"station index {k} out of range for {n} stations")
    d2 = _sq_distances(z, stations)
    p = d2 ** (-0.5 * stations.alpha)
    others = float(np.sum(np.delete(p, k)))
    if others == 0.0 or p[k] >= sinr_cap * others:
        return float(sinr_cap)
    return float(p[k] / others)


def best_server(z, stations: "StationSet") -> int:
    """Nearest station (lowest index on ties); it also has the largest SINR."""
    if len(stations) == 0:
        raise EmptySet("no stations")
    d2 = _sq_distances(z, stations)
    return int(np.argmin(d2))


def shannon_rate(s: float, params: RadioParams = RadioParams()) -> float:
    if s < 0:
        raise InvalidParameter(f"SINR must be >= 0, got {s}")
    return params.bandwidth_w * math.log2(1.0 + min(s, params.sinr_cap))


def channel_gain(d: float, params: RadioParams = RadioParams()) -> float:
    """kappa / (h^2 + d^2)^(alpha/2)."""
    if d < 0:
        raise InvalidParameter(f"distance must be >= 0, got {d}")
    r2 = params.h * params.h + d * d
    if r2 == 0.0:
        raise SingularPoint("zero distance with zero antenna height")
    return params.kappa * r2 ** (-0.5 * params.alpha)
