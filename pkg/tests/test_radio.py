import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bsplan.errors import BadIndex, EmptySet, InvalidParameter, SingularPoint
from bsplan.radio import (RadioParams, best_server, channel_gain, interference,
                          interference_gradient, shannon_rate, sinr)
from bsplan.scenario import StationSet

from .conftest import random_stations

# smallest admissible exponent, standing in for alpha = 2 in closed-form examples
ALPHA_2 = float(np.nextafter(2.0, 3.0))
SQUARE = StationSet(np.array([(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]))


def finite_difference(z, stations, h):
    z = np.asarray(z, dtype=float)
    out = np.empty(2)
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        out[k] = (interference(z + e, stations) - interference(z - e, stations)) / (2 * h)
    return out


def far_points(rng, stations, count, size, clearance=0.05):
    pts = []
    while len(pts) < count:
        z = rng.uniform(0, size, 2)
        if np.min(np.hypot(*(stations.positions - z).T)) >= clearance:
            pts.append(z)
    return pts


class TestInterference:
    def test_square_symmetry(self):
        assert interference((0, 0), SQUARE) == pytest.approx(1.0)

    def test_single_station_alpha2(self):
        s = StationSet(np.array([(3.0, 4.0)]), ALPHA_2)
        assert interference((0, 0), s) == pytest.approx(0.04)

    def test_singular(self):
        with pytest.raises(SingularPoint):
            interference((1.0, 1.0), SQUARE)
        with pytest.raises(SingularPoint):
            interference((1.0 + 1e-10, 1.0), SQUARE)

    def test_positive(self, rng):
        s = random_stations(rng, 20)
        assert interference((5.123, 5.456), s) > 0

    @given(st.floats(0.1, 10.0))
    def test_scale_invariance(self, c):
        s = StationSet(np.array([(0.0, 0.0), (3.0, 1.0), (-2.0, 2.5)]))
        z = np.array([0.7, 0.9])
        scaled = StationSet(s.positions * c)
        assert interference(z * c, scaled) == pytest.approx(c ** -4 * interference(z, s), rel=1e-10)
        for k in range(3):
            assert sinr(z * c, k, scaled) == pytest.approx(sinr(z, k, s), rel=1e-10)


class TestGradient:
    def test_square_symmetry(self):
        assert interference_gradient((0, 0), SQUARE) == pytest.approx((0, 0), abs=1e-15)

    def test_single_station(self):
        s = StationSet(np.array([(0.0, 0.0)]))
        assert interference_gradient((1, 0), s) == pytest.approx((-4, 0))

    def test_finite_differences(self, rng):
        for _ in range(5):
            s = random_stations(rng, 25)
            for z in far_points(rng, s, 40, 10.0):
                g = interference_gradient(z, s)
                fd = finite_difference(z, s, 1e-6 * 10.0)
                assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)

    def test_laplacian_of_single_station(self):
        alpha = 4.0
        s = StationSet(np.array([(0.0, 0.0)]), alpha)
        for r in (0.5, 1.0, 2.0):
            z = np.array([r, 0.0])
            h = 1e-4 * r
            lap = 0.0
            for e in (np.array([h, 0]), np.array([0, h])):
                lap += (interference(z + e, s) - 2 * interference(z, s) + interference(z - e, s)) / h**2
            assert lap == pytest.approx(alpha**2 * r ** (-alpha - 2), rel=1e-3)


class TestSinr:
    def test_midpoint(self):
        s = StationSet(np.array([(0.0, 0.0), (2.0, 0.0)]), alpha=3.0)
        assert sinr((1, 0), 0, s) == pytest.approx(1.0)

    @pytest.mark.parametrize("m", [2, 3, 5, 8])
    def test_equidistant(self, m):
        ang = 2 * np.pi * np.arange(m) / m
        s = StationSet(np.column_stack([np.cos(ang), np.sin(ang)]))
        assert sinr((0, 0), 0, s) == pytest.approx(1 / (m - 1))

    def test_direct_evaluation(self):
        s = StationSet(np.array([(0.0, 0.0), (4.0, 0.0)]))
        assert sinr((1, 0), 0, s) == pytest.approx(81.0)

    def test_single_station_is_capped(self):
        s = StationSet(np.array([(0.0, 0.0)]))
        assert sinr((1, 1), 0, s) == 1e6
        assert sinr((1, 1), 0, s, sinr_cap=10.0) == 10.0

    def test_bad_index(self):
        with pytest.raises(BadIndex):
            sinr((0.5, 0.5), 4, SQUARE)
        with pytest.raises(BadIndex):
            sinr((0.5, 0.5), -1, SQUARE)

    def test_at_most_one_station_above_one(self, rng):
        s = random_stations(rng, 30)
        for z in far_points(rng, s, 300, 10.0, clearance=1e-6):
            above = [k for k in range(len(s)) if sinr(z, k, s) > 1.0]
            assert len(above) <= 1


class TestBestServer:
    def test_examples(self):
        s = StationSet(np.array([(0.0, 0.0), (10.0, 0.0)]))
        assert best_server((1, 1), s) == 0
        assert best_server((5, 3), s) == 0
        assert best_server((5, 3), StationSet(np.array([(10.0, 0.0), (0.0, 0.0)]))) == 0

    def test_empty(self):
        with pytest.raises(EmptySet):
            best_server((0, 0), StationSet(np.empty((0, 2))))

    def test_matches_exhaustive_sinr(self, rng):
        for _ in range(5):
            s = random_stations(rng, 15)
            for z in far_points(rng, s, 50, 10.0, clearance=1e-3):
                values = [sinr(z, k, s) for k in range(len(s))]
                assert best_server(z, s) == int(np.argmax(values))


class TestRates:
    @pytest.mark.parametrize("s,expected", [(1.0, 1.0), (3.0, 2.0), (0.0, 0.0)])
    def test_shannon(self, s, expected):
        assert shannon_rate(s) == pytest.approx(expected)

    def test_shannon_bandwidth_and_cap(self):
        assert shannon_rate(0.0, RadioParams(bandwidth_w=7.0)) == 0.0
        assert shannon_rate(1e9) == pytest.approx(math.log2(1 + 1e6))

    def test_negative_sinr(self):
        with pytest.raises(InvalidParameter):
            shannon_rate(-1.0)

    def test_channel_gain(self):
        assert channel_gain(0.0, RadioParams(alpha=ALPHA_2, h=1.0)) == pytest.approx(1.0)
        assert channel_gain(3.0, RadioParams(alpha=ALPHA_2, h=4.0)) == pytest.approx(0.04)
        assert channel_gain(2.0) == pytest.approx(2.0 ** -4)
        with pytest.raises(SingularPoint):
            channel_gain(0.0)

    def test_params_validation(self):
        with pytest.raises(InvalidParameter):
            RadioParams(alpha=2.0)
        with pytest.raises(InvalidParameter):
            RadioParams(beta=0.0)
        with pytest.raises(InvalidParameter):
            RadioParams(bandwidth_w=0.0)
        with pytest.raises(InvalidParameter):
            RadioParams(sinr_cap=0.0)
