import xml.etree.ElementTree as ET

import numpy as np
import pytest

from bsplan.errors import InvalidSpec
from bsplan.geometry import delaunay_triangulate
from bsplan.metrics import evaluate_grid
from bsplan.optimizer import candidate_minima
from bsplan.placement import heuristic2
from bsplan.radio import RadioParams
from bsplan.render import LAYERS, RenderSpec, output_name, render_scenario, write_svg
from bsplan.scenario import Rect, generate_ppp

NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def scene():
    stations = generate_ppp(Rect(0, 0, 20, 20), 0.08, 5)
    roi = Rect(5, 5, 15, 15)
    return stations, roi


@pytest.fixture(scope="module")
def planned(scene):
    stations, roi = scene
    return heuristic2(stations, roi, 5)


def parse(doc):
    return ET.fromstring(doc.encode())


def layer_ids(root):
    return [el.get("id") for el in root if el.get("id")]


class TestSpec:
    @pytest.mark.parametrize("kw", [dict(width=99), dict(height=50), dict(layers=()),
                                    dict(layers=("stations", "heatmap")),
                                    dict(layers=("roi", "roi")), dict(raster_resolution=1)])
    def test_invalid(self, kw):
        with pytest.raises(InvalidSpec):
            RenderSpec(**kw)

    def test_layerset_is_canonical(self):
        a = RenderSpec(layers=("roi", "stations", "reception_areas"))
        b = RenderSpec(layers=("reception_areas", "stations", "roi"))
        assert a.layerset == b.layerset
        assert output_name("s", a) == f"s.{a.layerset}.svg"

    def test_render_rejects_non_spec(self, scene):
        with pytest.raises(InvalidSpec):
            render_scenario(*scene, spec={"width": 800})


def test_stations_and_roi_only(scene):
    stations, roi = scene
    root = parse(render_scenario(stations, roi, spec=RenderSpec(layers=("stations", "roi"))))
    assert layer_ids(root) == ["roi", "stations"]
    assert len(root.findall(f".//{NS}g[@id='stations']/{NS}circle")) == len(stations)


def test_deterministic(scene, planned):
    stations, roi = scene
    spec = RenderSpec(layers=LAYERS, raster_resolution=60)
    tri = delaunay_triangulate(stations.positions)
    cands = candidate_minima(tri, stations, roi)
    a = render_scenario(stations, roi, tri, cands, planned, spec=spec)
    b = render_scenario(stations, roi, tri, cands, planned, spec=spec)
    assert a == b
    root = parse(a)
    assert layer_ids(root) == list(LAYERS)


def test_added_labels(scene, planned):
    stations, roi = scene
    doc = render_scenario(stations, roi, plan=planned,
                          spec=RenderSpec(layers=("stations", "roi", "added_stations")))
    labels = [t for t in parse(doc).iter(NS + "text") if t.get("class") == "added-label"]
    assert [t.text for t in labels] == ["1", "2", "3", "4", "5"]


def test_reception_cells_match_coverage(scene, planned):
    stations, roi = scene
    res = 80
    root = parse(render_scenario(stations, roi, plan=planned,
                                 spec=RenderSpec(raster_resolution=res)))
    group = root.find(f".//{NS}g[@id='reception_areas']")
    cells = sum(int(r.get("data-cells")) for r in group)
    grid = evaluate_grid(stations.with_added(planned.added), roi, RadioParams(), res)
    assert cells == int(group.get("data-covered-cells")) == int(grid.covered.sum())
    per_station = np.zeros(len(stations) + 5, dtype=int)
    for r in group:
        per_station[int(r.get("data-station"))] += int(r.get("data-cells"))
    expected = np.bincount(grid.best[grid.covered], minlength=len(per_station))
    assert np.array_equal(per_station, expected)


def test_rects_stay_inside_canvas(scene):
    stations, roi = scene
    spec = RenderSpec(width=300, height=200, raster_resolution=40)
    root = parse(render_scenario(stations, roi, spec=spec))
    for r in root.find(f".//{NS}g[@id='reception_areas']"):
        x, y, w, h = (float(r.get(k)) for k in ("x", "y", "width", "height"))
        assert 0 <= x and x + w <= 300 + 1e-3 and 0 <= y and y + h <= 200 + 1e-3


def test_write_svg(scene, tmp_path):
    doc = render_scenario(*scene, spec=RenderSpec(layers=("roi",)))
    path = write_svg(tmp_path / "x.svg", doc)
    assert path.read_text() == doc
    ET.parse(path)
