import json
import xml.etree.ElementTree as ET

import pytest

from bsplan.cli import main
from bsplan.placement import read_plan

SMALL = "extent = 0,0,20,20\nroi = 5,5,15,15\nlambda = 0.15\nseed = 3\nk_new = 2\ngrid_resolution = 60\n"


@pytest.fixture
def work(tmp_path):
    (tmp_path / "c.ini").write_text(SMALL)
    assert main(["generate", "--config", str(tmp_path / "c.ini"), "--out", str(tmp_path)]) == 0
    return tmp_path


def run(work, *args):
    return main([*args, "--out", str(work)])


def stations(work):
    return str(work / "scenario.stations.csv")


class TestExitCodes:
    def test_bad_alpha(self, work):
        assert run(work, "plan", "--stations", stations(work), "--k", "1", "--alpha", "1.5") == 3

    def test_missing_file(self, work):
        assert run(work, "plan", "--stations", str(work / "nope.csv"), "--k", "1") == 2

    def test_unknown_heuristic(self, work):
        assert run(work, "plan", "--stations", stations(work), "--k", "1", "--heuristic", "3") == 2

    def test_usage(self, work, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["plan", "--bogus"])
        assert exc.value.code == 2
        assert "error[E_USAGE]" in capsys.readouterr().err

    def test_collinear(self, work):
        (work / "col.csv").write_text("0,0\n1,1\n2,2\n")
        assert run(work, "plan", "--stations", str(work / "col.csv"), "--k", "1",
                   "--roi", "0,0,2,2") == 4

    def test_empty(self, work):
        (work / "empty.csv").write_text("")
        assert run(work, "plan", "--stations", str(work / "empty.csv"), "--k", "1",
                   "--roi", "0,0,2,2") == 4

    def test_roi_mismatch(self, work):
        assert run(work, "plan", "--stations", stations(work), "--k", "1", "--heuristic", "1") == 0
        assert run(work, "evaluate", "--stations", stations(work), "--plan",
                   str(work / "scenario.h1.plan.csv"), "--roi", "6,6,14,14") == 5

    def test_no_layers(self, work):
        assert run(work, "render", "--stations", stations(work), "--layers", "") == 2

    def test_k_zero(self, work):
        assert run(work, "plan", "--stations", stations(work), "--k", "0") == 0
        assert read_plan(work / "scenario.h2.plan.csv").added == []


def test_single_addition_is_the_same_for_both_heuristics(work):
    for h in ("1", "2"):
        assert run(work, "plan", "--stations", stations(work), "--k", "1", "--heuristic", h) == 0
    assert (read_plan(work / "scenario.h1.plan.csv").added
            == read_plan(work / "scenario.h2.plan.csv").added)


def test_pipeline(work):
    for h in ("1", "2"):
        assert run(work, "plan", "--stations", stations(work), "--k", "2", "--heuristic", h) == 0
    plans = [str(work / f"scenario.h{h}.plan.csv") for h in (1, 2)]
    assert run(work, "evaluate", "--stations", stations(work), "--plan", plans[0],
               "--plan", plans[1], "--resolution", "50") == 0
    header = (work / "scenario.report.csv").read_text().splitlines()[0]
    assert header.startswith("metric,scenario0,heuristic1,heuristic2")
    assert run(work, "render", "--stations", stations(work), "--plan", plans[1],
               "--raster-resolution", "30") == 0
    svgs = list(work.glob("*.svg"))
    assert len(svgs) == 1
    ET.parse(svgs[0])
    manifest = json.loads((work / "scenario.render.manifest.json").read_text())
    assert manifest["command"] == "render" and manifest["outputs"]


def test_reproduce_is_byte_identical(tmp_path):
    (tmp_path / "c.ini").write_text(SMALL)
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        assert main(["reproduce", "--config", str(tmp_path / "c.ini"), "--out", str(d),
                     "--raster-resolution", "40"]) == 0
    names = sorted(p.name for p in dirs[0].iterdir() if not p.name.endswith("manifest.json"))
    assert names == sorted(p.name for p in dirs[1].iterdir() if not p.name.endswith("manifest.json"))
    assert len([n for n in names if n.endswith(".svg")]) == 3
    for n in names:
        assert (dirs[0] / n).read_bytes() == (dirs[1] / n).read_bytes(), n
    for n in names:
        if n.endswith(".svg"):
            ET.parse(dirs[0] / n)
