import csv
import io
import json
import subprocess
import sys
import xml.etree.ElementTree as ET
from fractions import Fraction

from k3walls.cli import main, parse_vector
from k3walls.mukai import MukaiVector
from k3walls.quadext import QuadExt
from k3walls.svg import render_walls
from k3walls.tower import v_closed

SVG_NS = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_pair(capsys):
    code, out, _ = run(capsys, "pair", "--v", "1,1,2,0", "--w", "1,0,0,1", "--format", "text")
    assert code == 0 and out.strip() == "-1"
    code, out, _ = run(capsys, "pair", "--v", "1,1,2,0", "--w", "1,0,0,1")
    assert json.loads(out)["pairing"] == -1


def test_twist(capsys):
    code, out, _ = run(capsys, "twist", "--v", "1,0,0,-1", "--d", "1,2")
    assert code == 0
    assert MukaiVector.from_json(json.loads(out)["result"]) == v_closed(2, 1)


def test_reflect_requires_spherical(capsys):
    code, _, err = run(capsys, "reflect", "--v", "1,0,0,-1", "--s", "1,0,0,0")
    assert code == 2 and "self-pairing" in err
    code, out, _ = run(capsys, "reflect", "--v", "2,1,4,1", "--s", "1,0,2,1")
    assert code == 0 and MukaiVector.from_json(json.loads(out)["result"]) == v_closed(2, 1)


def test_parse_errors_name_the_component(capsys):
    code, _, err = run(capsys, "pair", "--v", "1,x,2,0", "--w", "1,0,0,1")
    assert code == 1 and "component 2" in err
    code, _, err = run(capsys, "pair", "--v", "1,2,0", "--w", "1,0,0,1")
    assert code == 1 and "4 comma-separated" in err
    assert parse_vector("-1, 2,3 ,4") == MukaiVector.of(-1, 2, 3, 4)


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "pair", "--v", "1,0,0,1")[0] == 1
    assert run(capsys, "tower", "--n", "2", "--m", "10", "--R", "3", "--format", "yaml")[0] == 1
    assert run(capsys, "pair", "--v", "1,0,0,1", "--w", "1,0,0,1", "--bounds", "0")[0] == 1
    assert run(capsys, "pair", "--v", "1,0,0,1", "--w", "1,0,0,1", "--format", "svg")[0] == 1
    assert run(capsys, "sd", "--r", "2")[0] == 1


def test_wall_json_round_trip(capsys):
    code, out, _ = run(capsys, "wall", "--v", "2,1,4,1", "--w", "1,0,2,1", "--m", "10")
    assert code == 0
    j = json.loads(out)
    assert j["geometry"]["type"] == "semicircle"
    assert QuadExt.from_json(j["geometry"]["center"]) == QuadExt(0, Fraction(-3, 8), 2)
    assert QuadExt.from_json(j["geometry"]["radius_sq"]) == QuadExt(Fraction(25, 32))
    assert QuadExt.from_json(j["t_intercept"]["value"]) == QuadExt(0, Fraction(1, 2), 2)
    assert json.loads(json.dumps(j)) == j


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--v", "2,1,4,1", "--w", "1,0,2,1", "--m", "10", "--bounds", "20")
    assert code == 0
    j = json.loads(out)
    assert j["classification"]["kind"] == "spherical"
    assert MukaiVector.from_json(j["minimal_class"]["v0"]) == v_closed(2, 1)


def test_classify_inconclusive_when_bound_too_small(capsys):
    args = ("classify", "--v", "2,1,4,1", "--w=-2,-2,-2,0", "--m", "10")
    code, out, _ = run(capsys, *args, "--bounds", "1")
    assert code == 3
    assert json.loads(out)["classification"]["status"] == "bound_exhausted"
    code, out, _ = run(capsys, *args, "--bounds", "20")
    j = json.loads(out)["classification"]
    assert code == 0 and not j["totally_semistable"] and j["certified_bound"] <= 20


def test_tower_text(capsys):
    code, out, _ = run(capsys, "tower", "--n", "2", "--m", "10", "--R", "3", "--format", "text")
    assert code == 0
    rows = out.strip().splitlines()
    assert len(rows) == 3
    assert all("nested: yes" in row and "semicircle" in row for row in rows)


def test_tower_json_and_csv(capsys):
    code, out, _ = run(capsys, "tower", "--n", "3", "--m", "12", "--R", "4")
    j = json.loads(out)
    assert [MukaiVector.from_json(lv["v"]) for lv in j["levels"]] == [v_closed(3, r) for r in range(1, 5)]
    assert all(lv["nested"] for lv in j["levels"])
    code, out, _ = run(capsys, "tower", "--n", "3", "--m", "12", "--R", "4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4 and rows[-1]["nested"] == "yes"


def test_tower_empty(capsys):
    code, out, _ = run(capsys, "tower", "--n", "2", "--m", "10", "--R", "0", "--format", "text")
    assert code == 0 and out == ""
    code, out, _ = run(capsys, "tower", "--n", "2", "--m", "10", "--R", "0")
    assert code == 0 and json.loads(out)["levels"] == []


def test_tower_domain_error(capsys):
    assert run(capsys, "tower", "--n", "5", "--m", "3", "--R", "2")[0] == 2


def test_tower_svg(capsys):
    code, out, _ = run(capsys, "tower", "--n", "2", "--m", "10", "--R", "3", "--format", "svg")
    assert code == 0
    root = ET.fromstring(out)
    arcs = root.findall(f"{SVG_NS}path")
    assert len(arcs) == 3 and all(" A " in a.get("d") for a in arcs)
    dashed = [e for e in root.iter() if e.get("stroke-dasharray")]
    assert len(dashed) == 1


def test_firstwall(capsys):
    code, out, _ = run(capsys, "firstwall", "--n", "3", "--format", "text")
    assert code == 0 and "selected destabilizer O(-(c+3f))" in out
    code, out, _ = run(capsys, "firstwall", "--n", "2", "--bounds", "2,10")
    j = json.loads(out)
    assert j["slice"]["m"] == "17/8" and j["selected_is_o_minus_c"]


def test_firstwall_inconclusive(capsys):
    code, out, err = run(capsys, "firstwall", "--n", "3", "--bounds", "1,1")
    assert code == 3 and "inconclusive" in err
    assert json.loads(out)["status"] == "inconclusive"


def test_quotients_command(capsys):
    code, out, _ = run(capsys, "quotients")
    j = json.loads(out)
    assert j["only_k0_family"] and all(s["k"] == 0 for s in j["solutions"])


def test_sd(capsys):
    code, out, _ = run(capsys, "sd", "--r", "2", "--s", "2", "--p", "-2", "--q", "-2", "--a", "9", "--b", "9")
    assert code == 0 and json.loads(out)["status"]["ex1"] is True
    code, _, err = run(capsys, "sd", "--r", "2", "--s", "2", "--p", "-2", "--q", "-2", "--a", "9", "--b", "8")
    assert code == 2 and "a+b-2 = 15" in err and "-(r+s)(p+q) = 16" in err


def test_sd_sweep_csv(capsys):
    code, out, _ = run(capsys, "sd", "sweep", "--rs-max", "5", "--pq-min", "-8")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 36 * 81
    for row in rows:
        if row["condition_iii_linear"]:
            assert (row["condition_iii_linear"] == "true") == (int(row["total"]) <= 0)
            assert row["condition_iii_linear"] == row["condition_iii_quadratic"]


def test_out_path(tmp_path, capsys):
    target = tmp_path / "tower.json"
    code, out, _ = run(capsys, "tower", "--n", "2", "--m", "10", "--R", "2", "--out", str(target))
    assert code == 0 and out == ""
    assert len(json.loads(target.read_text())["levels"]) == 2
    code, _, err = run(capsys, "tower", "--n", "2", "--m", "10", "--R", "2", "--out", str(tmp_path / "missing" / "x.json"))
    assert code == 2 and "cannot write" in err


def test_global_flags_before_command(capsys):
    code, out, _ = run(capsys, "--format", "text", "pair", "--v", "1,1,2,0", "--w", "1,0,0,1")
    assert code == 0 and out.strip() == "-1"


def test_render_variants(capsys):
    code, out, _ = run(capsys, "render", "--hyperbola", "6,2")
    root = ET.fromstring(out)
    assert len(root.findall(f"{SVG_NS}polyline")) == 2
    assert len(root.findall(f"{SVG_NS}polygon")) == 1
    assert any(e.get("stroke") == "#2ca02c" for e in root.findall(f"{SVG_NS}line"))
    code, out, _ = run(capsys, "render", "--tower", "2,10,3")
    assert len(ET.fromstring(out).findall(f"{SVG_NS}path")) == 3
    code, out, _ = run(capsys, "render", "--firstwall", "3", "--bounds", "2,10")
    assert code == 0 and ET.fromstring(out).findall(f"{SVG_NS}path")
    assert run(capsys, "render", "--tower", "2,x,3")[0] == 1


def test_svg_deterministic_and_empty():
    empty = render_walls([])
    root = ET.fromstring(empty)
    assert len(root.findall(f"{SVG_NS}line")) >= 1 and not root.findall(f"{SVG_NS}path")
    assert render_walls([]) == empty


def test_svg_coordinates_rounded(capsys):
    _, out, _ = run(capsys, "tower", "--n", "4", "--m", "13", "--R", "3", "--format", "svg")
    import re

    for num in re.findall(r"-?\d+\.\d+", out):
        assert len(num.split(".")[1]) <= 6


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "k3walls", "pair", "--v", "1,1,2,0", "--w", "1,0,0,1", "--format", "text"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and res.stdout.strip() == "-1"
