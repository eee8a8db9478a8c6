import csv
import io
import json
from fractions import Fraction as F

import pytest

from metricmag.cli import FIXTURES, main
from metricmag.core import FiniteMetricSpace, SimilaritySpace
from metricmag.fixtures import q4
from metricmag.io import SpaceFileError, dump_space, load_space, space_from_dict, space_to_dict


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, doc, name="space.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


# -- io

def test_round_trip_exact(tmp_path):
    space = q4()
    path = tmp_path / "q4.json"
    dump_space(space, path)
    assert load_space(path) == space
    assert space_to_dict(space)["matrix"][0][1] == "1/3"


def test_round_trip_distance_with_labels():
    doc = {"mode": "distance", "matrix": [[0, 1.5], [1.5, 0]], "labels": ["a", "b"]}
    space = space_from_dict(doc)
    assert isinstance(space, FiniteMetricSpace) and space.labels == ("a", "b")
    assert space_from_dict(space_to_dict(space)) == space


@pytest.mark.parametrize("doc, location", [
    ({"mode": "angles", "matrix": []}, "mode"),
    ({"mode": "similarity", "matrix": 3}, "matrix"),
    ({"mode": "similarity", "n": 3, "matrix": [[1]]}, "n"),
    ({"mode": "similarity", "matrix": [[1, "1/2"], ["1/2"]]}, "matrix[1]"),
    ({"mode": "similarity", "matrix": [[1, "x"], ["1/2", 1]]}, "matrix[0][1]"),
    ({"mode": "similarity", "matrix": [[1, "1/2"], ["1/2", 1]], "labels": ["a"]}, "labels"),
])
def test_bad_documents(doc, location):
    with pytest.raises(SpaceFileError) as exc:
        space_from_dict(doc)
    assert exc.value.location == location


def test_invalid_json_location(tmp_path):
    with pytest.raises(SpaceFileError) as exc:
        load_space(write(tmp_path, '{"mode": "similarity",\n  "matrix": [[1,}'))
    assert exc.value.location.endswith(":2:17")


def test_missing_file(tmp_path):
    with pytest.raises(SpaceFileError):
        load_space(tmp_path / "absent.json")


# -- cli

def test_mag_q4(tmp_path, capsys):
    path = write(tmp_path, space_to_dict(q4()))
    code, out, _ = run(capsys, "mag", "--input", path)
    report = json.loads(out)
    assert code == 0 and report["magnitude"] == "5/3" and report["mode"] == "exact"
    code, out, _ = run(capsys, "mag", "--input", path, "--mode", "float")
    assert float(json.loads(out)["magnitude"]) == pytest.approx(5 / 3)


@pytest.mark.parametrize("fixture", [f for f in FIXTURES if f != "graph"])
def test_gen_output_is_accepted(tmp_path, capsys, fixture):
    out_path = tmp_path / f"{fixture}.json"
    code, _, _ = run(capsys, "gen", "--fixture", fixture, "--output", str(out_path))
    assert code == 0
    space = load_space(out_path)
    mode_args = [] if isinstance(space, SimilaritySpace) else ["--mode", "float"]
    n = space.n
    for cmd in (["mag"], ["posdef"]):
        code, out, _ = run(capsys, *cmd, "--input", str(out_path), *mode_args)
        assert code == 0, out
    if n >= 3:
        for cmd in ("decompose", "inclexcl"):
            code, out, _ = run(capsys, cmd, "--input", str(out_path), *mode_args)
            assert code == 0, out
        rest = ",".join(str(k) for k in range(3, n + 1))
        code, _, _ = run(capsys, "conditions", "--input", str(out_path),
                         "--A", f"1,{rest}", "--B", f"2,{rest}")
        assert code == 0
    if isinstance(space, FiniteMetricSpace):
        code, out, _ = run(capsys, "homology", "--input", str(out_path), "--k", "1", "--ell", "1")
        assert code == 0 and json.loads(out)["rank"] >= 0


def test_gen_graph(capsys):
    code, out, _ = run(capsys, "gen", "--fixture", "graph", "--edges", "1-2,2-3-1/2")
    assert code == 0
    assert json.loads(out)["matrix"][0][2] == "3/2"
    code, _, err = run(capsys, "gen", "--fixture", "graph")
    assert code == 2 and "--edges" in err


def test_homology_snaps_ell(tmp_path, capsys):
    code, _, _ = run(capsys, "gen", "--fixture", "mv4", "--output", str(tmp_path / "mv.json"))
    code, out, _ = run(capsys, "homology", "--input", str(tmp_path / "mv.json"),
                       "--k", "1", "--ell", "1.620139")
    report = json.loads(out)
    assert code == 0 and report["rank"] == 2 and report["basis_size"] == [0, 2, 0]
    code, out, _ = run(capsys, "homology", "--input", str(tmp_path / "mv.json"),
                       "--k", "1", "--ell", "1.620139", "--ell-tolerance", "0")
    assert json.loads(out)["rank"] == 0


def test_decompose_four_point_extras(tmp_path, capsys):
    path = write(tmp_path, space_to_dict(q4()))
    code, out, _ = run(capsys, "decompose", "--input", path, "--pair", "1,2")
    report = json.loads(out)
    assert code == 0 and report["b_zero"] == "1/3" and report["residual"] == "0"
    assert "b_plus" in report and report["cases"]


def test_conditions_path(tmp_path, capsys):
    path = write(tmp_path, {"mode": "distance", "matrix": [[0, 2, 1], [2, 0, 1], [1, 1, 0]]})
    code, out, _ = run(capsys, "conditions", "--input", path, "--A", "1,3", "--B", "2,3")
    report = json.loads(out)
    assert code == 0 and report["c1"] and report["c2"]
    assert [1, 2, 3] in report["witnesses"]["c1_gates"]


def test_csv_output(tmp_path, capsys):
    path = write(tmp_path, space_to_dict(q4()))
    code, out, _ = run(capsys, "posdef", "--input", path, "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["section", "key", "value"]
    assert ["", "positive_definite", "True"] in rows


def test_exact_mode_rejects_distances(tmp_path, capsys):
    path = write(tmp_path, {"mode": "distance", "matrix": [[0, 1], [1, 0]]})
    code, out, err = run(capsys, "mag", "--input", path, "--mode", "exact")
    assert code == 2 and "exact mode" in err
    assert json.loads(out)["error"]["type"] == "input"


def test_bad_file_exit_code(tmp_path, capsys):
    path = write(tmp_path, {"mode": "similarity", "matrix": [[1, "2"], ["2", 1]]})
    code, out, err = run(capsys, "mag", "--input", path)
    assert code == 2 and err
    assert json.loads(out)["error"]["location"].startswith("matrix")


def test_bad_point_list(tmp_path, capsys):
    path = write(tmp_path, space_to_dict(q4()))
    code, _, err = run(capsys, "decompose", "--input", path, "--pair", "1,9")
    assert code == 2 and "1..4" in err


def test_singularity_reported(tmp_path, capsys):
    q = 2 ** -0.5
    d = [[0, 2, 2, 1, 1], [2, 0, 2, 1, 1], [2, 2, 0, 1, 1], [1, 1, 1, 0, 2], [1, 1, 1, 2, 0]]
    path = write(tmp_path, {"mode": "similarity", "matrix": [[q ** x for x in r] for r in d]})
    code, out, _ = run(capsys, "mag", "--input", path)
    assert code == 0
    assert json.loads(out)["error"]["type"] == "singularity"


def test_verify_command(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, _, _ = run(capsys, "verify", "--theorem", "micro-formulas", "--samples", "30",
                     "--seed", "2", "--output", str(out_path))
    report = json.loads(out_path.read_text())
    assert code == 0 and report["violation_count"] == 0 and report["samples"] == 30


def test_search5_command(capsys):
    code, out, _ = run(capsys, "search5")
    report = json.loads(out)
    assert code == 0 and not report["positive_definite"]
    assert report["four_point_subspaces_positive_definite"]
    assert F(report["determinant"]) < 0
