"""CLI: request parsing, exit codes, report schema, byte determinism."""

import json

from cubicdefect.cli import (
    EXIT_OK,
    EXIT_PARSE,
    main,
)

F1_TEXT = ("x0*x1*x2 + x1^2*x4 - 2*x1*x4^2 + x2^2*x4 - 2*x2*x4^2"
           " - x3^3 - x3^2*x4 + x4^3")
FERMAT_TEXT = "x0^3 + x1^3 + x2^3 + x3^3 + x4^3"
CONE_TEXT = "x0^3 + x1^3 + x2^3 + x3^3"


def run(args, tmp_path, name="out.json"):
    path = tmp_path / name
    code = main(list(args) + ["--json", str(path)])
    report = json.loads(path.read_text()) if path.exists() else None
    return code, report


def test_parse_errors():
    assert main(["analyze", "x0^3 + x1^2"]) == EXIT_PARSE       # inhomogeneous
    assert main(["analyze", "x0^2 + x1^2"]) == EXIT_PARSE       # not a cubic
    assert main(["analyze", "x0^3 +"]) == EXIT_PARSE            # malformed
    assert main(["analyze", FERMAT_TEXT,
                 "--commands", "bogus"]) == EXIT_PARSE
    assert main(["analyze", FERMAT_TEXT,
                 "--tol", "nope=1"]) == EXIT_PARSE
    assert main(["analyze", FERMAT_TEXT,
                 "--line", "1,0,0,0,0"]) == EXIT_PARSE
    assert main(["analyze", "@/no/such/file"]) == EXIT_PARSE


def test_smooth_cubic_report(tmp_path):
    code, report = run(["analyze", FERMAT_TEXT, "--seed", "7"], tmp_path)
    assert code == EXIT_OK
    assert report["schema"] == 1
    assert report["errors"] == {}
    assert report["results"]["singular"] == []
    assert report["results"]["defect"]["sigma"] is None
    h = report["results"]["hodge"]
    assert (h["h3"], h["h12"], h["h21"]) == (10, 5, 5)
    assert "skipped" in report["results"]["surfaces"]


def test_f1_report(tmp_path):
    code, report = run(["analyze", F1_TEXT, "--seed", "7"], tmp_path)
    assert code == EXIT_OK
    res = report["results"]
    assert len(res["singular"]) == 3
    assert res["defect"]["sigma"] == 0
    assert res["defect"]["certification"] == "exact"
    assert (res["hodge"]["h3"], res["hodge"]["h12"],
            res["hodge"]["h21"]) == (4, 4, 0)
    assert res["surfaces"]["contains_plane"] == "no"
    assert res["surfaces"]["contains_scroll"] == "no"
    assert res["surfaces"]["sigma_consistent"] is True


def test_cone_report(tmp_path):
    code, report = run(["analyze", CONE_TEXT, "--seed", "7",
                        "--commands", "singular,defect,surfaces,lines"],
                       tmp_path)
    assert code == EXIT_OK
    res = report["results"]
    assert res["singular"][0]["label"] == "cone vertex"
    assert res["singular"][0]["milnor"] == 16
    assert res["defect"]["sigma"] == 6
    assert res["defect"]["cone"] is True
    assert "skipped" in res["surfaces"]
    assert "skipped" in res["lines"]


def test_byte_determinism(tmp_path):
    args = ["analyze", F1_TEXT, "--seed", "7"]
    _, _ = run(args, tmp_path, "a.json")
    _, _ = run(args, tmp_path, "b.json")
    assert (tmp_path / "a.json").read_bytes() == \
        (tmp_path / "b.json").read_bytes()


def test_file_input(tmp_path):
    src = tmp_path / "cubic.txt"
    src.write_text(FERMAT_TEXT + "\n")
    code, report = run(["analyze", "@" + str(src), "--seed", "3",
                        "--commands", "singular"], tmp_path)
    assert code == EXIT_OK
    assert report["results"]["singular"] == []


def test_explicit_line(tmp_path):
    # the Fermat line {x0+x1 = x2+x3 = x4 = 0} is on X but not good
    code, report = run(["analyze", FERMAT_TEXT, "--seed", "5",
                        "--commands", "lines",
                        "--line", "1,-1,0,0,0;0,0,1,-1,0"], tmp_path)
    assert code == EXIT_OK
    entry = report["results"]["lines"][0]
    assert entry["good"] == "no"
    assert "degenerate" in entry["good_reason"]


def test_settings_override(tmp_path):
    code, report = run(["analyze", FERMAT_TEXT, "--seed", "2",
                        "--commands", "singular",
                        "--tol", "max_steps=2000",
                        "--tol", "corrector_tol=1e-11"], tmp_path)
    assert code == EXIT_OK
    assert report["settings"] == {"max_steps": 2000,
                                  "corrector_tol": 1e-11}
