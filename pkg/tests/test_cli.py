import json

import pytest

from hodgecert import cli, familyfile, report


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_hilbert_quartic(capsys):
    code, out, _ = run(capsys, "hilbert", "quartic_p3")
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == 1
    assert rep["hilbert"]["vector"] == [1, 4, 10, 16, 19, 16, 10, 4, 1]
    assert rep["family"]["f_digest"] == report.f_digest(familyfile.load_bundled("quartic_p3").f)


def test_hilbert_sextic_iota(capsys):
    code, out, _ = run(capsys, "hilbert", "sextic_p5_iota")
    rep = json.loads(out)
    chars = {(r["degree"], r["chi"]): r["dim"] for r in rep["hilbert"]["characters"]}
    assert code == 0 and chars[(6, 0)] == 226 and rep["hilbert"]["oracles_agree"]
    comparison = [c for c in rep["paper_comparison"] if c["quantity"] == "h^{1,3}"]
    assert {c["twist"]: c["computed"] for c in comparison} == {0: 200, 1: 226}
    assert all(not c["match"] and c["paper_value"] == 208 for c in comparison)


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.fam"
    bad.write_text("vars = 4\ndegree = 4\nf = x0^4 + \n")
    code, _, err = run(capsys, "hilbert", str(bad))
    assert code == 3 and "key: f" in err
    code, _, _ = run(capsys, "hilbert", str(tmp_path / "nope.fam"))
    assert code == 3


def test_singular_exit_code(tmp_path, capsys):
    sing = tmp_path / "sing.fam"
    sing.write_text("vars = 3\ndegree = 3\nf = x0^3 + x1^3 + x0^2*x2\n")
    code, _, err = run(capsys, "hilbert", str(sing))
    assert code == 2 and "E_SINGULAR" in err


def test_criterion_quartic_and_zero_lambda(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "check-criterion", "quartic_p3", "--seed", "1", "-o", str(out))
    rep = json.loads(out.read_text())
    assert code == 0 and rep["criterion"]["verdict"]
    assert [c["dim"] for c in rep["commutant"]] == [1, 0, 0]
    code, stdout, _ = run(capsys, "check-criterion", "quartic_p3", "--lambda", "0")
    rep = json.loads(stdout)
    assert code == 1 and not rep["criterion"]["verdict"]
    assert rep["criterion"]["lambda"]["kind"] == "given"


def test_lambda_errors(capsys):
    code, _, err = run(capsys, "check-criterion", "quartic_p3", "--lambda", "x0^3")
    assert code == 2 and "E_DEGREE_MISMATCH" in err
    code, _, _ = run(capsys, "check-criterion", "quartic_p3", "--lambda", "x0^^3")
    assert code == 3


def test_torelli_commands(capsys):
    code, out, _ = run(capsys, "check-torelli", "quartic_p3")
    assert code == 0 and json.loads(out)["torelli"]["all_surjective"]
    code, out, _ = run(capsys, "check-torelli", "cubic_p3_z3")
    pieces = json.loads(out)["torelli"]["pieces"]
    assert code == 0 and all(p["status"] == "vacuous" for p in pieces)


def test_commutant_command(capsys):
    code, out, _ = run(capsys, "commutant", "quartic_p3", "--shift", "1", "--shift", "2")
    rep = json.loads(out)
    assert code == 0 and [c["dim"] for c in rep["commutant"]] == [0, 0]


def test_overrides(capsys):
    code, out, _ = run(capsys, "hilbert", "sextic_p5_iota", "--twist", "1", "--tangent-degree", "12")
    rep = json.loads(out)
    assert rep["group"]["residue_twist"] == 1 and rep["predicates"]["dim_T"] == 903


def test_deterministic_reports():
    a, _ = cli.example_report("quartic_p3")
    b, _ = cli.example_report("quartic_p3")
    assert a == b


def test_examples_listing(capsys):
    code, out, _ = run(capsys, "examples")
    assert code == 0 and len(out.strip().splitlines()) >= 3


@pytest.mark.parametrize("name", ["quartic_p3", "dwork_quartic_p3", "cubic_p3", "cubic_p3_z3",
                                  "sextic_p5", "sextic_p5_iota"])
def test_frozen_digests(name):
    manifest = cli._manifest()
    text, code = cli.example_report(name)
    assert cli.digest(text) == manifest[name]["digest"]
    assert code == manifest[name]["exit"]


def test_big_integers_become_strings():
    assert report._jsonable({"x": 2 ** 60, "y": 5}) == {"x": str(2 ** 60), "y": 5}
