import json

import pytest

from quotfix.charfn import charfn_from_json, charfn_to_json
from quotfix.cli import main
from quotfix.fixtures import staircase_charfn
from quotfix.incidence import structure_from_json


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def stair_file(tmp_path):
    path = tmp_path / "stair.json"
    path.write_text(json.dumps(charfn_to_json(staircase_charfn())))
    return str(path)


def test_enumerate_csv_row_count(capsys):
    code, out, _ = run_cli(capsys, "enumerate", "--r", "1", "--d", "2", "--n", "4",
                           "--format", "csv")
    assert code == 0
    assert len(out.strip().splitlines()) == 5


def test_enumerate_json_shape(capsys):
    code, out, _ = run_cli(capsys, "enumerate", "--r", "2", "--d", "2", "--n", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["count"] == 3  # two single-level shapes plus the doubled origin
    assert all(charfn_from_json(f) for f in doc["functions"])


def test_structure_and_invariants(capsys, stair_file):
    code, out, _ = run_cli(capsys, "structure", "--in", stair_file, "--r", "3")
    assert code == 0
    S = structure_from_json(json.loads(out))
    assert S.part_sizes == (2, 2)

    for cmd, key, want in [
        ("euler", "count", 24),
        ("dimension", "dimension", 5),
    ]:
        code, out, _ = run_cli(capsys, cmd, "--in", stair_file, "--r", "3")
        assert code == 0
        assert json.loads(out)[key] == want

    code, out, _ = run_cli(capsys, "count-fq", "--in", stair_file, "--r", "3",
                           "--q", "2")
    assert json.loads(out)["count"] == 189

    code, out, _ = run_cli(capsys, "intervals", "--in", stair_file, "--r", "3")
    assert json.loads(out)["is_interval"] is True


def test_structure_dot(capsys, stair_file):
    code, out, _ = run_cli(capsys, "structure", "--in", stair_file, "--r", "3",
                           "--format", "dot")
    assert code == 0
    assert out.startswith("graph incidence {")


def test_fixtures_round_trip(capsys):
    code, out, _ = run_cli(capsys, "fixtures")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {
        "staircase", "crossed_lines_r3", "crossed_lines_r4", "k33", "subdivided_k5",
    }
    for entry in doc.values():
        if "chi" in entry:
            charfn_from_json(entry["chi"])
        if "structure" in entry:
            structure_from_json(entry["structure"])


def test_smooth_feeds_tangent(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "fixtures")
    chi_doc = json.loads(out)["crossed_lines_r3"]["chi"]
    chi_file = tmp_path / "c.json"
    chi_file.write_text(json.dumps(chi_doc))

    code, out, _ = run_cli(capsys, "smooth", "--in", str(chi_file), "--r", "3",
                           "--seed", "0")
    assert code == 0
    verdict = json.loads(out)
    assert verdict["verdict"] == "SingularWitness"

    witness_file = tmp_path / "w.json"
    witness_file.write_text(json.dumps(verdict))
    code, out, _ = run_cli(capsys, "tangent", "--in", str(witness_file), "--closure")
    assert code == 0
    assert json.loads(out)["tangent"] == verdict["tangent"]


def test_realize_from_text(capsys, tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("parts: 1 1\n1 2\n")
    code, out, _ = run_cli(capsys, "realize", "--in", str(g), "--d", "4")
    assert code == 0
    chi = charfn_from_json(json.loads(out))
    from quotfix.incidence import build_S_chi

    assert build_S_chi(chi, 3).structure.part_sizes == (1, 1)


def test_verify_reports(capsys):
    code, out, _ = run_cli(capsys, "verify", "identity", "--r", "2", "--d", "2",
                           "--nmax", "3")
    assert code == 0 and json.loads(out)["ok"]
    code, out, _ = run_cli(capsys, "verify", "series", "--r", "1", "--nmax", "6")
    assert code == 0
    assert [e["rhs"] for e in json.loads(out)["per_n"]] == [1, 1, 2, 3, 5, 7, 11]


def test_exit_codes(capsys, tmp_path, stair_file):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli(capsys, "structure", "--in", str(bad), "--r", "3")
    assert code == 2 and "error" in err

    code, _, err = run_cli(capsys, "count-fq", "--in", stair_file, "--r", "3",
                           "--q", "6")
    assert code == 2  # composite field size

    code, _, err = run_cli(capsys, "euler", "--in", stair_file, "--r", "3",
                           "--cap", "1")
    assert code == 3 and "resource" in err

    with pytest.raises(SystemExit) as exc:
        main(["euler", "--bogus"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_output_is_deterministic(capsys, stair_file):
    runs = set()
    for _ in range(2):
        _, out, _ = run_cli(capsys, "smooth", "--in", stair_file, "--r", "3",
                            "--seed", "7")
        runs.add(out)
    assert len(runs) == 1
