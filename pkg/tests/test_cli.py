import csv
import io
import json

import pytest

from etb import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    d = json.loads(out)
    assert d["schema"] == 1
    return d


def test_build_hexagon(capsys):
    d = run_json(capsys, "build", "--ring", "fq:2", "--rank", "2", "--kind", "et")
    r = d["results"]
    assert (r["ring"], r["rank"], r["kind"]) == ("fq:2", 2, "ET")
    assert r["f_vector"] == [6, 6] and len(r["maximal_simplices"]) == 6


def test_build_rank_one_and_non_field(capsys):
    assert run_json(capsys, "build", "--ring", "fq:2", "--rank", "1", "--kind", "fl")["results"]["f_vector"] == [1]
    d = run_json(capsys, "build", "--ring", "zmod:6", "--rank", "2", "--kind", "fl")
    assert len(d["results"]["vertices"]) == 12


def test_build_cells(capsys):
    r = run_json(capsys, "build", "--ring", "fq:2", "--rank", "2", "--kind", "cells")["results"]
    assert r["counts"] == [3, 3]
    assert all(len(c["boundary"]) == 2 for c in r["cells"] if c["dim"] == 1)


@pytest.mark.parametrize("kind,want", [("fl", [1, 1]), ("spl", [1, 1]), ("et", [1, 1]), ("cells", [1, 1]),
                                       ("sphere", [1, 0, 1])])
def test_homology(capsys, kind, want):
    d = run_json(capsys, "homology", "--ring", "fq:2", "--rank", "2", "--kind", kind)
    assert [h["betti"] for h in d["results"]["homology"]] == want
    assert d["checks"]["d_squared_zero"]


def test_homology_csv(capsys):
    code, out, _ = run(capsys, "homology", "--ring", "fq:3", "--rank", "2", "--kind", "fl", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["degree", "betti", "torsion"] and rows[2][1] == "3"


def test_ss(capsys):
    d = run_json(capsys, "ss", "--ring", "fq:2", "--rank", "2", "--coeff", "q")
    assert d["passed"]
    code, out, _ = run(capsys, "ss", "--ring", "fq:2", "--rank", "3", "--coeff", "fp:2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["r", "p", "q", "dim"]
    assert ["1", "2", "0", "28"] in rows and ["inf", "0", "1", "1"] in rows


def test_bloch_and_claim(capsys):
    d = run_json(capsys, "bloch", "--ring", "fq:5", "--max-r", "5")
    assert d["results"]["group"] == {"betti": 0, "torsion": []} and d["checks"]["total_square_zero"]
    d = run_json(capsys, "claim", "--ring", "fq:5")
    assert d["results"]["status"] == "pass"


def test_verify(capsys):
    d = run_json(capsys, "verify", "--suite", "group", "--ring", "fq:3", "--rank", "2")
    assert d["passed"] and len(d["results"]) >= 3


def test_verify_parallel_matches_serial(capsys):
    a = run_json(capsys, "verify", "--suite", "equivalence")
    b = run_json(capsys, "verify", "--suite", "equivalence", "--jobs", "2")
    assert a["digest"] == b["digest"]


@pytest.mark.parametrize("probe", ["stabilization", "kh", "elementary", "d", "k"])
def test_probe(capsys, probe):
    d = run_json(capsys, "probe", "--probe", probe, "--ring", "fq:2")
    assert d["command"] == "probe"


def test_deterministic_digest(capsys):
    a = run_json(capsys, "homology", "--ring", "fq:3", "--rank", "2", "--kind", "et")
    b = run_json(capsys, "homology", "--ring", "fq:3", "--rank", "2", "--kind", "et")
    assert a["digest"] == b["digest"] and "seconds" in a["timing"]
    a.pop("timing"), b.pop("timing")
    assert a == b


def test_out_file(capsys, tmp_path):
    p = tmp_path / "r.json"
    code, out, _ = run(capsys, "build", "--ring", "fq:2", "--out", str(p))
    assert code == 0 and out == "" and json.loads(p.read_text())["schema"] == 1


def test_config_file(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"ring": "fq:3", "kind": "fl"}))
    d = run_json(capsys, "build", "--config", str(p), "--rank", "2")
    assert d["results"]["f_vector"] == [4, 6]


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", ""],
    ["verify"],
    ["nope"],
    ["build", "--ring", "fq:6"],
    ["build", "--ring", "bogus"],
    ["build", "--kind", "tree"],
    ["claim", "--ring", "zmod:6"],
    ["build", "--jobs", "0"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_budget_exit(capsys):
    code, _, err = run(capsys, "build", "--ring", "fq:3", "--rank", "3", "--kind", "spl", "--max-simplices", "100")
    assert code == 3 and "budget" in err


def test_budget_env(capsys, monkeypatch):
    monkeypatch.setenv("ETB_BUDGET", "simplices=50")
    assert run(capsys, "build", "--ring", "fq:3", "--rank", "3", "--kind", "fl")[0] == 3
    monkeypatch.setenv("ETB_BUDGET", "garbage")
    assert run(capsys, "build")[0] == 2


def test_check_failure_exit(capsys, monkeypatch):
    def failing(cfg):
        return cli.RunReport("build", cfg.echo(), {}, {"made_up": False})

    monkeypatch.setitem(cli.COMMANDS, "build", failing)
    code, _, err = run(capsys, "build")
    assert code == 1 and "made_up" in err
