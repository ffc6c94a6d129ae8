import json
from dataclasses import replace

import pytest

from spinlb import cli, verify
from spinlb.algebra import ALL_RELATIONS
from spinlb.bounds import BoundReport


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table1(capsys, tmp_path):
    out_path = tmp_path / "t1.json"
    code, out, _ = run(capsys, "table1", "--n-max", "12", "--out", str(out_path))
    assert code == 0
    assert "9495" in out and "1048576" in out
    rows = {r["N"]: r for r in json.loads(out_path.read_text())["payload"]["rows"]}
    assert rows[2]["K"] == 1
    assert rows[10]["K"] == 9495 and rows[10]["four_pow_N"] == 1048576
    assert rows[12]["enumerated"] == rows[12]["K"]


def test_table1_formula_only_beyond_enumeration(capsys):
    code, out, _ = run(capsys, "table1", "--n-max", "60", "--enumerate-max", "6")
    assert code == 0
    assert out.splitlines()[-2].startswith("60")


def test_table1_cap(capsys):
    assert run(capsys, "table1", "--n-max", "61")[0] == 2


@pytest.mark.parametrize("sizes", ["", ",", "x", "1", "11"])
def test_table2_bad_sizes(capsys, tmp_path, sizes):
    code, _, err = run(capsys, "table2", "--sizes", sizes, "--cache-dir", str(tmp_path))
    assert code == 2
    assert "error" in err


def test_table2_bad_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"restartz": 4}))
    code, _, err = run(capsys, "table2", "--sizes", "3", "--config", str(cfg), "--cache-dir", str(tmp_path))
    assert code == 2 and "restartz" in err


def test_table2_two_sites(capsys, tmp_path):
    out_path = tmp_path / "t2.json"
    code, out, _ = run(
        capsys, "table2", "--sizes", "2", "--restarts", "4", "--cache-dir", str(tmp_path), "--out", str(out_path)
    )
    assert code == 0
    assert "-3" in out and "-1.7726" in out
    row = json.loads(out_path.read_text())["payload"]["rows"][0]
    assert row["anderson_per_spin"] == pytest.approx(-3.0)
    assert row["variational_per_spin"] == pytest.approx(-3.0, abs=1e-8)


def test_table2_manifest_and_cache(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"restarts": 4, "seed": 11}))
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code, _, _ = run(
            capsys, "table2", "--sizes", "3,4", "--config", str(cfg),
            "--cache-dir", str(tmp_path / "c"), "--out", str(p),
        )
        assert code == 0
    first, second = (json.loads(p.read_text()) for p in paths)
    m = first["manifest"]
    assert m["command"] == "table2" and m["seed"] == 11 and m["config"]["restarts"] == 4
    assert {"started_at", "finished_at", "wall_time", "tool_version"} <= set(m)
    assert not m["cache"]["3"]["hit"] and second["manifest"]["cache"]["3"]["hit"]
    assert json.dumps(first["payload"], sort_keys=True) == json.dumps(second["payload"], sort_keys=True)


def test_table2_infeasible_row_marked_failed(capsys, tmp_path, monkeypatch):
    def infeasible(model, tensor, constraints, config, anderson=None):
        return BoundReport(model.n, anderson, None, status="infeasible")

    monkeypatch.setattr(cli, "variational_bound", infeasible)
    code, out, _ = run(capsys, "table2", "--sizes", "3", "--cache-dir", str(tmp_path))
    assert code == 1
    assert "FAILED" in out and "FAIL" in out


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--level", "quick")
    assert code == 0
    assert out.strip().splitlines()[-1].startswith("PASS")


def test_verify_detects_corrupted_relation(capsys, monkeypatch):
    rel = ALL_RELATIONS[1]
    mono, coeff = next(iter(rel.result.items()))
    bad = replace(rel, result={**rel.result, mono: coeff + 1})
    monkeypatch.setattr(verify, "ALL_RELATIONS", [bad, *ALL_RELATIONS[2:]])
    code, out, _ = run(capsys, "verify", "--level", "full")
    assert code == 1
    assert f"FAIL  relation {rel.name}" in out
    assert "PASS  relation pair-times-mixed" in out


def test_gram_n4(capsys, tmp_path):
    out_path = tmp_path / "g.json"
    code, out, _ = run(capsys, "gram", "--n", "4", "--out", str(out_path))
    assert code == 0
    payload = json.loads(out_path.read_text())["payload"]
    assert payload["matrix"] == [[9, 3, 3], [3, 9, 3], [3, 3, 9]]
    assert payload["labels"] == ["(1,2)(3,4)", "(1,3)(2,4)", "(1,4)(2,3)"]


def test_deps(capsys):
    code, out, _ = run(capsys, "deps", "--n", "5")
    assert code == 0 and "PASS" in out
    assert run(capsys, "deps", "--n", "9")[0] == 2


def test_missing_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2
