import json
import subprocess
import sys

import pytest

from fatconv.cli import main

THRESH = {"generator": "threshold", "grid_size": 8}


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def test_dim_on_class_file(tmp_path, capsys):
    f = write(tmp_path, "c.json", {"values": [[0, 0], [0, 1], [1, 0], [1, 1]], "range": [0, 1]})
    certs = tmp_path / "certs.json"
    code, out = run(["dim", f, "--gamma", "0.5", "--gamma", "0.6", "--certificates", str(certs)], capsys)
    assert code == 0
    lines = out.out.strip().splitlines()
    assert lines[0] == "class_id,gamma,fat_dim,vc_dim,subset"
    assert lines[1].split(",")[2:] == ["2", "2", "0;1"]
    assert lines[2].split(",")[2] == "0"
    stored = json.loads(certs.read_text())
    assert stored[0]["witness"] == [0.5, 0.5] and stored[1] is None


def test_simulate_exact_matches_known_value(tmp_path, capsys):
    cfg = write(tmp_path, "cfg.json", {"class": {"values": [[0, 1]], "range": [0, 1]},
                                      "epsilon": 0.25, "m_values": [2], "trials": 10})
    code, out = run(["simulate", "--config", cfg, "--exact"], capsys)
    assert code == 0
    header, row = out.out.strip().splitlines()
    assert header == "class_id,m,epsilon,trials,estimate,half_width,seed,mode"
    assert row.split(",")[4] == "0.5" and row.endswith("exact")
    code, out = run(["simulate", "--config", cfg, "--exact", "--symmetrized", "--epsilon", "0.5"], capsys)
    assert out.out.strip().splitlines()[1].split(",")[4] == "0.625"


def test_simulate_exact_size_limit(tmp_path, capsys):
    cfg = write(tmp_path, "cfg.json", {"class": {"generator": "threshold", "grid_size": 64},
                                      "m_values": [4096], "trials": 2})
    code, out = run(["simulate", "--config", cfg, "--exact"], capsys)
    assert code == 3


def test_config_errors(tmp_path, capsys):
    bad_gen = write(tmp_path, "a.json", {"class": {"generator": "nope"}})
    assert run(["run", "--config", bad_gen], capsys)[0] == 2
    bad_delta = write(tmp_path, "b.json", {"class": THRESH, "delta": 0})
    assert run(["run", "--config", bad_delta], capsys)[0] == 2
    bad_key = write(tmp_path, "c.json", {"class": THRESH, "colour": 1})
    assert run(["run", "--config", bad_key], capsys)[0] == 2
    (tmp_path / "d.json").write_text("{not json")
    assert run(["run", "--config", str(tmp_path / "d.json")], capsys)[0] == 2


def test_run_constant_class(tmp_path, capsys):
    cfg = write(tmp_path, "cfg.json", {"class": {"generator": "constant", "n_points": 4},
                                      "m_values": [4, 16], "trials": 50, "class_id": "const"})
    code, out = run(["run", "--config", cfg], capsys)
    assert code == 0
    lines = out.out.strip().splitlines()
    cols = lines[0].split(",")
    for line in lines[1:]:
        row = dict(zip(cols, line.split(",")))
        assert float(row["estimate"]) == 0.0
        assert row["class_id"] == '"const"'
        assert row["chain_ok"] == "1"


def test_run_threshold_matches_exact(tmp_path, capsys):
    base = {"class": {"generator": "threshold", "grid_size": 4}, "epsilon": 0.25,
            "m_values": [3, 5], "trials": 4000, "seed": 9}
    cfg = write(tmp_path, "cfg.json", base)
    _, mc = run(["run", "--config", cfg], capsys)
    _, ex = run(["run", "--config", cfg, "--exact"], capsys)
    cols = mc.out.splitlines()[0].split(",")
    for a, b in zip(mc.out.strip().splitlines()[1:], ex.out.strip().splitlines()[1:]):
        ra, rb = dict(zip(cols, a.split(","))), dict(zip(cols, b.split(",")))
        assert rb["mode"] == "exact"
        assert abs(float(ra["estimate"]) - float(rb["estimate"])) <= 1.5 * float(ra["half_width"])


def test_pack_and_chain(tmp_path, capsys):
    cfg = write(tmp_path, "cfg.json", {"class": {"generator": "random", "n_points": 5, "n_rows": 12,
                                                 "levels": 5, "seed": 2},
                                      "epsilon": 0.5, "m_values": [3, 6], "seed": 4})
    code, out = run(["pack", "--config", cfg, "--zeta", "0.2"], capsys)
    assert code == 0
    cols = out.out.splitlines()[0].split(",")
    for line in out.out.strip().splitlines()[1:]:
        row = dict(zip(cols, line.split(",")))
        assert int(row["net_size"]) <= int(row["packing_exact"])
    report = tmp_path / "rep.json"
    code, out = run(["chain", "--config", cfg, "--report", str(report)], capsys)
    assert code == 0
    assert all(r["passed"] for r in json.loads(report.read_text()))
    assert out.out.splitlines()[0].startswith("class_id,m,level,radius,G_size,H_size")


def test_bound_and_compare_without_class(capsys):
    code, out = run(["bound", "--range", "1", "--epsilon", "1", "--delta", "0.36787944117144233",
                     "--kappa", "0", "--fat", "0"], capsys)
    assert code == 0
    cols, vals = out.out.strip().splitlines()
    row = dict(zip(cols.split(","), vals.split(",")))
    assert row["theorem_bound"] == "5368"
    code, out = run(["compare", "--range", "1", "--delta", "0.05", "--kappa", "2", "--fat", "2",
                     "--eps-exponents", "1", "8"], capsys)
    assert code == 0 and len(out.out.strip().splitlines()) == 9


def test_bound_needs_dimensions(capsys):
    assert run(["bound", "--epsilon", "0.5"], capsys)[0] == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "o.csv"
    proc = subprocess.run([sys.executable, "-m", "fatconv", "bound", "--range", "1", "--epsilon", "0.5",
                           "--delta", "0.1", "--kappa", "1", "--fat", "1", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith("range_width,epsilon")
