import csv
import json
import subprocess
import sys

import pytest

from permpoly import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_exit_zero_and_lines(capsys):
    code, out, _ = run(["verify", "group-integrals", "--seed", "1", "--samples", "20000"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert all(line.startswith(("PASS", "FAIL")) for line in lines[:-1])
    assert lines[-1].endswith("checks passed")


def test_verify_failing_check_exits_one(capsys, monkeypatch):
    from permpoly import verify

    failing = verify.Check("cue", "forced", "z", 9.0, 4.0, False, 1.0, 0.0)
    monkeypatch.setitem(verify.SUITE_FUNCS, "cue", lambda **_: [failing])
    code, out, _ = run(["verify", "cue"], capsys)
    assert code == 1 and out.startswith("FAIL")


@pytest.mark.parametrize(
    "args",
    [
        ["verify", "nope"],
        ["estimate", "mean-poly", "--ensemble", "GUE", "--n", "2"],
        ["estimate", "mean-poly", "--ensemble", "GUE", "--n", "2", "--mu", "x,y"],
        ["estimate", "two-point", "--ensemble", "GUE", "--n", "2", "--mu", "0.1"],
        ["estimate", "volume", "--ensemble", "GUE", "--n", "2", "--mu", "0.1"],
        ["estimate", "mean-poly", "--ensemble", "Wishart", "--n", "2", "--mu", "0.1"],
        ["roots", "--ensemble", "GUE", "--n", "4"],
        ["roots", "--ensemble", "GUE", "--n", "30", "--out", "never.csv"],
        ["asymptotics", "--ensemble", "Wishart"],
        ["asymptotics", "--ensemble", "GUE", "--grid", "1,0,0,1,2,2"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_two(args, capsys):
    code, _, err = run(args, capsys)
    assert code == 2 and err


def test_estimate_json_schema(capsys, tmp_path):
    out = tmp_path / "e.json"
    code, _, _ = run(["estimate", "two-point", "--ensemble", "GUE", "--n", "3", "--mu", "0.3,0.1", "--mu", "-0.2,0.4",
                      "--samples", "5000", "--seed", "4", "--out", str(out)], capsys)
    assert code == 0
    d = json.loads(out.read_text())
    assert set(d) == {"quantity", "ensemble", "n", "mu", "estimate", "stderr", "oracle", "z", "samples", "seed", "elapsed_s"}
    assert d["mu"] == [[0.3, 0.1], [-0.2, 0.4]]
    assert d["oracle"]["source"] == "two_point_gue" and d["z"] < 4


def test_estimate_without_oracle_reports_null(capsys):
    code, out, _ = run(["estimate", "mean-poly", "--ensemble", "Ginibre", "--n", "2", "--mu", "0.5",
                        "--samples", "1000"], capsys)
    d = json.loads(out)
    assert code == 0 and d["oracle"] is None and d["z"] is None


def test_estimate_csv(capsys):
    code, out, _ = run(["estimate", "mean-poly", "--ensemble", "GOE", "--n", "2", "--mu", "0.5",
                        "--samples", "1000", "--format", "csv"], capsys)
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and len(rows) == 1 and rows[0]["ensemble"] == "GOE"


def test_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"ensemble": {"kind": "GUE", "n": 2}, "mu": [[0.5, 0.0]], "samples": 800, "seed": 3}))
    code, out, _ = run(["estimate", "mean-poly", "--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out)["seed"] == 3
    code, out, _ = run(["estimate", "mean-poly", "--config", str(cfg), "--seed", "8"], capsys)
    assert json.loads(out)["seed"] == 8


@pytest.mark.parametrize("content", ['{"bogus": 1}', "not json", "[1, 2]"])
def test_bad_config_exits_two(capsys, tmp_path, content):
    cfg = tmp_path / "c.json"
    cfg.write_text(content)
    code, _, _ = run(["estimate", "mean-poly", "--config", str(cfg)], capsys)
    assert code == 2


def test_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("PERMPOLY_SEED", "17")
    _, out, _ = run(["estimate", "mean-poly", "--ensemble", "GUE", "--n", "2", "--mu", "0.1", "--samples", "100"], capsys)
    assert json.loads(out)["seed"] == 17


def test_workers_do_not_change_estimate(capsys):
    args = ["estimate", "two-point", "--ensemble", "CUE", "--n", "3", "--mu", "0.2,0.1", "--mu", "-0.3",
            "--samples", "6000", "--seed", "2"]
    outs = []
    for w in ("1", "3"):
        _, out, _ = run(args + ["--workers", w], capsys)
        d = json.loads(out)
        d.pop("elapsed_s")
        outs.append(d)
    assert outs[0] == outs[1]


def test_roots_outputs(capsys, tmp_path):
    out = tmp_path / "sub" / "gue.csv"
    code, _, _ = run(["roots", "--ensemble", "GUE", "--n", "5", "--samples", "30", "--out", str(out),
                      "--marginal", "im", "--marginal", "re", "--grid", "-1,1,-2,2,4,8"], capsys)
    assert code == 0
    assert len(out.read_text().splitlines()) == 1 + 4 * 8
    assert (tmp_path / "sub" / "gue.marginal_im.csv").exists()
    assert (tmp_path / "sub" / "gue.marginal_re.csv").exists()
    summary = json.loads((tmp_path / "sub" / "gue.summary.json").read_text())
    assert summary["grid"] == [-1.0, 1.0, -2.0, 2.0, 4, 8]
    assert summary["report"]["n_roots"] == 150


@pytest.mark.parametrize("kind,phi_empty,density_empty", [("GUE", False, False), ("GOE", True, False),
                                                          ("CUE-char", False, True), ("ginibre", False, False)])
def test_asymptotics_csv(capsys, kind, phi_empty, density_empty):
    code, out, _ = run(["asymptotics", "--ensemble", kind, "--grid", "-1,1,-1,1,3,4"], capsys)
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and len(rows) == 12
    assert (rows[0]["phi"] == "") == phi_empty
    assert (rows[0]["density"] == "") == density_empty


def test_asymptotics_clamps_huge_grids(capsys):
    code, out, err = run(["asymptotics", "--ensemble", "CUE", "--grid", "-1e9,1e9,-1,1,2,2"], capsys)
    assert code == 0 and "clamped" in err
    assert float(out.splitlines()[1].split(",")[0]) == -1000.0


def test_io_error_exits_one(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(["asymptotics", "--ensemble", "GUE", "--out", str(blocker / "x.csv")], capsys)
    assert code == 1 and "I/O" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "permpoly", "asymptotics", "--ensemble", "Ginibre",
                           "--grid", "0,1,0,1,1,1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("re,im,phi,density")
