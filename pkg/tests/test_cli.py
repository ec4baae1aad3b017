import json
import subprocess
import sys

import pytest

from nkimit import harness as H
from nkimit import landscape as nk
from nkimit.cli import main


@pytest.fixture
def land(tmp_path):
    path = tmp_path / "l.json"
    assert main(["generate", "--n", "8", "--k", "2", "--seed", "3", "--out", str(path)]) == 0
    return path


def test_generate_writes_analyzed_landscape(land):
    doc = json.loads(land.read_text())
    ls = nk.load(land)
    assert (doc["n"], doc["k"]) == (8, 2)
    assert doc["global_max"] == nk.brute_force_maximum(nk.generate(8, 2, 3))[0]
    assert ls == nk.generate(8, 2, 3)


def test_generate_is_byte_deterministic(tmp_path, land):
    other = tmp_path / "again.json"
    main(["generate", "--n", "8", "--k", "2", "--seed", "3", "--out", str(other)])
    assert other.read_bytes() == land.read_bytes()


def test_generate_accepts_hex_seed(tmp_path):
    path = tmp_path / "h.json"
    assert main(["generate", "--n", "4", "--seed", "0xffffffffffffffff", "--out", str(path)]) == 0
    assert nk.load(path).seed == 2**64 - 1


def test_analyze(land, capsys, tmp_path):
    assert main(["analyze", str(land)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# n=8 k=2")
    assert "d,relative_fitness" in out and "\n0,1\n" in out
    prof = tmp_path / "p.csv"
    assert main(["analyze", str(land), "--profile-out", str(prof)]) == 0
    assert len(prof.read_text().splitlines()) == 10
    assert "d,relative_fitness" not in capsys.readouterr().out


def test_baseline(capsys):
    assert main(["baseline", "--n", "12", "--m", "1,10"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,m,lambda_n,one_minus_lambda,mean_cost"
    assert float(lines[1].split(",")[-1]) == pytest.approx(1.11612, abs=5e-5)
    assert len(lines) == 3


def test_search(land, capsys, tmp_path):
    trace = tmp_path / "t.csv"
    assert main(["search", str(land), "--m", "4", "--p", "0.5", "--seed", "9", "--trace", str(trace)]) == 0
    header, row = capsys.readouterr().out.splitlines()
    fields = dict(zip(header.split(","), row.split(",")))
    assert fields["success"] == "1"
    rows = trace.read_text().splitlines()
    assert rows[0] == "trial,model_fitness,model_relative_fitness"
    assert len(rows) - 1 == int(fields["t_star"])
    assert rows[-1].endswith(",1")


def test_search_censored(land, capsys):
    assert main(["search", str(land), "--m", "1", "--seed", "4", "--max-trials", "1"]) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert row[3:] == ["0", "1", "0.00390625", ""]


def test_sweep_deterministic_and_worker_independent(land, tmp_path):
    args = ["sweep", str(land), "--m-grid", "1,3", "--p-grid", "0,0.7", "-R", "300", "--master-seed", "5"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--workers", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    cells = H.read_csv(a)
    assert [(c.p, c.m) for c in cells] == [(0.0, 1), (0.0, 3), (0.7, 1), (0.7, 3)]


def test_sweep_trace_dir(land, tmp_path):
    out, tdir = tmp_path / "s.csv", tmp_path / "traces"
    main(["sweep", str(land), "--m-grid", "2", "--p-grid", "0.5", "-R", "5", "--trace-dir", str(tdir), "--out", str(out)])
    assert [p.name for p in tdir.iterdir()] == ["trace_m2_p0.5.csv"]


def test_workers_env_default(monkeypatch, land, tmp_path):
    monkeypatch.setenv("NKIMIT_WORKERS", "2")
    from nkimit.cli import build_parser

    args = build_parser().parse_args(["sweep", str(land), "--out", str(tmp_path / "x.csv")])
    assert args.workers == 2


# --- errors ------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["generate", "--n", "12", "--k", "12", "--out", "{tmp}/x.json"],
        ["generate", "--n", "31", "--out", "{tmp}/x.json"],
        ["generate", "--seed", "-1", "--out", "{tmp}/x.json"],
        ["search", "{land}", "--p", "1.5"],
        ["search", "{land}", "--m", "0"],
        ["sweep", "{land}", "--m-grid", "", "--out", "{tmp}/x.csv"],
        ["sweep", "{land}", "--p-grid", "0,2", "--out", "{tmp}/x.csv"],
        ["sweep", "{land}", "--workers", "0", "--out", "{tmp}/x.csv"],
        ["baseline", "--m", "0"],
        ["baseline", "--n", "65"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2_without_output(argv, land, tmp_path, capsys):
    argv = [a.format(tmp=tmp_path, land=land) for a in argv]
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert capsys.readouterr().out == ""
    assert not (tmp_path / "x.json").exists() and not (tmp_path / "x.csv").exists()


def test_corrupted_landscape_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 4, "k": 1,, }')
    assert main(["analyze", str(bad)]) == 1
    assert main(["search", str(tmp_path / "missing.json")]) == 1
    assert main(["sweep", str(bad), "--out", str(tmp_path / "x.csv")]) == 1
    assert not (tmp_path / "x.csv").exists()
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize("cmd", ["generate", "analyze", "baseline", "search", "sweep"])
def test_help(cmd, capsys):
    with pytest.raises(SystemExit) as exc:
        main([cmd, "--help"])
    assert exc.value.code == 0
    assert "usage: nkimit " + cmd in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "nkimit", "baseline", "--n", "4", "--m", "1"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("n,m,")
    assert "config" in res.stderr
