import csv
import json
import subprocess
import sys

import pytest

from fnls_lab.cli import main, resolve, build_parser
from fnls_lab.parallel import THREADS_ENV, worker_count

pytestmark = pytest.mark.filterwarnings("ignore:dt=.*exceeds")


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_thresholds_contract(tmp_path):
    out = tmp_path / "curves.csv"
    assert main(["thresholds", "--alpha-min", "0.67", "--alpha-max", "1.0", "--steps", "100", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["alpha", "s1", "s2", "s3", "s4", "s5", "s_star"]
    assert len(rows) == 102
    manifest = json.loads(out.with_suffix(".manifest.json").read_text())
    assert manifest["version"] and manifest["config"]["steps"] == 100
    assert [p.name for p in tmp_path.iterdir() if p.name.startswith(".")] == []


def test_thresholds_svg(tmp_path):
    pytest.importorskip("matplotlib")
    svg = tmp_path / "c.svg"
    assert main(["thresholds", "--steps", "10", "--out", str(tmp_path / "c.csv"), "--svg", str(svg)]) == 0
    assert svg.read_text().lstrip().startswith("<?xml")


def test_simulate_config_twice_identical(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha": 0.9, "s": 0.8, "n-max": 12, "t_end": 0.02, "dt": 1e-3, "record-every": 5, "seed": 3, "N": 6}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = read_csv(a)
    assert rows[0] == ["t", "mass", "energy", "hs_norm", "modified_energy", "aliasing_residual"]
    assert len(rows) == 6
    m = json.loads(a.with_suffix(".manifest.json").read_text())
    assert m["seed"] == 3 and m["config"]["quad_order"] == 48


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha": 0.9, "seed": 3}))
    args = build_parser().parse_args(["simulate", "--config", str(cfg), "--seed", "5"])
    params = resolve(args)
    assert params["seed"] == 5 and params["alpha"] == 0.9 and params["dt"] == 1e-4


def test_weak_contract(tmp_path):
    out = tmp_path / "weak.csv"
    assert main(["lemmas", "--check", "weak", "--n0-max", "128", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["n0", "n1", "n2", "n3", "B", "ratio"]
    assert [r[0] for r in rows[1:]] == ["32", "64", "128"]


@pytest.mark.parametrize(
    "check,extra",
    [
        ("zeros", ["--n-max", "50"]),
        ("orthonormality", ["--n-max", "16"]),
        ("counting", ["--N1-list", "16,32", "--N2-list", "8"]),
        ("product-norms", ["--n-list", "4,8"]),
        ("convtail", ["--separations", "10,100"]),
    ],
)
def test_lemma_checks_run(tmp_path, check, extra):
    out = tmp_path / f"{check}.csv"
    assert main(["lemmas", "--check", check, "--out", str(out), *extra]) == 0
    assert len(read_csv(out)) > 1


def test_counting_schema(tmp_path):
    out = tmp_path / "c.csv"
    main(["lemmas", "--check", "counting", "--alpha-list", "1", "--N1-list", "16", "--N2-list", "8", "--full", "--out", str(out)])
    rows = read_csv(out)
    assert rows[0] == ["alpha", "N1", "N2", "tau", "count"] and len(rows) > 100


def test_bilinear_and_imethod_schemas(tmp_path):
    b = tmp_path / "b.csv"
    assert main(["bilinear", "--N1", "8", "--N2-list", "2,4,8", "--seeds", "2", "--out", str(b)]) == 0
    assert read_csv(b)[0] == ["alpha", "N1", "N2", "seed", "norm"]
    i = tmp_path / "i.csv"
    assert main(["imethod", "--n-max", "24", "--N-list", "4,8", "--dt", "2e-3", "--windows", "2", "--out", str(i)]) == 0
    rows = read_csv(i)
    assert rows[0] == ["N", "delta", "window", "E_start", "E_end", "increment"] and len(rows) == 5


def test_exit_codes(tmp_path, capsys):
    assert main([]) == 2
    assert main(["bogus"]) == 2
    assert main(["simulate", "--alpha", "1.5", "--out", str(tmp_path / "x.csv")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"unknown_key": 1}))
    assert main(["thresholds", "--config", str(bad)]) == 2
    assert main(["lemmas", "--check", "nothing"]) == 2
    assert main(["thresholds", "--config", str(tmp_path / "missing.json")]) == 2
    rc = main(["simulate", "--n-max", "8", "--dt", "0.05", "--t-end", "1", "--init", "single_mode", "--amplitude", "1e4", "--out", str(tmp_path / "y.csv")])
    assert rc == 3
    assert "last good t=0" in capsys.readouterr().err
    assert not (tmp_path / "y.csv").exists()


def test_worker_env(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "8")
    assert worker_count(1) == 8
    monkeypatch.setenv(THREADS_ENV, "zero")
    with pytest.raises(ValueError):
        worker_count(1)
    monkeypatch.delenv(THREADS_ENV)
    assert worker_count(3) == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["bilinear", "--alpha", "0.75", "--N1", "8", "--N2-list", "2,4,8", "--seeds", "3"],
        ["lemmas", "--check", "counting", "--N1-list", "16,32", "--N2-list", "4,8"],
    ],
)
def test_workers_byte_identical(tmp_path, monkeypatch, argv):
    outs = []
    for w in ("1", "8"):
        monkeypatch.setenv(THREADS_ENV, w)
        out = tmp_path / f"w{w}.csv"
        assert main([*argv, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_console_entry_point(tmp_path):
    out = tmp_path / "t.csv"
    res = subprocess.run(
        [sys.executable, "-m", "fnls_lab.cli", "thresholds", "--steps", "4", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and "5 rows" in res.stdout
