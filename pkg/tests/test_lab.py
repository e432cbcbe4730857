import csv
import json
import shutil
import subprocess
import sys

import pytest
import yaml

from hbfock.lab.cli import main
from hbfock.lab.config import MODEL_FIELDS, build_model, load_config
from hbfock.lab.experiments import REGISTRY
from hbfock.lab.runner import run_experiment

EXPERIMENTS = ["carleson", "lev_bounds", "ls_example", "main_thm", "pw_equivalence", "spectral",
               "thm1_necessity", "w2_counterexample"]

TINY_PW = {
    "experiment": "pw_equivalence",
    "model": {"kind": "pw-exponential", "a": 3.141592653589793},
    "seed": 7,
    "roster": {"sinc": 2, "kernel": 1, "terms": 2},
    "tolerances": {"area_rel": 1.0e-3},
    "thresholds": {"max_over_min": 10.0},
}


def _write(path, data):
    path.write_text(yaml.safe_dump(data))
    return path


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_registry_and_packaged_configs():
    assert sorted(REGISTRY) == EXPERIMENTS
    for name in EXPERIMENTS:
        assert load_config(None, name).experiment == name


def test_config_experiment_mismatch(tmp_path):
    p = _write(tmp_path / "c.yaml", {"experiment": "spectral"})
    with pytest.raises(ValueError):
        load_config(p, "carleson")


def test_build_model_rejects_unknown_fields():
    with pytest.raises(ValueError):
        build_model({"kind": "pw-exponential", "a": 1.0, "colour": "red"})
    assert "truncation" in MODEL_FIELDS
    m = build_model({"kind": "power-family", "alpha": 0.75,
                     "truncation": {"N_max": 1000, "tail_tol": 1e-12, "head": 64, "window": 16},
                     "name": "pp"})
    assert m.name == "pp"


def test_lab_list_console_script():
    exe = shutil.which("lab")
    cmd = [exe, "list"] if exe else [sys.executable, "-m", "hbfock.lab.cli", "list"]
    out = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert [line.split()[0] for line in out.strip().splitlines()] == EXPERIMENTS


def test_run_writes_deterministic_reports(tmp_path, capsys):
    cfg = _write(tmp_path / "pw.yaml", TINY_PW)
    base = tmp_path / "base.json"
    base.write_text("{}")
    outs = []
    for k in range(2):
        out = tmp_path / f"out{k}"
        assert main(["run", "pw_equivalence", "--config", str(cfg), "--out", str(out),
                     "--baselines", str(base)]) == 0
        outs.append(out)
    names = sorted(p.name for p in outs[0].iterdir())
    assert names == ["pw_equivalence_ratios.csv", "pw_equivalence_summary.csv", "pw_equivalence_summary.txt"]
    for n in names:
        assert (outs[0] / n).read_bytes() == (outs[1] / n).read_bytes()
    rows = _read_csv(outs[0] / "pw_equivalence_summary.csv")
    assert rows[0] == ["experiment", "model", "parameters", "statistic", "value", "threshold", "result"]
    assert all(r[-1] == "pass" for r in rows[1:])
    assert "result: pass" in capsys.readouterr().out


def test_run_fails_on_threshold(tmp_path):
    bad = dict(TINY_PW, thresholds={"max_over_min": 1.0})
    cfg = _write(tmp_path / "pw.yaml", bad)
    base = tmp_path / "base.json"
    base.write_text("{}")
    assert main(["run", "pw_equivalence", "--config", str(cfg), "--out", str(tmp_path / "o"),
                 "--baselines", str(base)]) == 1
    rows = _read_csv(tmp_path / "o" / "pw_equivalence_summary.csv")
    assert any(r[-1] == "FAIL" for r in rows[1:])


def test_model_override_and_baseline_update(tmp_path):
    cfg = _write(tmp_path / "pw.yaml", TINY_PW)
    mod = _write(tmp_path / "m.yaml", {"kind": "pw-exponential", "a": 2.0, "name": "pw2"})
    base = tmp_path / "base.json"
    base.write_text("{}")
    assert main(["baseline", "update", "pw_equivalence", "--config", str(cfg), "--model", str(mod),
                 "--baselines", str(base)]) == 0
    data = json.loads(base.read_text())
    assert set(data) == {"pw_equivalence"} and "max_over_min" in data["pw_equivalence"]
    # a baseline far below the observed spread trips the regression check
    data["pw_equivalence"]["max_over_min"] = 0.1
    base.write_text(json.dumps(data))
    assert main(["run", "pw_equivalence", "--config", str(cfg), "--model", str(mod),
                 "--out", str(tmp_path / "o"), "--baselines", str(base)]) == 1
    rows = _read_csv(tmp_path / "o" / "pw_equivalence_summary.csv")
    assert rows[1][1] == "pw2"


def test_run_experiment_unknown():
    with pytest.raises(KeyError):
        run_experiment("nope", None)


@pytest.fixture
def pw_model_file(tmp_path):
    return _write(tmp_path / "pw.yaml", {"kind": "pw-exponential", "a": 1.0})


def test_levelset_csv(tmp_path, pw_model_file):
    out = tmp_path / "ls.csv"
    assert main(["levelset", "--model", str(pw_model_file), "--eps", "0.1353352832366127",
                 "--delta", "0.36787944117144233", "--out", str(out)]) == 0
    rows = _read_csv(out)
    assert rows[0] == ["level", "x", "y", "abs_theta"]
    # pw with a = 1: the eps curve is y = 1 and the delta curve y = 1/2
    for lev, x, y, t in rows[1:]:
        target = 1.0 if float(lev) < 0.2 else 0.5
        assert abs(float(y) - target) < 1e-6


def test_levelset_raster_and_stats(tmp_path, pw_model_file):
    out = tmp_path / "r.csv"
    assert main(["levelset", "--model", str(pw_model_file), "--eps", "0.1353352832366127", "--raster",
                 "--nx", "5", "--ny", "3", "--out", str(out)]) == 0
    rows = _read_csv(out)
    assert rows[0] == ["x", "y", "d_eps"] and len(rows) == 16
    out = tmp_path / "s.csv"
    assert main(["levelset", "--model", str(pw_model_file), "--eps", "0.1353352832366127",
                 "--delta", "0.36787944117144233", "--stats", "--nx", "3", "--ny", "2",
                 "--y-max", "0.4", "--out", str(out)]) == 0
    rows = _read_csv(out)
    assert rows[0][0:2] == ["x", "y"] and len(rows) == 7


def test_weights_csv(tmp_path, pw_model_file):
    out = tmp_path / "w.csv"
    assert main(["weights", "--model", str(pw_model_file), "--kind", "W_one2", "--nx", "3", "--ny", "2",
                 "--out", str(out)]) == 0
    rows = _read_csv(out)
    assert rows[0] == ["x", "y", "omega", "log_W"]
    # on the real line omega = 1 + sqrt(phi') = 2 for a = 1
    assert float(rows[1][2]) == pytest.approx(2.0)
    out = tmp_path / "c.csv"
    assert main(["weights", "--model", str(pw_model_file), "--cover", "--eps", "0.1353352832366127",
                 "--delta", "0.36787944117144233", "--out", str(out)]) == 0
    rows = _read_csv(out)
    assert rows[0] == ["a", "b", "dist"]
    assert float(rows[1][0]) <= -4.0 and float(rows[-1][1]) >= 4.0
