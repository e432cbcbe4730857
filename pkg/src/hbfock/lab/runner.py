"""Run experiments, compare against baselines and write CSV reports."""
from __future__ import annotations

import csv
import json
import time
from importlib import resources
from pathlib import Path

from .experiments import REGISTRY

DESCRIPTIONS = {
    "pw_equivalence": "area norm with W0 against the line norm on a Paley-Wiener roster",
    "thm1_necessity": "scaling of the W0 area norm of g_x with phi'(x) on the power family",
    "main_thm": "ratio band of the level-set weight on the power family",
    "spectral": "Clark nodes, sampling reconstruction and the spectral weight on Paley-Wiener",
    "ls_example": "phi'(x)|E(x)|^2 at half-integers for the ls family",
    "w2_counterexample": "partial integrals of the W2 norm of a slowly decaying profile",
    "lev_bounds": "distance to the sublevel set against min(d0, 1/||k_z||^2)",
    "carleson": "Whitney cover invariants and Carleson boxes for the level-set measure",
}

BASELINE_SLACK = 2.0


def default_baselines_path():
    return Path(str(resources.files("hbfock.lab") / "baselines.json"))


def load_baselines(path=None):
    p = Path(path) if path else default_baselines_path()
    if not p.exists():
        return {}
    return json.loads(p.read_text())


def save_baselines(data, path=None):
    p = Path(path) if path else default_baselines_path()
    p.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def run_experiment(name, cfg, baselines=None):
    if name not in REGISTRY:
        raise KeyError(f"unknown experiment {name!r}; known: {sorted(REGISTRY)}")
    t0 = time.perf_counter()
    rep = REGISTRY[name](cfg)
    rep.seconds = time.perf_counter() - t0
    base = (baselines or {}).get(name, {})
    for key, val in sorted(rep.stats.items()):
        if key in base:
            lim = BASELINE_SLACK * float(base[key])
            rep.check(f"{key}_vs_baseline", val, val <= lim, f"<= {BASELINE_SLACK:g} x {float(base[key]):.6g}")
    return rep


def _fmt(v):
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def write_report(rep, out_dir):
    """One CSV per table, a summary CSV (one row per check) and a plain-text
    summary.  Nothing time-dependent goes into the files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for tname, (header, rows) in rep.tables.items():
        p = out / f"{rep.experiment}_{tname}.csv"
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
        paths.append(p)
    params = json.dumps(rep.params, sort_keys=True, default=str)
    p = out / f"{rep.experiment}_summary.csv"
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["experiment", "model", "parameters", "statistic", "value", "threshold", "result"])
        for c in rep.checks:
            w.writerow([rep.experiment, rep.model, params, c.name, _fmt(c.value), c.threshold,
                        "pass" if c.passed else "FAIL"])
    paths.append(p)
    p = out / f"{rep.experiment}_summary.txt"
    p.write_text(summary_text(rep))
    paths.append(p)
    return paths


def summary_text(rep):
    lines = [f"experiment: {rep.experiment}", f"model: {rep.model}",
             f"parameters: {json.dumps(rep.params, sort_keys=True, default=str)}"]
    for c in rep.checks:
        lines.append(f"  [{'pass' if c.passed else 'FAIL'}] {c.name} = {c.value:.6g} ({c.threshold})")
    lines.append(f"result: {'pass' if rep.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"
