"""Experiment configuration and model files (YAML)."""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from ..models import HermiteBiehlerModel, Truncation, ZeroFamily

MODEL_FIELDS = ("kind", "a", "alpha", "delta", "points", "a_phase", "tau", "truncation", "name")


@dataclass
class ExperimentConfig:
    experiment: str
    model: dict = field(default_factory=dict)
    eps: float = 0.1
    delta: float = 0.5
    roster: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    seed: int = 0
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d):
        d = copy.deepcopy(d)
        known = {k: d.pop(k) for k in list(d) if k in cls.__dataclass_fields__ and k != "extra"}
        return cls(**known, extra=d)

    def table_name(self, default="table.csv"):
        return self.outputs.get("table", default)

    def summary_name(self):
        return self.outputs.get("summary", "summary.txt")


def default_config_path(experiment):
    return resources.files("hbfock.lab") / "configs" / f"{experiment}.yaml"


def load_config(path=None, experiment=None):
    """Read a config file; with no path, the packaged default for ``experiment``."""
    if path is None:
        if experiment is None:
            raise ValueError("need a config path or an experiment name")
        text = default_config_path(experiment).read_text()
    else:
        text = Path(path).read_text()
    d = yaml.safe_load(text) or {}
    if experiment is not None:
        d.setdefault("experiment", experiment)
        if d["experiment"] != experiment:
            raise ValueError(f"config is for {d['experiment']!r}, not {experiment!r}")
    return ExperimentConfig.from_dict(d)


def load_model_file(path):
    d = yaml.safe_load(Path(path).read_text()) or {}
    return d.get("model", d)


def build_model(spec):
    """HermiteBiehlerModel from a model description with fields
    kind, a, alpha, delta, points, a_phase, tau, truncation, name."""
    spec = dict(spec)
    unknown = set(spec) - set(MODEL_FIELDS)
    if unknown:
        raise ValueError(f"unknown model fields: {sorted(unknown)}")
    kind = spec.get("kind")
    if kind == "pw-exponential":
        zeros = ZeroFamily.pw(spec["a"])
    elif kind == "power-family":
        zeros = ZeroFamily.power(spec["alpha"])
    elif kind == "ls-family":
        zeros = ZeroFamily.ls(spec["delta"])
    elif kind == "finite-list":
        zeros = ZeroFamily.finite([_point(p) for p in spec.get("points", [])])
    elif kind == "custom-generator":
        raise ValueError("custom-generator models are built in code, not from files")
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    tr = Truncation(**spec.get("truncation", {}))
    return HermiteBiehlerModel(zeros, a_phase=float(spec.get("a_phase", 0.0)), tau=spec.get("tau"),
                               truncation=tr, name=spec.get("name", ""))


def _point(p):
    if isinstance(p, (list, tuple)):
        return complex(float(p[0]), float(p[1]))
    return complex(p)
