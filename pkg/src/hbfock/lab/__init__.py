"""Experiment runner and command line interface."""
from .config import ExperimentConfig, build_model, load_config
from .experiments import REGISTRY, Report
from .runner import run_experiment, write_report

__all__ = ["ExperimentConfig", "build_model", "load_config", "REGISTRY", "Report", "run_experiment",
           "write_report"]
