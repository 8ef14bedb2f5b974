"""Configuration-driven experiment runner."""

from .config import ExperimentConfig, config_from_dict, load_config
from .output import emit_csv, emit_plot, parse_csv
from .presets import PRESETS, preset
from .runner import run_experiment

__all__ = [
    "ExperimentConfig",
    "PRESETS",
    "config_from_dict",
    "emit_csv",
    "emit_plot",
    "load_config",
    "parse_csv",
    "preset",
    "run_experiment",
]
