"""Experiment harness: configs, presets, CSV/SVG outputs and the CLI."""

from .config import ConfigError, ExperimentConfig, load, loads, preset
from .outputs import emit_csv, emit_plot, emit_region_map
from .runner import ExperimentReport, RunReport, run_experiment
