"""Config ingestion, experiment presets, CSV persistence and the CLI."""

from .config import ConfigError, ExperimentConfig, load_config, save_config
from .results import ResultSet, Row, emit_csv
from .presets import PRESET_NAMES, run_preset

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "PRESET_NAMES",
    "ResultSet",
    "Row",
    "emit_csv",
    "load_config",
    "run_preset",
    "save_config",
]
