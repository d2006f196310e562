"""Experiment driver: configs, seeded episodes, regret logs and summaries."""
from .config import ConfigError, RunConfig, parse_config, parse_config_text
from .io import RECORDS_HEADER, SUMMARY_HEADER, read_records, write_outputs
from .runner import RegretRecord, SummaryRow, aggregate, build_env, run_episode, run_experiment

__all__ = [
    "ConfigError",
    "RECORDS_HEADER",
    "RegretRecord",
    "RunConfig",
    "SUMMARY_HEADER",
    "SummaryRow",
    "aggregate",
    "build_env",
    "parse_config",
    "parse_config_text",
    "read_records",
    "run_episode",
    "run_experiment",
    "write_outputs",
]
