"""
YAML configuration loader for the engine.
Finds config.yaml and writes the documented sample file.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

logger = logging.getLogger(__name__)

SAMPLE_CONFIG = """# Temporal Influence Maximization Configuration
# All settings are optional - defaults are used if not specified

# cpSI-R diffusion
diffusion:
  p0: 0.1            # base infection probability
  alpha: 0.5         # reinforcement exponent
  beta: 1.0          # scale, p0 * beta must not exceed 1
  gamma: 0.01        # exponential decay rate
  tau_windows: 10    # activity window, in snapshot windows
  tau: null          # activity window in timestamp units; overrides tau_windows

# Snapshot sampling
sampling:
  window_width: 1
  eta: 0.7
  w_jaccard: 0.5
  w_kulczynski: 0.5
  invert_threshold: false   # true keeps near-duplicate snapshots instead

# Seed selection
selection:
  k: 10
  min_iter: 5
  max_rounds: 100

# Baseline seeders
baselines:
  susceptibility_alpha: 0.01
  bt_lambda: 0.01
  bt_gamma: null     # null = 10 * node count samples
  ci_radius: 10      # in windows
  inmfa_lambda: 0.1
  inmfa_mu: 0.05

# Experiment harness
experiment:
  mc_realizations: 100
  rng_seed: 0
  record_runtime: true   # false writes runtime 0 for byte-identical CSVs

# Performance
performance:
  workers: 1
  huge_event_limit: 100000

# Logging
logging:
  level: INFO  # DEBUG, INFO, WARNING, ERROR
  file: null   # Optional log file path
"""


class ConfigLoader:
    """Handles loading of YAML configuration files."""

    @staticmethod
    def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
        """
        Load configuration from YAML file.

        Search order:
        1. Explicit config_path if provided
        2. config.yaml in current directory
        3. config.yaml in project root
        4. Returns empty dict (will use defaults)

        Args:
            config_path: Optional explicit path to config file

        Returns:
            Dictionary of configuration values
        """
        if config_path:
            config_file = Path(config_path)
            if not config_file.exists():
                raise FileNotFoundError(f"Config file not found: {config_path}")
        else:
            config_file = Path("config.yaml")
            if not config_file.exists():
                config_file = Path(__file__).parent.parent / "config.yaml"
                if not config_file.exists():
                    logger.debug("No config.yaml found, using defaults")
                    return {}

        logger.info(f"Loading configuration from: {config_file}")
        try:
            with open(config_file, 'r', encoding='utf-8') as f:
                config_data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            logger.error(f"Error parsing YAML config file: {e}")
            raise ValueError(f"Invalid YAML in config file: {e}")

        if not isinstance(config_data, dict):
            raise ValueError(f"config file {config_file} must contain a mapping")
        return config_data

    @staticmethod
    def create_sample_config(output_path: Path = Path("config.yaml")) -> None:
        """
        Create a sample config.yaml file with all available options.

        Args:
            output_path: Path where to create the sample config file
        """
        with open(output_path, 'w', encoding='utf-8') as f:
            f.write(SAMPLE_CONFIG)
        logger.info(f"Sample config file created at: {output_path}")
