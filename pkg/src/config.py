"""
Configuration module for the influence maximization engine.
Holds diffusion, sampling, selection, baseline and experiment defaults.
Supports YAML files, TIM_* environment variables and CLI overrides.
"""

import logging
import multiprocessing
import os
from typing import Any, Dict, Optional

from src.baselines import BaselineParams
from src.diffusion import DiffusionParams
from src.tgraph import SimilarityWeights

logger = logging.getLogger(__name__)

# YAML section -> {yaml key: attribute}
YAML_SECTIONS = {
    'diffusion': {'p0': 'p0', 'alpha': 'alpha', 'beta': 'beta', 'gamma': 'gamma',
                  'tau_windows': 'tau_windows', 'tau': 'tau'},
    'sampling': {'window_width': 'window_width', 'eta': 'eta', 'w_jaccard': 'w_jaccard',
                 'w_kulczynski': 'w_kulczynski', 'invert_threshold': 'invert_threshold'},
    'selection': {'k': 'k', 'min_iter': 'min_iter', 'max_rounds': 'max_rounds'},
    'baselines': {'susceptibility_alpha': 'susceptibility_alpha', 'bt_lambda': 'bt_lambda',
                  'bt_gamma': 'bt_gamma', 'ci_radius': 'ci_radius', 'inmfa_lambda': 'inmfa_lambda',
                  'inmfa_mu': 'inmfa_mu'},
    'experiment': {'mc_realizations': 'mc_realizations', 'rng_seed': 'rng_seed',
                   'record_runtime': 'record_runtime'},
    'performance': {'workers': 'workers', 'huge_event_limit': 'huge_event_limit'},
    'logging': {'level': 'log_level', 'file': 'log_file'},
}

# argparse destination -> attribute
ARG_MAPPINGS = {
    'p0': 'p0', 'alpha': 'alpha', 'beta': 'beta', 'gamma': 'gamma', 'tau': 'tau',
    'window': 'window_width', 'eta': 'eta', 'k': 'k', 'min_iter': 'min_iter',
    'mc': 'mc_realizations', 'seed': 'rng_seed', 'workers': 'workers',
}


class EngineConfig:
    """Configuration class for the engine with all settings."""

    def __init__(self):
        logger.debug("Initializing EngineConfig")
        self.max_workers = multiprocessing.cpu_count()

        # cpSI-R diffusion
        self.p0 = 0.1
        self.alpha = 0.5
        self.beta = 1.0
        self.gamma = 0.01
        self.tau_windows = 10
        self.tau: Optional[float] = None  # timestamp units; overrides tau_windows

        # Snapshot sampling
        self.window_width = 1
        self.eta = 0.7
        self.w_jaccard = 0.5
        self.w_kulczynski = 0.5
        self.invert_threshold = False

        # Seed selection
        self.k = 10
        self.min_iter = 5
        self.max_rounds = 100

        # Baselines
        self.susceptibility_alpha = 0.01
        self.bt_lambda = 0.01
        self.bt_gamma: Optional[int] = None  # None = 10 * |V|
        self.ci_radius = 10
        self.inmfa_lambda = 0.1
        self.inmfa_mu = 0.05

        # Experiment
        self.mc_realizations = 100
        self.rng_seed = 0
        self.record_runtime = True

        # Performance
        self.workers = 1
        self.huge_event_limit = 100_000

        # Logging
        self.log_level = 'INFO'
        self.log_file: Optional[str] = None

    def update_from_yaml(self, yaml_config: Dict[str, Any]) -> None:
        """
        Update configuration from a loaded YAML dictionary.

        Args:
            yaml_config: Nested dictionary with one section per concern
        """
        logger.debug(f"Updating configuration from YAML with {len(yaml_config)} top-level keys")
        for section, keys in YAML_SECTIONS.items():
            values = yaml_config.get(section)
            if values is None:
                continue
            if not isinstance(values, dict):
                raise ValueError(f"config section '{section}' must be a mapping")
            for key, value in values.items():
                if key in keys:
                    setattr(self, keys[key], value)
                else:
                    logger.warning(f"Ignoring unknown configuration key: {section}.{key}")

        for section in yaml_config:
            if section not in YAML_SECTIONS:
                logger.warning(f"Ignoring unknown configuration section: {section}")
        logger.info("Configuration updated from YAML")

    def update_from_env(self) -> None:
        """Update configuration from TIM_* environment variables."""
        logger.debug("Updating configuration from environment variables")

        env_mappings = {
            'TIM_WORKERS': ('workers', int),
            'TIM_P0': ('p0', float),
            'TIM_ALPHA': ('alpha', float),
            'TIM_BETA': ('beta', float),
            'TIM_GAMMA': ('gamma', float),
            'TIM_TAU': ('tau', float),
            'TIM_WINDOW': ('window_width', int),
            'TIM_ETA': ('eta', float),
            'TIM_MC': ('mc_realizations', int),
            'TIM_SEED': ('rng_seed', int),
            'TIM_LOG_LEVEL': ('log_level', str),
        }

        updated_from_env = []
        for env_var, (attr, converter) in env_mappings.items():
            value = os.getenv(env_var)
            if value is not None:
                try:
                    setattr(self, attr, converter(value))
                    updated_from_env.append(env_var)
                    logger.debug(f"Set {attr} from {env_var}: {value}")
                except (ValueError, TypeError) as e:
                    logger.warning(f"Invalid value for {env_var}: {value} - {e}")

        if updated_from_env:
            logger.info(f"Updated configuration from environment variables: {updated_from_env}")

    def update_from_params(self, params: DiffusionParams) -> None:
        """Take every diffusion value from a parameter block; tau is in timestamp units."""
        self.p0 = params.p0
        self.alpha = params.reinforce_alpha
        self.beta = params.scale_beta
        self.gamma = params.decay_gamma
        self.tau = params.tau
        logger.info(f"Diffusion parameters loaded: {params}")

    def update_from_args(self, args) -> None:
        """Apply CLI flags that were given explicitly (None means not given)."""
        for dest, attr in ARG_MAPPINGS.items():
            value = getattr(args, dest, None)
            if value is not None:
                setattr(self, attr, value)
                logger.debug(f"Set {attr} from --{dest}: {value}")
        if getattr(args, 'no_timing', False):
            self.record_runtime = False
        if getattr(args, 'log_level', None):
            self.log_level = args.log_level

    def validate(self) -> bool:
        """Clamp out-of-range performance values and reject invalid model values."""
        logger.debug("Validating configuration values")
        validation_warnings = []

        if self.workers < 1 or self.workers > self.max_workers:
            clamped = min(max(self.workers, 1), self.max_workers)
            warning = f"workers ({self.workers}) should be between 1 and {self.max_workers}; using {clamped}"
            validation_warnings.append(warning)
            logger.warning(f"Configuration validation warning: {warning}")
            self.workers = clamped

        if self.mc_realizations < 1:
            warning = "mc_realizations should be at least 1"
            validation_warnings.append(warning)
            logger.warning(f"Configuration validation warning: {warning}")
            self.mc_realizations = 1

        if self.window_width < 1:
            raise ValueError(f"window_width must be at least 1, got {self.window_width}")
        if self.tau_windows <= 0:
            raise ValueError(f"tau_windows must be positive, got {self.tau_windows}")

        # Raise now rather than deep inside a run.
        self.diffusion_params()
        self.similarity_weights()
        self.baseline_params()

        if validation_warnings:
            logger.info(f"Configuration validation completed with {len(validation_warnings)} warnings")
        return True

    @property
    def effective_tau(self) -> float:
        return float(self.tau) if self.tau is not None else float(self.tau_windows * self.window_width)

    def diffusion_params(self) -> DiffusionParams:
        return DiffusionParams(p0=self.p0, reinforce_alpha=self.alpha, scale_beta=self.beta,
                               decay_gamma=self.gamma, tau=self.effective_tau)

    def similarity_weights(self) -> SimilarityWeights:
        return SimilarityWeights(w_jaccard=self.w_jaccard, w_kulczynski=self.w_kulczynski)

    def baseline_params(self) -> BaselineParams:
        return BaselineParams(susceptibility_alpha=self.susceptibility_alpha, bt_lambda=self.bt_lambda,
                              bt_gamma=self.bt_gamma, ci_radius=self.ci_radius,
                              inmfa_lambda=self.inmfa_lambda, inmfa_mu=self.inmfa_mu)

    def __str__(self) -> str:
        return f"""Engine Configuration:
- Diffusion: p0={self.p0}, alpha={self.alpha}, beta={self.beta}, gamma={self.gamma}, tau={self.effective_tau}
- Sampling: window={self.window_width}, eta={self.eta}, weights={self.w_jaccard}/{self.w_kulczynski}
- Selection: k={self.k}, min_iter={self.min_iter}
- Experiment: mc={self.mc_realizations}, seed={self.rng_seed}, workers={self.workers}/{self.max_workers}
"""

