"""
Configuration module for the frugal toolbox.
Reads configuration from environment variables (FRUGAL_<KEY>), with a .env file
honoured on import and defaults for everything else.
"""

import os

from dotenv import load_dotenv

ENV_PREFIX = "FRUGAL_"

# Default configuration values
DEFAULT_CONFIG = {
    "seed": "0",
    "log_level": "INFO",
    "train_fraction": "0.5",
    "reps": "100",
    "max_workers": "1",
    "record_timing": "false",
    "logistic_max_iter": "100",
    "logistic_tol": "1e-6",
    "separation_bound": "30",
    "ridge_lambda": "1e-8",
    "age_tolerance": "0",
    "top_fraction": "0.10",
    "field_mu": "1.0",
    "field_sigma": "1.0",
    "papers_per_researcher": "8",
    "first_year": "2000",
    "last_year": "2019",
    "calibration_iterations": "60",
}


def _get_config_from_env() -> dict:
    """Load all configuration values from the process environment."""
    load_dotenv()
    config = DEFAULT_CONFIG.copy()
    for key in DEFAULT_CONFIG:
        value = os.environ.get(f"{ENV_PREFIX}{key.upper()}")
        if value is not None and value.strip():
            config[key] = value.strip()
    return config


class Config:
    """Configuration class that reads from the environment.

    Uses default values if a variable is not set or empty.
    """

    def __init__(self):
        self._env_config = _get_config_from_env()

    def _get(self, key: str, default: str) -> str:
        """Get config value from the environment or default."""
        if key in self._env_config and self._env_config[key]:
            return self._env_config[key]
        return default

    def _flag(self, key: str) -> bool:
        value = self._get(key, DEFAULT_CONFIG[key])
        return value.lower() in ('true', '1', 'yes', 'on')

    @property
    def SEED(self) -> int:
        return int(self._get('seed', DEFAULT_CONFIG['seed']))

    @property
    def LOG_LEVEL(self) -> str:
        return self._get('log_level', DEFAULT_CONFIG['log_level']).upper()

    @property
    def TRAIN_FRACTION(self) -> float:
        return float(self._get('train_fraction', DEFAULT_CONFIG['train_fraction']))

    @property
    def REPS(self) -> int:
        return int(self._get('reps', DEFAULT_CONFIG['reps']))

    @property
    def MAX_WORKERS(self) -> int:
        return max(1, int(self._get('max_workers', DEFAULT_CONFIG['max_workers'])))

    @property
    def RECORD_TIMING(self) -> bool:
        return self._flag('record_timing')

    @property
    def LOGISTIC_MAX_ITER(self) -> int:
        return int(self._get('logistic_max_iter', DEFAULT_CONFIG['logistic_max_iter']))

    @property
    def LOGISTIC_TOL(self) -> float:
        return float(self._get('logistic_tol', DEFAULT_CONFIG['logistic_tol']))

    @property
    def SEPARATION_BOUND(self) -> float:
        return float(self._get('separation_bound', DEFAULT_CONFIG['separation_bound']))

    @property
    def RIDGE_LAMBDA(self) -> float:
        return float(self._get('ridge_lambda', DEFAULT_CONFIG['ridge_lambda']))

    @property
    def AGE_TOLERANCE(self) -> int:
        return int(self._get('age_tolerance', DEFAULT_CONFIG['age_tolerance']))

    @property
    def TOP_FRACTION(self) -> float:
        return float(self._get('top_fraction', DEFAULT_CONFIG['top_fraction']))

    @property
    def FIELD_MU(self) -> float:
        return float(self._get('field_mu', DEFAULT_CONFIG['field_mu']))

    @property
    def FIELD_SIGMA(self) -> float:
        return float(self._get('field_sigma', DEFAULT_CONFIG['field_sigma']))

    @property
    def PAPERS_PER_RESEARCHER(self) -> float:
        return float(self._get('papers_per_researcher', DEFAULT_CONFIG['papers_per_researcher']))

    @property
    def FIRST_YEAR(self) -> int:
        return int(self._get('first_year', DEFAULT_CONFIG['first_year']))

    @property
    def LAST_YEAR(self) -> int:
        return int(self._get('last_year', DEFAULT_CONFIG['last_year']))

    @property
    def CALIBRATION_ITERATIONS(self) -> int:
        return int(self._get('calibration_iterations', DEFAULT_CONFIG['calibration_iterations']))

    def reload(self):
        """Reload configuration from the environment."""
        self._env_config = _get_config_from_env()


# Global config instance
config = Config()
