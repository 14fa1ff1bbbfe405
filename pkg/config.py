"""
Configuration settings for the fixed-point search toolkit
"""
import os
import logging
from typing import Dict, Any

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Application Settings
APP_CONFIG = {
    "version": "1.0.0",
    "description": "Deviation formulas, statevector oracle and sweeps for "
                   "fixed-point search with two selective phase shifts",
    "prog": "fpsearch"
}

# Numeric tolerances shared by the formula modules and the verification battery
NUMERIC_CONFIG = {
    "form_tolerance": 1e-12,
    "grover_tolerance": 1e-14,
    "oracle_tolerance": 1e-10,
    "simpson_tolerance": 1e-8,
    "derivative_step": 1e-6,
    "derivative_tolerance": 1e-6,
    "result_slack": 1e-15,
    "interval_tolerance": 1e-9,
    "zero_level": 1e-20,
    "zero_location_tolerance": 1e-8
}

# Statevector simulator limits
SIMULATOR_CONFIG = {
    "max_dim": 256,
    "max_depth": 12,
    "underflow_floor": 1e-300,
    "unitarity_tolerance": 1e-10,
    "default_dim": 16,
    "default_s_index": 0,
    "default_t_index": None,  # None means dim - 1
    "default_seed": 42
}

# Average-deviation settings
AVERAGE_CONFIG = {
    "simpson_subdivisions": 10000,
    "confirm_grid": 500
}

# Sweep settings
SWEEP_CONFIG = {
    "default_epsilon": 0.9,
    "default_beta": 0.75,
    "default_alpha": 1.0,
    "default_points": 101,
    "significant_digits": 17,
    "workers": 4
}

# Verification battery settings
VERIFY_CONFIG = {
    "samples": 10000,
    "seed": 42,
    "bounds_grid": 100,
    "oracle_dims": [2, 4, 8, 16, 64],
    "oracle_cases": 1000,
    "recursion_depth": 3
}

# File Paths
PATHS_CONFIG = {
    "log_file": None
}

# Process exit codes
EXIT_CODES = {
    "ok": 0,
    "usage": 1,
    "verification_failed": 2
}

# Error Messages
ERROR_MESSAGES = {
    "out_of_range": "{parameter} must lie in [{low}, {high}], got {value}",
    "non_finite": "{parameter} must be a finite number, got {value}",
    "degenerate_range": "--beta must be strictly less than --alpha, got beta={beta}, alpha={alpha}",
    "no_zero_phase": "no real zero-deviation phase exists for epsilon={value} > 3/4",
    "verification_failed": "verification failed: {failed}",
    "unexpected": "unexpected error: {error}"
}

_ENV_OVERRIDES = {
    "FPSEARCH_WORKERS": ("sweep", "workers", int),
    "FPSEARCH_MAX_DIM": ("simulator", "max_dim", int),
    "FPSEARCH_MAX_DEPTH": ("simulator", "max_depth", int),
    "FPSEARCH_SEED": ("verify", "seed", int)
}


def get_config(section: str) -> Dict[str, Any]:
    """Get configuration for a specific section"""
    configs = {
        "app": APP_CONFIG,
        "numeric": NUMERIC_CONFIG,
        "simulator": SIMULATOR_CONFIG,
        "average": AVERAGE_CONFIG,
        "sweep": SWEEP_CONFIG,
        "verify": VERIFY_CONFIG,
        "paths": PATHS_CONFIG,
        "exit_codes": EXIT_CODES,
        "errors": ERROR_MESSAGES
    }

    return configs.get(section, {})


def _with_env_overrides(section: str) -> Dict[str, Any]:
    config = get_config(section).copy()
    load_dotenv()

    for env_name, (target, key, cast) in _ENV_OVERRIDES.items():
        if target != section or not os.getenv(env_name):
            continue
        try:
            config[key] = cast(os.getenv(env_name))
        except ValueError:
            logger.warning(f"Ignoring malformed {env_name}={os.getenv(env_name)!r}")

    return config


def get_sweep_config() -> Dict[str, Any]:
    """Get sweep configuration with environment overrides"""
    return _with_env_overrides("sweep")


def get_simulator_config() -> Dict[str, Any]:
    """Get simulator configuration with environment overrides"""
    return _with_env_overrides("simulator")


def get_verify_config() -> Dict[str, Any]:
    """Get verification configuration with environment overrides"""
    return _with_env_overrides("verify")


def get_log_level() -> str:
    """Log level name, overridable through FPSEARCH_LOG_LEVEL"""
    load_dotenv()
    return os.getenv("FPSEARCH_LOG_LEVEL", "WARNING").upper()


def validate_config() -> bool:
    """Validate configuration settings"""
    try:
        if SIMULATOR_CONFIG["max_dim"] < 2 or SIMULATOR_CONFIG["max_depth"] < 0:
            return False

        subdivisions = AVERAGE_CONFIG["simpson_subdivisions"]
        if subdivisions < 2 or subdivisions % 2:
            return False

        if SWEEP_CONFIG["workers"] < 1 or SWEEP_CONFIG["default_points"] < 2:
            return False

        return True

    except (KeyError, TypeError):
        return False


# Validate configuration on import
if not validate_config():
    print("Warning: Configuration validation failed. Some features may not work correctly.")
