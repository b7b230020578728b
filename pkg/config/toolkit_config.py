"""
Toolkit Configuration Loader

Loads and validates numerical settings from toolkit_config.json, merged
section by section over DEFAULT_CONFIG. BLOWUP_THREADS in the environment
(or .env) caps worker threads.
"""
import copy
import json
import logging
import os
from typing import Any, Optional

from errors import ConfigError
from specfun import VALID_TRANSFORMS

logger = logging.getLogger("CONFIG")

VALID_OUTPUT_FORMATS = ["csv", "json"]

THREADS_ENV_VAR = "BLOWUP_THREADS"

DEFAULT_CONFIG = {
    "quadrature": {
        "abs_tol": 1e-14,
        "rel_tol": 1e-12,
        "max_subdivisions": 2000,
        "transform": "semi_infinite_rational",
    },
    "energy_quadrature": {
        "inner_rel_tol": 1e-9,
        "outer_rel_tol": 1e-8,
    },
    "series_switchover": 0.05,
    "seed": 7,
    "threads": None,  # Falls back to BLOWUP_THREADS, then serial
    "output_format": "csv",
    "glued_cutoff_scale": 5.0,
    "scan": {
        "n_range": [62, 150],
        "tc_list": [-0.1, -0.5, -1.0, -2.0, -5.0, -10.0],
    },
}

_SECTIONS = ("quadrature", "energy_quadrature", "scan")


def load_toolkit_config(config_path: str = "toolkit_config.json") -> dict[str, Any]:
    """
    Load toolkit configuration from a JSON file.

    Args:
        config_path: Path to the JSON config file (default: toolkit_config.json)

    Returns:
        Dict with every DEFAULT_CONFIG key; nested sections are merged key by key.

    Raises:
        ConfigError: If a value is out of range or not one of the valid choices
    """
    config = copy.deepcopy(DEFAULT_CONFIG)

    if os.path.exists(config_path):
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                file_config = json.load(f)

            for key, value in file_config.items():
                if key not in DEFAULT_CONFIG:
                    logger.warning("Ignoring unknown key '%s' in %s", key, config_path)
                elif key in _SECTIONS:
                    config[key] = {**DEFAULT_CONFIG[key], **value}
                else:
                    config[key] = value

        except json.JSONDecodeError as e:
            logger.warning("Failed to parse %s: %s", config_path, e)
            logger.warning("Using default configuration")
    else:
        logger.info("%s not found, using default configuration", config_path)

    _validate_config(config)
    return config


def _validate_config(config: dict[str, Any]) -> None:
    """Validate the toolkit configuration."""
    quad = config["quadrature"]
    if quad["transform"] not in VALID_TRANSFORMS:
        raise ConfigError(
            f"Invalid transform '{quad['transform']}'. Valid transforms: {VALID_TRANSFORMS}"
        )
    for key in ("abs_tol", "rel_tol"):
        if not quad[key] > 0:
            raise ConfigError(f"quadrature.{key} must be positive, got {quad[key]}")
    if int(quad["max_subdivisions"]) < 1:
        raise ConfigError(f"quadrature.max_subdivisions must be >= 1, got {quad['max_subdivisions']}")

    for key, value in config["energy_quadrature"].items():
        if not value > 0:
            raise ConfigError(f"energy_quadrature.{key} must be positive, got {value}")

    if not config["series_switchover"] > 0:
        raise ConfigError(f"series_switchover must be positive, got {config['series_switchover']}")

    if config["output_format"] not in VALID_OUTPUT_FORMATS:
        raise ConfigError(
            f"Invalid output format '{config['output_format']}'. "
            f"Valid formats: {VALID_OUTPUT_FORMATS}"
        )

    if not config["glued_cutoff_scale"] > 0:
        raise ConfigError(f"glued_cutoff_scale must be positive, got {config['glued_cutoff_scale']}")

    n_range = config["scan"]["n_range"]
    if len(n_range) != 2 or n_range[0] > n_range[1]:
        raise ConfigError(f"scan.n_range must be [low, high], got {n_range}")
    if not config["scan"]["tc_list"] or any(t >= 0 for t in config["scan"]["tc_list"]):
        raise ConfigError(f"scan.tc_list must hold negative values, got {config['scan']['tc_list']}")

    threads = config["threads"]
    if threads is not None and (not isinstance(threads, int) or threads < 1):
        raise ConfigError(f"threads must be a positive integer or null, got {threads}")


def resolve_threads(config: dict[str, Any]) -> Optional[int]:
    """
    Worker count: config value, else BLOWUP_THREADS, else None (serial).

    Raises:
        ConfigError: If BLOWUP_THREADS is not a positive integer
    """
    if config.get("threads") is not None:
        return int(config["threads"])
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return None
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV_VAR} must be an integer, got '{raw}'") from None
    if threads < 1:
        raise ConfigError(f"{THREADS_ENV_VAR} must be positive, got {threads}")
    return threads
