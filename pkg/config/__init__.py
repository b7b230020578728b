"""Configuration module for the verification toolkit."""
from .toolkit_config import DEFAULT_CONFIG, load_toolkit_config, resolve_threads

__all__ = ["DEFAULT_CONFIG", "load_toolkit_config", "resolve_threads"]
