"""
Run settings: key/value CSV files layered over the packaged defaults

A settings file has a ``key,value`` header and one setting per line; lists are
separated by semicolons and ``#`` starts a comment. Values resolve in the order
``core/models/config/run-defaults.csv`` < settings file < explicit overrides.
"""

import logging
import os

import numpy as np
import pandas as pd

from core.models.definitions import RUN_DEFAULTS, THETA_NAMES

logger = logging.getLogger(__name__)

INT_KEYS = (
    "replications",
    "seed_base",
    "threads",
    "delta_relax",
    "max_iters",
    "n_psi",
    "j1",
    "embedding_factor",
)
NONE_VALUES = ("", "none", "None", "null")


def _split(value):
    return [v.strip() for v in str(value).split(";") if v.strip()]


def _is_none(value):
    if isinstance(value, float):
        return bool(np.isnan(value))
    return value is None or (isinstance(value, str) and value.strip() in NONE_VALUES)


def parse_value(key, value):
    """Convert one raw (string) setting to its Python type.

    Args:
        key (str): setting name, one of the keys of ``run-defaults.csv``
        value: raw value; non-string values are returned after validation

    Returns:
        the typed value

    Raises:
        ValueError: for unknown keys or malformed values
    """
    if key not in defaults_table().index:
        raise ValueError(f"unknown setting {key!r}")
    if key in INT_KEYS:
        return int(value)
    if key == "j2":
        return None if _is_none(value) else int(value)
    if key == "n_list":
        values = _split(value) if isinstance(value, str) else list(value)
        return [int(v) for v in values]
    if key == "methods":
        return _split(value) if isinstance(value, str) else list(value)
    if key == "restrict":
        if _is_none(value):
            return None
        names = _split(value) if isinstance(value, str) else list(value)
        unknown = set(names) - set(THETA_NAMES)
        if unknown:
            raise ValueError(f"restrict names unknown axes {sorted(unknown)}")
        return names
    if key == "delta":
        values = _split(value) if isinstance(value, str) else np.atleast_1d(value)
        delta = [float(v) for v in values]
        if len(delta) not in (1, len(THETA_NAMES)):
            raise ValueError(f"delta takes 1 or {len(THETA_NAMES)} values, got {len(delta)}")
        return delta[0] if len(delta) == 1 else delta
    if key == "scale_delta":
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    return str(value).strip()


def defaults_table():
    return RUN_DEFAULTS.set_index("key")


def read_settings_file(fn):
    """Raw key -> value mapping of a settings CSV file."""
    if not os.path.isfile(fn):
        raise IOError(f"{fn} does not exist.")
    table = pd.read_csv(fn, comment="#", dtype=str, skipinitialspace=True)
    if not {"key", "value"} <= set(table.columns):
        raise IOError(f"{fn} must have 'key' and 'value' columns")
    table = table.fillna("")
    return dict(zip(table["key"].str.strip(), table["value"]))


def load_settings(fn=None, overrides=None):
    """Resolve the run settings.

    Args:
        fn (str): optional settings CSV file
        overrides (dict): explicit values (e.g. command-line flags); None values
            are ignored

    Returns:
        dict: every key of ``run-defaults.csv`` with its typed value
    """
    raw = dict(defaults_table()["value"])
    if fn is not None:
        raw.update(read_settings_file(fn))
        logger.debug(f"settings read from {fn}")
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    return {key: parse_value(key, value) for key, value in raw.items()}
