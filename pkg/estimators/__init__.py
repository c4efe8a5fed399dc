"""
Estimators of the Biv-OfBm parameters

Each estimator lives in its own module and is registered in
``core.models.definitions.ESTIMATORS``; it is imported on first use.
"""

import importlib

from core.models.definitions import ESTIMATORS


def get_estimator(method):
    """Resolve an estimator function from its registry key (``m``, ``uni``, ``eig``)."""
    if method not in ESTIMATORS:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(ESTIMATORS)}")
    entry = ESTIMATORS[method]
    module = importlib.import_module(entry["module"])
    return getattr(module, entry["function"])


def run_estimator(method, spectrum, bnb_config=None, weights="ols", eta_table=None):
    """Run a registered estimator with the settings matching its kind.

    Args:
        method (str): registry key
        spectrum (SampleSpectrum): analyzed path
        bnb_config (BnbConfig): solver settings for ``solver`` estimators
        weights (str): regression weights for ``regression`` estimators
        eta_table (EtaTable): wavelet constant for ``solver`` estimators

    Returns:
        EstimationResult
    """
    function = get_estimator(method)
    if ESTIMATORS[method]["kind"] == "solver":
        return function(spectrum, bnb_config, eta_table=eta_table)
    return function(spectrum, weights=weights)
