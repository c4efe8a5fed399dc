"""
M-estimator of the 7 parameters, solved by Branch & Bound
"""

from core.models.base import append_receipt
from core.solver.bnb import BnbConfig, solve


def estimate_m(spectrum, config=None, eta_table=None):
    """Global minimizer of C_N over the inner relaxation.

    Args:
        spectrum (SampleSpectrum): empirical spectrum (its metadata must carry
            sigma_max unless ``config.sigma_max`` is set)
        config (BnbConfig): solver settings, defaults to ``BnbConfig()``
        eta_table (EtaTable): defaults to the table of the spectrum's wavelet

    Returns:
        EstimationResult: method ``M-BB``, all 7 parameters estimated, with the
        spectrum receipt extended by this step
    """
    config = config or BnbConfig()
    result = solve(spectrum, config, eta_table)
    status = "PASS" if result.diagnostics["complete"] else "INCOMPLETE"
    result.receipt = append_receipt(spectrum.receipt.copy(), "estimate_m", status)
    return result
