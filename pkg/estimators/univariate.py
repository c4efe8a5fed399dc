"""
Univariate wavelet estimator of the Hurst eigenvalues

Each diagonal entry of S(2^j) is regressed on its own. Under mixing both entries
are dominated by h2 at coarse scales, so h2 is read there and h1 at fine scales:
ĥ1 is the smaller of the two fine-scale estimates, ĥ2 the larger of the two
coarse-scale estimates.
"""

import logging

from core.errors import InsufficientOctavesError
from core.models.base import append_receipt
from core.models.result import EstimationResult
from core.tools.stats import fit_slope, split_octaves

logger = logging.getLogger(__name__)


def estimate_univariate(spectrum, weights="ols"):
    """Estimate (h1, h2) from the diagonal of the spectrum.

    Args:
        spectrum (SampleSpectrum): empirical spectrum
        weights (str): ``ols`` or ``kj`` (see ``core.tools.stats.fit_slope``)

    Returns:
        EstimationResult: method ``univariate`` with h1 and h2 estimated

    Raises:
        InsufficientOctavesError: if the fine or the coarse set has fewer than
            two octaves
    """
    js, counts = spectrum.js, spectrum.counts
    fine, coarse = split_octaves(js)
    if fine.sum() < 2 or coarse.sum() < 2:
        raise InsufficientOctavesError(
            f"octaves {js.tolist()} do not give 2 fine and 2 coarse scales"
        )
    slopes = {}
    for label, mask in (("fine", fine), ("coarse", coarse)):
        for entry, values in (("11", spectrum.s11), ("22", spectrum.s22)):
            slopes[f"{label}_{entry}"] = fit_slope(
                js[mask], values[mask], counts[mask], weights
            )
    h1 = (min(slopes["fine_11"], slopes["fine_22"]) - 1.0) / 2.0
    h2 = (max(slopes["coarse_11"], slopes["coarse_22"]) - 1.0) / 2.0
    logger.debug(f"univariate slopes {slopes}")
    return EstimationResult(
        theta_hat={"h1": h1, "h2": h2},
        method="univariate",
        diagnostics={
            "slopes": slopes,
            "fine_octaves": js[fine].tolist(),
            "coarse_octaves": js[coarse].tolist(),
        },
        config={"weights": weights},
        receipt=append_receipt(spectrum.receipt.copy(), "estimate_univariate", "PASS"),
    )
