"""
Eigenvalue-based wavelet estimator

The eigenvalues of S(2^j) scale as 2^{j(2h1+1)} and 2^{j(2h2+1)} at coarse
scales whatever the mixing, and the eigenvector of the larger one tends to the
second column of W, (β, 1)/sqrt(1 + β²).

β̂ is read from the dominant eigenvector of the coarsest usable octave only,
a simplified extraction that is reported in the result diagnostics.
"""

import logging
import warnings

import numpy as np

from core.errors import InsufficientOctavesError
from core.models.base import append_receipt
from core.models.result import EstimationResult
from core.tools.stats import fit_slope, split_octaves

logger = logging.getLogger(__name__)

BETA_EXTRACTION = "dominant eigenvector of the coarsest octave (simplified)"


def estimate_eigen(spectrum, weights="ols"):
    """Estimate (h1, h2, β) from the multiscale eigenstructure of S(2^j).

    Octaves whose smaller eigenvalue is not positive are skipped.

    Args:
        spectrum (SampleSpectrum): empirical spectrum
        weights (str): ``ols`` or ``kj`` (see ``core.tools.stats.fit_slope``)

    Returns:
        EstimationResult: method ``eigenvalue`` with h1, h2 and beta estimated

    Raises:
        InsufficientOctavesError: with fewer than two usable coarse octaves
    """
    js, counts = spectrum.js, spectrum.counts
    values, vectors = np.linalg.eigh(spectrum.matrices)
    usable = values[:, 0] > 0
    skipped = js[~usable].tolist()
    if skipped:
        warnings.warn(f"octaves {skipped} have non-positive eigenvalues and are skipped")
    _, coarse = split_octaves(js)
    mask = coarse & usable
    if mask.sum() < 2:
        raise InsufficientOctavesError(
            f"{int(mask.sum())} usable coarse octaves, at least 2 are needed"
        )

    slope_small = fit_slope(js[mask], values[mask, 0], counts[mask], weights)
    slope_large = fit_slope(js[mask], values[mask, 1], counts[mask], weights)

    coarsest = np.flatnonzero(mask)[-1]
    v = vectors[coarsest, :, 1]
    if v[1] < 0:
        v = -v
    beta = None
    if v[1] > 0:
        beta = float(np.clip(v[0] / v[1], -1.0, 1.0))
    else:
        warnings.warn("dominant eigenvector is orthogonal to the second axis; beta is not estimated")

    logger.debug(f"eigenvalue slopes {slope_small:.4g}, {slope_large:.4g}")
    return EstimationResult(
        theta_hat={
            "h1": (slope_small - 1.0) / 2.0,
            "h2": (slope_large - 1.0) / 2.0,
            "beta": beta,
        },
        method="eigenvalue",
        diagnostics={
            "slopes": {"small": slope_small, "large": slope_large},
            "octaves": js[mask].tolist(),
            "skipped_octaves": skipped,
            "beta_octave": int(js[coarsest]),
            "beta_extraction": BETA_EXTRACTION,
        },
        config={"weights": weights},
        receipt=append_receipt(spectrum.receipt.copy(), "estimate_eigen", "PASS"),
    )
