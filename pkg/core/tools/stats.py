"""
Statistical helpers: log-scale regressions and the normality check
"""

import numpy as np
from astropy.stats import histogram
from scipy.stats import norm

from core.errors import DegenerateSampleError, InsufficientOctavesError

MIN_NORMALITY_SAMPLES = 100
WEIGHTS = ("ols", "kj")


def fit_slope(js, values, counts=None, weights="ols"):
    """Slope of log2(values) regressed on the octaves.

    Args:
        js (array): octaves
        values (array): positive spectrum values
        counts (array): K_j, needed for ``weights="kj"``
        weights (str): ``ols`` (unweighted) or ``kj`` (weights K_j, the inverse of
            the 1/K_j variance of log-spectrum estimates)

    Returns:
        float: slope

    Raises:
        InsufficientOctavesError: with fewer than two octaves
    """
    js = np.asarray(js, dtype=float)
    if js.size < 2:
        raise InsufficientOctavesError(f"a regression needs 2 octaves, got {js.size}")
    if weights not in WEIGHTS:
        raise ValueError(f"weights must be one of {WEIGHTS}, got {weights}")
    w = None
    if weights == "kj":
        # polyfit weights multiply the residuals
        w = np.sqrt(np.asarray(counts, dtype=float))
    slope, _ = np.polyfit(js, np.log2(np.asarray(values, dtype=float)), 1, w=w)
    return float(slope)


def normality_check(samples, min_samples=MIN_NORMALITY_SAMPLES):
    """Discrete Kullback-Leibler divergence from the best Gaussian fit.

    The samples are binned with the Freedman-Diaconis rule; the Gaussian with the
    sample mean and variance is integrated over the same bins and renormalized.

    Args:
        samples (array): one estimated coordinate over replications
        min_samples (int): smallest accepted sample size

    Returns:
        float: KL(empirical || Gaussian)

    Raises:
        ValueError: with fewer than ``min_samples`` finite samples
        DegenerateSampleError: for zero-variance samples
    """
    x = np.asarray(samples, dtype=float)
    x = x[np.isfinite(x)]
    if x.size < min_samples:
        raise ValueError(f"at least {min_samples} samples are required, got {x.size}")
    sd = float(np.std(x, ddof=1))
    if sd == 0.0 or np.ptp(x) == 0.0:
        raise DegenerateSampleError("samples have zero variance")
    q25, q75 = np.percentile(x, [25, 75])
    # Freedman-Diaconis needs a positive interquartile range (estimates on a lattice)
    counts, edges = histogram(x, bins="freedman" if q75 > q25 else "scott")
    p = counts / counts.sum()
    q = np.diff(norm.cdf(edges, loc=float(np.mean(x)), scale=sd))
    q = np.maximum(q / q.sum(), np.finfo(float).tiny)
    support = p > 0
    return float(np.sum(p[support] * np.log(p[support] / q[support])))


def split_octaves(js):
    """Boolean masks of the fine octaves j <= ⌊(j1 + j2)/2⌋ and of the coarse ones."""
    js = np.asarray(js, dtype=int)
    middle = (int(js.min()) + int(js.max())) // 2
    return js <= middle, js > middle
