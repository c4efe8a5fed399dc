"""
Log-spectrum least-squares criterion

C_N(Θ) = Σ_j Σ_{i1 <= i2} (log2|S_{i1 i2}(2^j)| − log2|E_{i1 i2}(2^j, Θ)|)²

Terms whose empirical cross entry is statistically zero
(|S12| < 1e-12 sqrt(S11 S22)) are left out, and absolute values below 1e-300 are
floored before the logarithm.
"""

from dataclasses import dataclass

import numpy as np

from core.models.definitions import CROSS_DROP_RATIO, LOG_FLOOR
from core.models.eta import load_eta_table
from core.models.spectrum import spectrum_entries
from core.models.theta import Theta

ENTRIES = ("11", "12", "22")


def log_abs(x):
    return np.log2(np.maximum(np.abs(x), LOG_FLOOR))


@dataclass(frozen=True)
class Criterion:
    """Data side of C_N, prepared once per spectrum.

    Attributes:
        js (numpy.ndarray): octaves
        log_s (numpy.ndarray): log2|S| with shape (3, J), rows 11, 12, 22
        keep (numpy.ndarray): boolean mask (3, J) of the terms entering the sum
        eta_table (EtaTable): η of the analysis wavelet
    """

    js: np.ndarray
    log_s: np.ndarray
    keep: np.ndarray
    eta_table: object

    @classmethod
    def from_spectrum(cls, spectrum, eta_table=None):
        if eta_table is None:
            eta_table = load_eta_table(spectrum.wavelet_id)
        s = np.vstack([spectrum.s11, spectrum.s12, spectrum.s22])
        keep = np.ones_like(s, dtype=bool)
        keep[1] = np.abs(s[1]) >= CROSS_DROP_RATIO * np.sqrt(np.abs(s[0] * s[2]))
        return cls(spectrum.js.astype(float), log_abs(s), keep, eta_table)

    @property
    def dropped(self):
        return int(np.count_nonzero(~self.keep))

    def terms(self, params):
        """Squared residuals (3, J) at a 7-vector, zero where a term is left out."""
        e = np.vstack(spectrum_entries(params, self.js, self.eta_table))
        return np.where(self.keep, (self.log_s - log_abs(e)) ** 2, 0.0)

    def __call__(self, params):
        return float(np.sum(self.terms(params)))


def objective_cn(theta, spectrum, eta_table=None):
    """Value of C_N at theta for an empirical spectrum.

    Args:
        theta (Theta or array-like): parameters; a Theta is checked against the
            model constraints (the sign convention on rho_x is not enforced)
        spectrum (SampleSpectrum or Criterion): empirical wavelet spectrum
        eta_table (EtaTable): defaults to the table of the spectrum's wavelet

    Returns:
        float
    """
    criterion = (
        spectrum
        if isinstance(spectrum, Criterion)
        else Criterion.from_spectrum(spectrum, eta_table)
    )
    if isinstance(theta, Theta):
        params = theta.check(convention=False).as_array()
    else:
        params = np.asarray(theta, dtype=float)
    return criterion(params)


def dropped_terms(spectrum):
    """Number of cross terms left out of C_N for this spectrum."""
    s11, s12, s22 = spectrum.s11, spectrum.s12, spectrum.s22
    return int(np.count_nonzero(np.abs(s12) < CROSS_DROP_RATIO * np.sqrt(np.abs(s11 * s22))))
