"""
Model and sample wavelet spectra

The wavelet spectrum of Y at octave j is the 2x2 covariance of its detail
coefficients. For a Biv-OfBm it has the closed form

    E11 = w11² A + 2 w11 w12 B + w12² C
    E12 = w11 w21 A + (w11 w22 + w12 w21) B + w12 w22 C
    E22 = w21² A + 2 w21 w22 B + w22² C

with A = σ1² η(h1) 2^{j(2h1+1)}, B = ρ σ1 σ2 η((h1+h2)/2) 2^{j(h1+h2+1)} and
C = σ2² η(h2) 2^{j(2h2+1)}.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd

import core.models.base
from core.models.definitions import DEFAULT_N_PSI, SPECTRUM_COLUMNS
from core.models.eta import wavelet_name
from core.models.theta import point_covariance


def mixing_weights(beta, gamma):
    """Entries (w11, w12, w21, w22) of the normalized mixing matrix, vectorized."""
    sg = np.sqrt(1.0 + np.square(gamma))
    sb = np.sqrt(1.0 + np.square(beta))
    return 1.0 / sg, beta / sb, -gamma / sg, 1.0 / sb


def spectrum_entries(params, js, eta_table):
    """Unchecked evaluation of (E11, E12, E22) at octaves ``js``.

    Args:
        params (array-like): the 7 values in ``THETA_NAMES`` order
        js (array-like): octaves
        eta_table (EtaTable): wavelet constant

    Returns:
        tuple of numpy.ndarray: E11, E12, E22, one value per octave
    """
    h1, h2, rho, s1, s2, beta, gamma = (float(v) for v in params)
    js = np.asarray(js, dtype=float)
    a = s1**2 * eta_table(h1) * np.exp2(js * (2 * h1 + 1))
    b = rho * s1 * s2 * eta_table(0.5 * (h1 + h2)) * np.exp2(js * (h1 + h2 + 1))
    c = s2**2 * eta_table(h2) * np.exp2(js * (2 * h2 + 1))
    w11, w12, w21, w22 = mixing_weights(beta, gamma)
    e11 = w11**2 * a + 2 * w11 * w12 * b + w12**2 * c
    e12 = w11 * w21 * a + (w11 * w22 + w12 * w21) * b + w12 * w22 * c
    e22 = w21**2 * a + 2 * w21 * w22 * b + w22**2 * c
    return e11, e12, e22


@dataclass(frozen=True)
class ModelSpectrum:
    """E(2^j, Θ) at octaves ``js``.

    Attributes:
        js (numpy.ndarray): octaves
        matrices (numpy.ndarray): shape (len(js), 2, 2), symmetric
    """

    js: np.ndarray
    matrices: np.ndarray

    @property
    def e11(self):
        return self.matrices[:, 0, 0]

    @property
    def e12(self):
        return self.matrices[:, 0, 1]

    @property
    def e22(self):
        return self.matrices[:, 1, 1]

    def to_frame(self):
        return pd.DataFrame(
            {"j": self.js.astype(int), "E11": self.e11, "E12": self.e12, "E22": self.e22}
        )


def _octaves(octaves):
    js = np.atleast_1d(np.asarray(octaves, dtype=int))
    if js.size == 0:
        raise ValueError("at least one octave is required")
    return js


def model_spectrum(theta, octaves, eta_table):
    """Closed-form model wavelet spectrum.

    Args:
        theta (Theta): model parameters; the sign convention rho_x >= 0 is not
            required so that sign-flipped images can be evaluated
        octaves (iterable of int): octaves j1..j2
        eta_table (EtaTable): η of the analysis wavelet

    Returns:
        ModelSpectrum

    Raises:
        InfeasibleParameterError: if theta violates the model constraints
    """
    theta.check(convention=False)
    js = _octaves(octaves)
    e11, e12, e22 = spectrum_entries(theta.as_array(), js, eta_table)
    matrices = np.empty((js.size, 2, 2))
    matrices[:, 0, 0] = e11
    matrices[:, 0, 1] = matrices[:, 1, 0] = e12
    matrices[:, 1, 1] = e22
    return ModelSpectrum(js=js, matrices=matrices)


class SampleSpectrum(core.models.base.OfbmDataModel):
    """
    The empirical wavelet spectrum S(2^j) = (1/K_j) Σ_k D(j,k) D(j,k)*.
    Attributes inherited from OfbmDataModel, additional metadata below.

    One row per octave with columns j, K_j, S11, S12, S22.

    Metadata:
        n (int): length of the analyzed path
        n_psi (int): vanishing moments of the analysis wavelet
        wavelet (str): PyWavelets name of the analysis wavelet
        boundary (str): ``truncate`` or ``periodization``
        j1, j2 (int): requested octave range
        sigma_max (float): sqrt(var Δy1 + var Δy2), outer bound of the σ axes
        dropped (list): octaves excluded for too few coefficients
    """

    columns = SPECTRUM_COLUMNS

    def __init__(self):
        super().__init__()
        self.kind = "spectrum"

    @classmethod
    def from_entries(cls, js, counts, s11, s12, s22, **meta):
        spectrum = cls()
        spectrum.data = pd.DataFrame(
            {
                "j": np.asarray(js, dtype=int),
                "K_j": np.asarray(counts, dtype=int),
                "S11": np.asarray(s11, dtype=float),
                "S12": np.asarray(s12, dtype=float),
                "S22": np.asarray(s22, dtype=float),
            }
        )
        spectrum.meta.update(meta)
        return spectrum

    @classmethod
    def from_model(cls, theta, octaves, eta_table, n, n_psi=DEFAULT_N_PSI):
        """The noiseless spectrum E(2^j, Θ) dressed as data.

        K_j is n / 2^j and sigma_max is computed from the point covariance
        W Σ_X W* (the variance of unit increments).
        """
        model = model_spectrum(theta, octaves, eta_table)
        cov = point_covariance(theta)
        spectrum = cls.from_entries(
            model.js,
            np.maximum(n // 2 ** model.js, 1),
            model.e11,
            model.e12,
            model.e22,
            n=int(n),
            n_psi=int(n_psi),
            wavelet=eta_table.wavelet_id,
            boundary="model",
            j1=int(model.js[0]),
            j2=int(model.js[-1]),
            sigma_max=float(np.sqrt(np.trace(cov))),
            dropped=[],
            theta_true=theta.as_dict(),
        )
        spectrum.receipt_add_entry("from_model", "PASS")
        return spectrum

    def _read(self, data, meta):
        self.data = data.astype(
            {"j": int, "K_j": int, "S11": float, "S12": float, "S22": float}
        )
        self.meta = meta
        if "wavelet" not in self.meta:
            self.meta["wavelet"] = wavelet_name(int(self.meta.get("n_psi", DEFAULT_N_PSI)))

    @property
    def js(self):
        return self.data["j"].to_numpy(dtype=int)

    @property
    def counts(self):
        return self.data["K_j"].to_numpy(dtype=int)

    @property
    def s11(self):
        return self.data["S11"].to_numpy(dtype=float)

    @property
    def s12(self):
        return self.data["S12"].to_numpy(dtype=float)

    @property
    def s22(self):
        return self.data["S22"].to_numpy(dtype=float)

    @property
    def matrices(self):
        """S(2^j) stacked as shape (J, 2, 2)."""
        out = np.empty((len(self.data), 2, 2))
        out[:, 0, 0] = self.s11
        out[:, 0, 1] = out[:, 1, 0] = self.s12
        out[:, 1, 1] = self.s22
        return out

    @property
    def sigma_max(self):
        if "sigma_max" in self.meta:
            return float(self.meta["sigma_max"])
        warnings.warn("spectrum has no sigma_max; using the finest-octave variances")
        return float(np.sqrt(self.s11[0] + self.s22[0]))

    @property
    def wavelet_id(self):
        return self.meta.get("wavelet", wavelet_name(DEFAULT_N_PSI))
