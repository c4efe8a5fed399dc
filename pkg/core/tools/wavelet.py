"""
Discrete wavelet transform and empirical wavelet spectrum

Two boundary policies are available:

- ``truncate`` (default): a pyramid of "valid" convolutions, so that every
  coefficient is computed from observed samples only. K_j is the number of
  coefficients that survive, slightly below n / 2^j.
- ``periodization``: ``pywt.wavedec`` with periodic extension, an orthonormal
  transform of the whole segment (K_j = n / 2^j exactly).
"""

import functools
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import pywt

from core.errors import InsufficientOctavesError, ParameterDomainError, ShortPathError
from core.models.definitions import DEFAULT_N_PSI, FILTER_TOLERANCE, MIN_COEFFICIENTS
from core.models.eta import wavelet_name
from core.models.path import Path
from core.models.spectrum import SampleSpectrum

logger = logging.getLogger(__name__)

BOUNDARIES = ("truncate", "periodization")


@dataclass(frozen=True)
class AnalysisConfig:
    """Settings of the wavelet analysis.

    Attributes:
        n_psi (int): vanishing moments of the least-asymmetric Daubechies wavelet
        j1 (int): finest octave kept in the spectrum
        j2 (int): coarsest octave; None means log2(n) - n_psi - 1
        boundary (str): ``truncate`` or ``periodization``
    """

    n_psi: int = DEFAULT_N_PSI
    j1: int = 1
    j2: int = None
    boundary: str = "truncate"

    def __post_init__(self):
        if self.j1 < 1:
            raise ParameterDomainError(f"j1 must be >= 1, got {self.j1}")
        if self.j2 is not None and self.j2 < self.j1:
            raise ParameterDomainError(f"j1 <= j2 is required, got {self.j1} > {self.j2}")
        if self.boundary not in BOUNDARIES:
            raise ParameterDomainError(f"boundary must be one of {BOUNDARIES}")

    @property
    def wavelet(self):
        return wavelet_name(self.n_psi)

    def coarsest(self, n):
        """Coarsest octave for a path of n samples."""
        j2 = self.j2
        if j2 is None:
            j2 = int(np.floor(np.log2(n))) - self.n_psi - 1
        if j2 < self.j1:
            raise ShortPathError(f"{n} samples leave no octave in [{self.j1}, {j2}]")
        if n < 2 ** (j2 + 1):
            raise ShortPathError(f"octave {j2} needs at least {2 ** (j2 + 1)} samples, got {n}")
        return j2


@dataclass
class WaveletCoefficients:
    """Detail coefficients per octave.

    Attributes:
        details (dict): octave j -> array of shape (K_j, components)
        approximation (numpy.ndarray): approximation at the coarsest octave
        n (int): length of the analyzed series
        wavelet (str): PyWavelets name
        boundary (str): boundary policy
    """

    details: dict
    approximation: np.ndarray
    n: int
    wavelet: str
    boundary: str
    octaves: list = field(default_factory=list)

    def energy(self):
        """Total squared norm of all coefficients."""
        total = float(np.sum(self.approximation**2))
        for d in self.details.values():
            total += float(np.sum(d**2))
        return total


@functools.lru_cache(maxsize=None)
def check_filters(wavelet_id):
    """Verify that the decomposition filters form an orthonormal pair.

    Raises:
        ParameterDomainError: if a shift-orthonormality relation is off by more
            than FILTER_TOLERANCE
    """
    w = pywt.Wavelet(wavelet_id)
    lo = np.asarray(w.dec_lo)
    hi = np.asarray(w.dec_hi)
    for m in range(0, lo.size // 2 + 1):
        shift = 2 * m
        target = 1.0 if m == 0 else 0.0
        for a, b, want in ((lo, lo, target), (hi, hi, target), (lo, hi, 0.0)):
            value = np.dot(a[: a.size - shift], b[shift:])
            if abs(value - want) > FILTER_TOLERANCE:
                raise ParameterDomainError(
                    f"filters of {wavelet_id} are not orthonormal (shift {shift}: {value})"
                )
    if abs(lo.sum() - np.sqrt(2)) > FILTER_TOLERANCE or abs(hi.sum()) > FILTER_TOLERANCE:
        raise ParameterDomainError(f"filters of {wavelet_id} have wrong moments")
    return True


def _as_matrix(series):
    y = series.y if isinstance(series, Path) else np.asarray(series, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    return y


def _valid_pyramid(y, wavelet, j2):
    lo = np.asarray(wavelet.dec_lo)
    hi = np.asarray(wavelet.dec_hi)
    approx = y
    details = {}
    for j in range(1, j2 + 1):
        if approx.shape[0] < lo.size:
            details[j] = np.empty((0, y.shape[1]))
            approx = np.empty((0, y.shape[1]))
            continue
        a = np.column_stack(
            [np.convolve(approx[:, c], lo, mode="valid")[::2] for c in range(y.shape[1])]
        )
        d = np.column_stack(
            [np.convolve(approx[:, c], hi, mode="valid")[::2] for c in range(y.shape[1])]
        )
        details[j] = d
        approx = a
    return details, approx


def dwt(series, config=AnalysisConfig()):
    """Multivariate discrete wavelet transform.

    Args:
        series (Path or numpy.ndarray): path, or array of shape (n,) or (n, components)
        config (AnalysisConfig): wavelet, octave range and boundary policy

    Returns:
        WaveletCoefficients: detail coefficients for octaves 1..j2

    Raises:
        ShortPathError: if the series is too short for j2
    """
    y = _as_matrix(series)
    n = y.shape[0]
    j2 = config.coarsest(n)
    wavelet_id = config.wavelet
    check_filters(wavelet_id)
    wavelet = pywt.Wavelet(wavelet_id)

    if config.boundary == "periodization":
        coeffs = pywt.wavedec(y, wavelet, mode="periodization", level=j2, axis=0)
        approx = coeffs[0]
        details = {j2 - i: d for i, d in enumerate(coeffs[1:])}
    else:
        details, approx = _valid_pyramid(y, wavelet, j2)
    logger.debug(
        f"dwt of {n} samples with {wavelet_id} ({config.boundary}): "
        + ", ".join(f"K_{j}={d.shape[0]}" for j, d in sorted(details.items()))
    )
    return WaveletCoefficients(
        details=details,
        approximation=approx,
        n=n,
        wavelet=wavelet_id,
        boundary=config.boundary,
        octaves=list(range(config.j1, j2 + 1)),
    )


def sample_spectrum(coeffs, config=AnalysisConfig()):
    """Empirical wavelet spectrum S(2^j) = (1/K_j) Σ_k D(j,k) D(j,k)*.

    Octaves with fewer than MIN_COEFFICIENTS coefficients are excluded with a warning.

    Returns:
        SampleSpectrum

    Raises:
        InsufficientOctavesError: if every octave was excluded
    """
    js, counts, s11, s12, s22, dropped = [], [], [], [], [], []
    octaves = coeffs.octaves or sorted(coeffs.details)
    for j in octaves:
        d = coeffs.details[j]
        if d.shape[1] != 2:
            raise TypeError("a bivariate series is required for the wavelet spectrum")
        k = d.shape[0]
        if k < MIN_COEFFICIENTS:
            dropped.append(int(j))
            continue
        s = d.T @ d / k
        js.append(j)
        counts.append(k)
        s11.append(s[0, 0])
        s12.append(s[0, 1])
        s22.append(s[1, 1])
    if dropped:
        warnings.warn(f"octaves {dropped} dropped (fewer than {MIN_COEFFICIENTS} coefficients)")
    if not js:
        raise InsufficientOctavesError("no octave has enough coefficients")
    return SampleSpectrum.from_entries(
        js,
        counts,
        s11,
        s12,
        s22,
        n=int(coeffs.n),
        n_psi=int(config.n_psi),
        wavelet=coeffs.wavelet,
        boundary=coeffs.boundary,
        j1=int(octaves[0]),
        j2=int(octaves[-1]),
        dropped=dropped,
    )


def sigma_max(series):
    """sqrt(var Δy1 + var Δy2) from unit-lag increments."""
    dy = np.diff(_as_matrix(series), axis=0)
    return float(np.sqrt(np.sum(np.var(dy, axis=0, ddof=1))))


def analyze(path, config=AnalysisConfig()):
    """DWT, empirical spectrum and σ_max of a path in one call.

    Args:
        path (Path): bivariate sample path
        config (AnalysisConfig): analysis settings

    Returns:
        SampleSpectrum: with ``sigma_max`` and, for synthesized paths,
        ``theta_true`` and ``seed`` in its metadata
    """
    spectrum = sample_spectrum(dwt(path, config), config)
    spectrum.meta["sigma_max"] = sigma_max(path)
    if isinstance(path, Path):
        for key in ("theta_true", "seed"):
            if key in path.meta:
                spectrum.meta[key] = path.meta[key]
        if not path.receipt.empty:
            spectrum.receipt = path.receipt.copy()
    spectrum.receipt_add_entry("analyze", "PASS")
    return spectrum
