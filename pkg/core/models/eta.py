"""
Tabulated wavelet constant eta_h

eta_h = -1/2 ∫ |u|^{2h} Ψ(u) du with Ψ(u) = ∫ ψ0(v) ψ0(v - u) dv has no closed
form. The mother wavelet is approximated with the cascade algorithm, its
autocorrelation is formed by discrete correlation and the integral is evaluated
with the trapezoid rule on a grid of h values. Lookups interpolate linearly.
"""

import functools
import logging
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
import pywt
from scipy.integrate import trapezoid

from core.errors import ParameterDomainError
from core.models.definitions import DEFAULT_N_PSI, ETA_DEPTH, ETA_RESOLUTION

logger = logging.getLogger(__name__)


def wavelet_name(n_psi=DEFAULT_N_PSI):
    """PyWavelets name of the least-asymmetric Daubechies wavelet with n_psi vanishing moments."""
    if n_psi < 1:
        raise ParameterDomainError(f"n_psi must be >= 1, got {n_psi}")
    return "db1" if n_psi == 1 else f"sym{n_psi}"


DEFAULT_WAVELET = wavelet_name(DEFAULT_N_PSI)


def cache_dir():
    """Directory of the CSV eta caches ($OFBM_CACHE_DIR or ~/.cache/ofbmid)."""
    return Path(os.environ.get("OFBM_CACHE_DIR", Path.home() / ".cache" / "ofbmid"))


@dataclass(frozen=True, eq=False)
class EtaTable:
    """Sampled h -> eta_h for one analysis wavelet.

    Attributes:
        wavelet_id (str): PyWavelets name of psi0 (e.g. ``sym2``)
        h (numpy.ndarray): uniform grid on [0, 1]
        values (numpy.ndarray): eta_h on the grid (0 at the end points, > 0 inside)
        resolution (float): grid step
        depth (int): cascade depth used to sample psi0
    """

    wavelet_id: str
    h: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    resolution: float = ETA_RESOLUTION
    depth: int = ETA_DEPTH

    def __call__(self, h):
        h = np.asarray(h, dtype=float)
        if np.any(h < 0) or np.any(h > 1):
            raise ParameterDomainError(f"eta is tabulated on [0, 1], got h={h}")
        out = np.interp(h, self.h, self.values)
        return float(out) if out.ndim == 0 else out

    @property
    def peak_index(self):
        return int(np.argmax(self.values))

    @property
    def peak_h(self):
        return float(self.h[self.peak_index])

    @property
    def peak_value(self):
        return float(self.values[self.peak_index])

    @functools.cached_property
    def unimodal(self):
        """True when eta increases up to the peak node and decreases after it."""
        steps = np.diff(self.values)
        k = self.peak_index
        return bool(np.all(steps[:k] >= 0) and np.all(steps[k:] <= 0))

    def scan(self, lo, hi):
        """Exact range of the interpolated eta over [lo, hi].

        The interpolant is piecewise linear, so its extremes on an interval are
        attained at the end points or at grid nodes inside.
        """
        ends = np.array([self(lo), self(hi)])
        inside = self.values[(self.h > lo) & (self.h < hi)]
        both = np.concatenate([ends, inside])
        return float(both.min()), float(both.max())

    def to_frame(self):
        return pd.DataFrame({"h": self.h, "eta": self.values})


def compute_eta_table(wavelet_id=DEFAULT_WAVELET, depth=ETA_DEPTH, resolution=ETA_RESOLUTION):
    """Tabulate eta_h by cascade, autocorrelation and trapezoid quadrature.

    Args:
        wavelet_id (str): PyWavelets name of an orthogonal wavelet
        depth (int): cascade iterations; psi0 is sampled with step 2**-depth
        resolution (float): step of the h grid

    Returns:
        EtaTable
    """
    wavelet = pywt.Wavelet(wavelet_id)
    if not wavelet.orthogonal:
        raise ParameterDomainError(f"{wavelet_id} is not an orthogonal wavelet")
    _, psi, x = wavelet.wavefun(level=depth)
    dx = x[1] - x[0]
    psi = psi / np.sqrt(np.sum(psi**2) * dx)

    autocorr = np.correlate(psi, psi, mode="full") * dx
    absu = np.abs((np.arange(autocorr.size) - (psi.size - 1)) * dx)

    h = np.linspace(0.0, 1.0, int(round(1.0 / resolution)) + 1)
    values = np.array(
        [-0.5 * trapezoid(absu ** (2 * hk) * autocorr, dx=dx) for hk in h]
    )
    # vanishing moments make eta_0 = eta_1 = 0; quadrature leaves round-off there
    values = np.clip(values, 0.0, None)
    logger.debug(
        f"eta table {wavelet_id}: depth {depth}, {h.size} nodes, "
        f"peak {values.max():.5f} at h={h[np.argmax(values)]:.4f}"
    )
    return EtaTable(wavelet_id, h, values, resolution=resolution, depth=depth)


@functools.lru_cache(maxsize=None)
def _load(wavelet_id, depth, resolution, directory):
    fn = Path(directory) / f"eta-{wavelet_id}-d{depth}-r{int(round(1 / resolution))}.csv"
    if fn.is_file():
        df = pd.read_csv(fn, float_precision="round_trip")
        table = EtaTable(
            wavelet_id,
            df["h"].to_numpy(dtype=float),
            df["eta"].to_numpy(dtype=float),
            resolution=resolution,
            depth=depth,
        )
    else:
        logger.info(f"building eta table for {wavelet_id} (cache miss: {fn})")
        table = compute_eta_table(wavelet_id, depth, resolution)
        try:
            fn.parent.mkdir(parents=True, exist_ok=True)
            table.to_frame().to_csv(fn, index=False, float_format="%.17g")
        except OSError as e:
            warnings.warn(f"Cannot write eta cache {fn}: {e}")
    if not table.unimodal:
        warnings.warn(
            f"eta table for {wavelet_id} is not unimodal; interval bounds use grid scans"
        )
    return table


def load_eta_table(wavelet_id=DEFAULT_WAVELET, depth=ETA_DEPTH, resolution=ETA_RESOLUTION, directory=None):
    """Return the (cached) eta table of a wavelet.

    The table is read from ``eta-<wavelet>-d<depth>-r<1/resolution>.csv`` in the
    cache directory and regenerated when absent. Tables are shared read-only
    within the process.
    """
    directory = cache_dir() if directory is None else directory
    return _load(wavelet_id, int(depth), float(resolution), str(directory))


def eta(h, wavelet_id=DEFAULT_WAVELET):
    """eta_h for the given wavelet, interpolated from its table."""
    return load_eta_table(wavelet_id)(h)
