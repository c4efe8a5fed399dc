"""
Inner relaxation of the feasible parameter set

The (h1, h2) unit square is cut into Δ x Δ squares. Squares lying entirely in
h1 > h2 are discarded. On each kept square T_i the correlation axis is limited to
[0, ρ_i] with ρ_i the smallest maximal feasible correlation over T_i, so that
g(h1, h2, ρ) > 0 everywhere in the cell T_i x [0, ρ_i] x [0, σ_max]² x [-1, 1]².
"""

import functools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from core.models.definitions import THETA_NAMES
from core.models.theta import max_feasible_rho
from core.tools.interval import ParamBox

logger = logging.getLogger(__name__)

GRID_POINTS = 101
RHO_MARGIN = 1e-9


def min_feasible_rho(h1_range, h2_range, points=GRID_POINTS):
    """Minimum of max_feasible_rho over a closed (h1, h2) rectangle.

    A dense grid (end points included) locates the minimum, which is then refined
    with L-BFGS-B from the best grid node.
    """
    g1 = np.linspace(h1_range[0], h1_range[1], points)
    g2 = np.linspace(h2_range[0], h2_range[1], points)
    values = max_feasible_rho(g1[:, None], g2[None, :])
    i, k = np.unravel_index(np.argmin(values), values.shape)
    best = float(values[i, k])
    if best <= 0.0:
        return 0.0
    refined = minimize(
        lambda x: float(max_feasible_rho(x[0], x[1])),
        x0=np.array([g1[i], g2[k]]),
        method="L-BFGS-B",
        bounds=[tuple(h1_range), tuple(h2_range)],
    )
    if np.isfinite(refined.fun):
        best = min(best, float(refined.fun))
    return best


@functools.lru_cache(maxsize=8)
def square_rhos(delta_relax):
    """ρ_i of every kept square (i <= k) of a Δ x Δ partition, margin included."""
    out = {}
    for i in range(delta_relax):
        for k in range(i, delta_relax):
            h1_range = (i / delta_relax, (i + 1) / delta_relax)
            h2_range = (k / delta_relax, (k + 1) / delta_relax)
            out[(i, k)] = max(0.0, min_feasible_rho(h1_range, h2_range) - RHO_MARGIN)
    return out


@dataclass
class Relaxation:
    """Union of boxes contained in the feasible set.

    Attributes:
        cells (list of ParamBox): one box per kept square
        squares (list of tuple): (i, k) indices of the squares, h1 in
            [i/Δ, (i+1)/Δ] and h2 in [k/Δ, (k+1)/Δ]
        rho (numpy.ndarray): ρ_i per cell
        delta_relax (int): Δ
        sigma_max (float): upper bound of the σ axes
        frozen (dict): axis name -> fixed value
    """

    cells: list
    squares: list
    rho: np.ndarray
    delta_relax: int
    sigma_max: float
    frozen: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.cells)

    def contains(self, point):
        """True if some cell contains the 7-vector ``point``."""
        return any(cell.contains(point) for cell in self.cells)


def _square_holds(value, index, delta_relax):
    """Half-open membership so that a frozen value selects a single square."""
    lo, hi = index / delta_relax, (index + 1) / delta_relax
    if index == delta_relax - 1:
        return lo <= value <= hi
    return lo <= value < hi


def build_relaxation(delta_relax, sigma_max, frozen=None):
    """Build the inner relaxation S_0.

    Args:
        delta_relax (int): Δ, number of squares per Hurst axis (>= 2)
        sigma_max (float): upper bound of the latent standard deviations
        frozen (dict): optional axis name -> value; frozen axes collapse to
            points and cells incompatible with the frozen values are dropped

    Returns:
        Relaxation
    """
    delta_relax = int(delta_relax)
    if delta_relax < 2:
        raise ValueError(f"delta_relax must be >= 2, got {delta_relax}")
    frozen = dict(frozen or {})
    unknown = set(frozen) - set(THETA_NAMES)
    if unknown:
        raise ValueError(f"unknown axes {sorted(unknown)}")
    idx = {name: i for i, name in enumerate(THETA_NAMES)}

    table = square_rhos(delta_relax)
    cells, squares, rhos = [], [], []
    for i in range(delta_relax):
        if "h1" in frozen and not _square_holds(frozen["h1"], i, delta_relax):
            continue
        for k in range(i, delta_relax):
            if "h2" in frozen and not _square_holds(frozen["h2"], k, delta_relax):
                continue
            h1_range = (i / delta_relax, (i + 1) / delta_relax)
            h2_range = (k / delta_relax, (k + 1) / delta_relax)
            rho_i = table[(i, k)]
            if "rho_x" in frozen and frozen["rho_x"] > rho_i:
                continue
            lo = np.array([h1_range[0], h2_range[0], 0.0, 0.0, 0.0, -1.0, -1.0])
            hi = np.array([h1_range[1], h2_range[1], rho_i, sigma_max, sigma_max, 1.0, 1.0])
            for name, value in frozen.items():
                lo[idx[name]] = hi[idx[name]] = value
            cells.append(ParamBox(lo, hi))
            squares.append((i, k))
            rhos.append(rho_i)
    logger.debug(
        f"relaxation with Δ={delta_relax}: {len(cells)} cells "
        f"(frozen: {sorted(frozen) or 'none'})"
    )
    return Relaxation(
        cells=cells,
        squares=squares,
        rho=np.array(rhos),
        delta_relax=delta_relax,
        sigma_max=float(sigma_max),
        frozen=frozen,
    )
