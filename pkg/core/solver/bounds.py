"""
Certified lower bounds of C_N over parameter boxes

The criterion is decomposed into elementary operations (its calculus tree) and
intervals are propagated from the box axes up to each squared residual:

    A = σ1² η(h1) 2^{j(2h1+1)}      B = ρ σ1 σ2 η((h1+h2)/2) 2^{j(h1+h2+1)}
    C = σ2² η(h2) 2^{j(2h2+1)}

with the mixing weights expressed through monotone atoms of β and γ so that each
appears once per product. A squared residual whose interval contains 0 is
bounded below by 0, otherwise by the smaller squared end point. The criterion
floors |E| at 1e-300 before the logarithm, so an |E| interval reaching 0 still
has a finite log2 enclosure; such a term is one-sided (only |E| too small to
explain the data can be excluded) and the box is flagged as weakly bounded.

Boxes are bounded in batches: each axis becomes a column of end points and the
tree is evaluated once for all boxes and octaves.
"""

import numpy as np
import pandas as pd

from core.models.definitions import THETA_NAMES
from core.tools.interval import Interval, eta_interval
from estimators.objective import ENTRIES, Criterion, log_abs


def _as_criterion(spectrum, eta_table):
    if isinstance(spectrum, Criterion):
        return spectrum
    return Criterion.from_spectrum(spectrum, eta_table)


def _batch_axes(boxes):
    lo = np.stack([box.lo for box in boxes])
    hi = np.stack([box.hi for box in boxes])
    return [Interval(lo[:, [i]], hi[:, [i]]) for i in range(len(THETA_NAMES))]


def _entries(axes, criterion):
    h1, h2, rho, s1, s2, beta, gamma = axes
    js = Interval(criterion.js)
    table = criterion.eta_table

    hm = (h1 + h2) * 0.5
    a = s1.square() * eta_interval(h1, table) * (js * (2.0 * h1 + 1.0)).exp2()
    b = rho * s1 * s2 * eta_interval(hm, table) * (js * (h1 + h2 + 1.0)).exp2()
    c = s2.square() * eta_interval(h2, table) * (js * (2.0 * h2 + 1.0)).exp2()

    w11 = (1.0 + gamma.square()).sqrt().reciprocal()  # (1+γ²)^-1/2
    w22 = (1.0 + beta.square()).sqrt().reciprocal()  # (1+β²)^-1/2
    nb = beta.normalized()  # w12 = β(1+β²)^-1/2
    ng = gamma.normalized()  # -w21

    e11 = w11.square() * a + 2.0 * (w11 * nb) * b + nb.square() * c
    e12 = -gamma.damped() * a + (1.0 - beta * gamma) * (w11 * w22) * b + beta.damped() * c
    e22 = ng.square() * a - 2.0 * (ng * w22) * b + w22.square() * c
    return e11, e12, e22


def entry_intervals(box, criterion):
    """Enclosures of (E11, E12, E22) over the box, one interval per entry.

    Each returned interval carries one enclosure per octave.
    """
    return _entries(box.intervals(), criterion)


def _terms(axes, criterion):
    rows = []
    for k, e in enumerate(_entries(axes, criterion)):
        mag = e.abs()
        log_e = Interval._outward(log_abs(mag.lo), log_abs(mag.hi))
        res = Interval(criterion.log_s[k]) - log_e
        lower = np.where(res.straddles_zero(), 0.0, np.minimum(res.lo**2, res.hi**2))
        lower = np.where(criterion.keep[k], lower, 0.0)
        rows.append((e, res, lower, (mag.lo <= 0) & criterion.keep[k]))
    return rows


def bound_many(boxes, spectrum, eta_table=None):
    """Lower bounds of C_N over several boxes in one pass.

    Args:
        boxes (list of ParamBox): parameter boxes
        spectrum (SampleSpectrum or Criterion): empirical spectrum
        eta_table (EtaTable): defaults to the table of the spectrum's wavelet

    Returns:
        tuple: (lower bounds, weak flags), arrays of length ``len(boxes)``
    """
    if not len(boxes):
        return np.zeros(0), np.zeros(0, dtype=bool)
    criterion = _as_criterion(spectrum, eta_table)
    total = np.zeros(len(boxes))
    weak = np.zeros(len(boxes), dtype=bool)
    for _, _, lower, flags in _terms(_batch_axes(boxes), criterion):
        total += lower.sum(axis=-1)
        weak |= flags.any(axis=-1)
    return total, weak


def bound_cn(box, spectrum, eta_table=None):
    """Lower bound of C_N over a box.

    Args:
        box (ParamBox): parameter box
        spectrum (SampleSpectrum or Criterion): empirical spectrum
        eta_table (EtaTable): defaults to the table of the spectrum's wavelet

    Returns:
        tuple: (lower bound, weak) where ``weak`` is True when some |E| interval
        reaches 0 and its term is only bounded from one side
    """
    lower, weak = bound_many([box], spectrum, eta_table)
    return float(lower[0]), bool(weak[0])


def bound_terms(box, spectrum, eta_table=None):
    """Per-(entry, octave) decomposition of :func:`bound_cn` as a DataFrame.

    Columns: entry, j, E_lo, E_hi, residual_lo, residual_hi, lower, weak, kept.
    """
    criterion = _as_criterion(spectrum, eta_table)
    shape = criterion.js.shape
    frames = []
    for k, (e, res, lower, weak) in enumerate(_terms(box.intervals(), criterion)):
        frames.append(
            pd.DataFrame(
                {
                    "entry": ENTRIES[k],
                    "j": criterion.js.astype(int),
                    "E_lo": np.broadcast_to(e.lo, shape),
                    "E_hi": np.broadcast_to(e.hi, shape),
                    "residual_lo": np.broadcast_to(res.lo, shape),
                    "residual_hi": np.broadcast_to(res.hi, shape),
                    "lower": np.broadcast_to(lower, shape),
                    "weak": np.broadcast_to(weak, shape),
                    "kept": criterion.keep[k],
                }
            )
        )
    return pd.concat(frames, ignore_index=True)
