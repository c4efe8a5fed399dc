"""
Interval arithmetic for bounding the objective over parameter boxes

Endpoints are numpy arrays (or 0-d arrays), so a single interval can carry one
enclosure per octave and a calculus tree is evaluated over all octaves in one
pass. Every operation widens its result outward by a few machine epsilons so
that floating-point rounding cannot break the enclosure.
"""

import numpy as np

from core.errors import IntervalDomainError
from core.models.definitions import SYM2_ETA_PEAK, THETA_NAMES, WIDEN_ABS, WIDEN_REL


def _normalized(x):
    return x / np.sqrt(1.0 + x * x)


def _damped(x):
    return x / (1.0 + x * x)


def _widen(lo, hi):
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return lo - (WIDEN_REL * np.abs(lo) + WIDEN_ABS), hi + (WIDEN_REL * np.abs(hi) + WIDEN_ABS)


class Interval:
    """Closed interval [lo, hi], possibly vectorized.

    Args:
        lo (float or array): lower end point(s)
        hi (float or array): upper end point(s), defaults to ``lo``

    Raises:
        ValueError: if lo > hi somewhere
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = np.asarray(lo, dtype=float)
        hi = lo if hi is None else np.asarray(hi, dtype=float)
        if np.any(lo > hi):
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def _outward(cls, lo, hi):
        return cls(*_widen(lo, hi))

    @staticmethod
    def _coerce(other):
        return other if isinstance(other, Interval) else Interval(other)

    def __repr__(self):
        return f"Interval({self.lo}, {self.hi})"

    # ------------------------------------------------------------------ queries
    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return np.all((self.lo <= x) & (x <= self.hi))

    def straddles_zero(self):
        """True where the interval touches or contains 0."""
        return (self.lo <= 0) & (self.hi >= 0)

    # -------------------------------------------------------------- arithmetic
    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __add__(self, other):
        other = self._coerce(other)
        return Interval._outward(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return Interval._outward(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        products = np.stack(
            np.broadcast_arrays(
                self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi
            )
        )
        return Interval._outward(products.min(axis=0), products.max(axis=0))

    __rmul__ = __mul__

    def reciprocal(self):
        if np.any(self.straddles_zero()):
            raise IntervalDomainError(f"1/x on {self} which contains 0")
        return Interval._outward(1.0 / self.hi, 1.0 / self.lo)

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    # ------------------------------------------------------------------- atoms
    def abs(self):
        lo = np.where(self.lo >= 0, self.lo, np.where(self.hi <= 0, -self.hi, 0.0))
        hi = np.maximum(np.abs(self.lo), np.abs(self.hi))
        return Interval(lo, hi)

    def power(self, k):
        """x**k for a nonnegative integer k (case split on the sign for even k)."""
        k = int(k)
        if k < 0:
            raise ValueError("negative powers go through reciprocal()")
        if k == 0:
            return Interval(np.ones_like(self.lo), np.ones_like(self.hi))
        if k % 2:
            return Interval._outward(self.lo**k, self.hi**k)
        mag = self.abs()
        return Interval._outward(mag.lo**k, mag.hi**k)

    def square(self):
        return self.power(2)

    def sqrt(self):
        if np.any(self.lo < 0):
            raise IntervalDomainError(f"sqrt on {self} which has negative values")
        return Interval._outward(np.sqrt(self.lo), np.sqrt(self.hi))

    def exp2(self):
        return Interval._outward(np.exp2(self.lo), np.exp2(self.hi))

    def log2(self):
        if np.any(self.lo <= 0):
            raise IntervalDomainError(f"log2 on {self} which is not positive")
        return Interval._outward(np.log2(self.lo), np.log2(self.hi))

    def normalized(self):
        """x / sqrt(1 + x²), increasing on the real line."""
        return Interval._outward(_normalized(self.lo), _normalized(self.hi))

    def damped(self):
        """x / (1 + x²), increasing on [-1, 1] (the mixing coefficient range)."""
        if np.any(self.lo < -1) or np.any(self.hi > 1):
            raise IntervalDomainError(f"x/(1+x²) is only monotone on [-1, 1], got {self}")
        return Interval._outward(_damped(self.lo), _damped(self.hi))


def eta_interval(h, eta_table):
    """Enclosure of η over an interval of Hurst values.

    For a unimodal table the three-case rule applies with the table peak as
    breakpoint: increasing below it, decreasing above it, and otherwise the lower
    of the end point values up to the cap max(0.071, peak value). Tables that are
    not unimodal are bounded by an exact scan of the interpolant. Vectorized
    intervals are handled element-wise.

    Args:
        h (Interval): Hurst values, clipped to [0, 1]
        eta_table (EtaTable): tabulated η

    Returns:
        Interval: same shape as ``h``
    """
    lo = np.asarray(np.clip(h.lo, 0.0, 1.0))
    hi = np.asarray(np.clip(h.hi, 0.0, 1.0))
    if not eta_table.unimodal:
        scans = np.array([eta_table.scan(a, b) for a, b in zip(lo.ravel(), hi.ravel())])
        return Interval._outward(scans[:, 0].reshape(lo.shape), scans[:, 1].reshape(lo.shape))
    peak = eta_table.peak_h
    e_lo, e_hi = eta_table(lo), eta_table(hi)
    rising = hi <= peak
    falling = lo >= peak
    cap = max(SYM2_ETA_PEAK, eta_table.peak_value)
    low = np.where(rising, e_lo, np.where(falling, e_hi, np.minimum(e_lo, e_hi)))
    high = np.where(rising, e_hi, np.where(falling, e_lo, cap))
    return Interval._outward(low, high)


class ParamBox:
    """Axis-aligned box over the 7 parameters (``THETA_NAMES`` order).

    Attributes:
        lo (numpy.ndarray): lower corners, shape (7,)
        hi (numpy.ndarray): upper corners, shape (7,)

    A zero-width axis is a frozen coordinate.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        lo = np.array(lo, dtype=float)
        hi = np.array(hi, dtype=float)
        if lo.shape != (len(THETA_NAMES),) or hi.shape != lo.shape:
            raise ValueError(f"a box needs {len(THETA_NAMES)} lower and upper values")
        if np.any(lo > hi):
            raise ValueError(f"empty box: lo={lo}, hi={hi}")
        self.lo = lo
        self.hi = hi

    @classmethod
    def point(cls, values):
        values = np.asarray(values, dtype=float)
        return cls(values, values)

    def __repr__(self):
        axes = ", ".join(
            f"{name}=[{a:.6g}, {b:.6g}]" for name, a, b in zip(THETA_NAMES, self.lo, self.hi)
        )
        return f"ParamBox({axes})"

    def __eq__(self, other):
        return (
            isinstance(other, ParamBox)
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    @property
    def widths(self):
        return self.hi - self.lo

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    def interval(self, name):
        i = THETA_NAMES.index(name)
        return Interval(self.lo[i], self.hi[i])

    def intervals(self):
        return [Interval(a, b) for a, b in zip(self.lo, self.hi)]

    def normalized_edges(self, delta):
        return self.widths / np.asarray(delta, dtype=float)

    def normalized_volume(self, delta):
        """Product of the normalized edges of the free (nonzero width) axes."""
        edges = self.normalized_edges(delta)
        free = self.widths > 0
        return float(np.prod(edges[free])) if np.any(free) else 0.0

    def longest_axis(self, delta):
        return int(np.argmax(self.normalized_edges(delta)))

    def split(self, axis):
        """Halve the box along ``axis``."""
        middle = 0.5 * (self.lo[axis] + self.hi[axis])
        left_hi = self.hi.copy()
        left_hi[axis] = middle
        right_lo = self.lo.copy()
        right_lo[axis] = middle
        return ParamBox(self.lo, left_hi), ParamBox(right_lo, self.hi)

    def key(self):
        """Lexicographic ordering key."""
        return tuple(self.lo) + tuple(self.hi)

    def contains(self, point):
        point = np.asarray(point, dtype=float)
        return bool(np.all((self.lo <= point) & (point <= self.hi)))

    def sample(self, rng, size=1):
        """Uniform points inside the box, shape (size, 7)."""
        return rng.uniform(self.lo, self.hi, size=(size, self.lo.size))

    def as_dict(self):
        return {
            name: [float(a), float(b)] for name, a, b in zip(THETA_NAMES, self.lo, self.hi)
        }
