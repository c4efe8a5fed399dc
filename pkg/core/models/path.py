"""
Sample path data product
"""

import numpy as np
import pandas as pd

import core.models.base
from core.models.definitions import PATH_COLUMNS
from core.models.theta import Theta


class Path(core.models.base.OfbmDataModel):
    """
    A bivariate sample path ``(y1, y2)`` observed at ``t = 0..n-1``.
    Attributes inherited from OfbmDataModel, additional metadata below.

    Metadata:
        theta_true (dict): generating parameters (synthesized paths only)
        n (int): number of samples
        seed (int): RNG seed of the synthesis
        synthesis (dict): synthesis settings (embedding length, clipped eigenvalues)
    """

    columns = PATH_COLUMNS

    def __init__(self):
        super().__init__()
        self.kind = "path"

    @classmethod
    def from_arrays(cls, y1, y2, theta=None, seed=None, **meta):
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        if y1.ndim != 1 or y1.shape != y2.shape:
            raise TypeError("y1 and y2 must be 1-d arrays of equal length")
        path = cls()
        path.data = pd.DataFrame({"t": np.arange(y1.size), "y1": y1, "y2": y2})
        path.meta["n"] = int(y1.size)
        if theta is not None:
            path.meta["theta_true"] = theta.as_dict()
        if seed is not None:
            path.meta["seed"] = int(seed)
        path.meta.update(meta)
        return path

    def _read(self, data, meta):
        self.data = data.astype({"t": int, "y1": float, "y2": float})
        self.meta = meta
        self.meta["n"] = len(self.data)

    @property
    def n(self):
        return len(self.data)

    @property
    def y(self):
        """(n, 2) array of the two components."""
        return self.data[["y1", "y2"]].to_numpy(dtype=float)

    @property
    def y1(self):
        return self.data["y1"].to_numpy(dtype=float)

    @property
    def y2(self):
        return self.data["y2"].to_numpy(dtype=float)

    @property
    def theta_true(self):
        values = self.meta.get("theta_true")
        return None if values is None else Theta(**values)

    @property
    def seed(self):
        return self.meta.get("seed")

    def increments(self):
        """Unit-lag increments, shape (n - 1, 2)."""
        return np.diff(self.y, axis=0)
