"""
Monte Carlo data products: per-run records and their summary
"""

import pandas as pd

import core.models.base
from core.models.definitions import (
    NORMALITY_COLUMNS,
    RUN_COLUMNS,
    SUMMARY_COLUMNS,
)


class RunRecords(core.models.base.OfbmDataModel):
    """
    One row per (theta, n, replication, method) of a Monte Carlo experiment.
    Attributes inherited from OfbmDataModel, additional metadata below.

    Columns hold the estimate of each parameter (empty when the method does not
    estimate it), the true values, the run status (``ok`` or ``failed``, with the
    error message) and the solver diagnostics.

    Metadata:
        settings (dict): resolved run settings
        thetas (dict): label -> true parameters
    """

    columns = RUN_COLUMNS

    def __init__(self):
        super().__init__()
        self.kind = "runs"

    @classmethod
    def from_rows(cls, rows, **meta):
        records = cls()
        records.data = pd.DataFrame(rows, columns=RUN_COLUMNS)
        records.meta.update(meta)
        return records

    def _read(self, data, meta):
        data["error"] = data["error"].fillna("")
        self.data = data
        self.meta = meta

    @property
    def failed(self):
        return int((self.data["status"] != "ok").sum())


class McSummary(core.models.base.OfbmDataModel):
    """
    Box-plot statistics per (theta, n, method, coordinate).
    Attributes inherited from OfbmDataModel, additional metadata below.

    Quartiles are raw sample quartiles; ``kl`` is the divergence to the best
    Gaussian fit, present when enough samples are available.

    Metadata:
        settings (dict): resolved run settings
        failed (int): number of failed runs
    """

    columns = SUMMARY_COLUMNS

    def __init__(self):
        super().__init__()
        self.kind = "summary"

    @classmethod
    def from_rows(cls, rows, **meta):
        summary = cls()
        summary.data = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
        summary.meta.update(meta)
        return summary

    def cell(self, theta, n, method, coordinate):
        """The summary row of one cell as a Series."""
        d = self.data
        mask = (
            (d["theta"] == theta)
            & (d["n"] == n)
            & (d["method"] == method)
            & (d["coordinate"] == coordinate)
        )
        if not mask.any():
            raise KeyError((theta, n, method, coordinate))
        return d[mask].iloc[0]


class NormalityTable(core.models.base.OfbmDataModel):
    """
    KL divergence to the best Gaussian fit per (theta, n, method, coordinate).
    Attributes inherited from OfbmDataModel.

    ``status`` is ``ok``, ``too-few`` (fewer samples than required) or
    ``degenerate`` (zero variance); ``kl`` is empty unless ``ok``.
    """

    columns = NORMALITY_COLUMNS

    def __init__(self):
        super().__init__()
        self.kind = "normality"

    @classmethod
    def from_rows(cls, rows, **meta):
        table = cls()
        table.data = pd.DataFrame(rows, columns=NORMALITY_COLUMNS)
        table.meta.update(meta)
        return table
