"""
Estimation results
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from core.models.base import jsonable
from core.models.definitions import RECEIPT_COL, THETA_NAMES
from core.models.theta import Theta


@dataclass
class EstimationResult:
    """Output of an estimator.

    Attributes:
        theta_hat (dict): estimate per parameter name; None for the parameters a
            baseline does not estimate
        objective_value (float): C_N at the estimate (None for baselines)
        method (str): ``M-BB``, ``univariate`` or ``eigenvalue``
        diagnostics (dict): iterations, wall_time, candidates_count, ...
        config (dict): resolved settings that produced the result
        candidates (list): surviving candidate regions (M-BB only, not serialized)
        trace (pandas.DataFrame): optional region trace (M-BB only)
        receipt (pandas.DataFrame): history inherited from the spectrum
    """

    theta_hat: dict
    objective_value: float = None
    method: str = ""
    diagnostics: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    candidates: list = field(default_factory=list, repr=False)
    trace: pd.DataFrame = field(default=None, repr=False)
    receipt: pd.DataFrame = field(
        default_factory=lambda: pd.DataFrame([], columns=RECEIPT_COL), repr=False
    )

    def __post_init__(self):
        self.theta_hat = {
            name: (None if self.theta_hat.get(name) is None else float(self.theta_hat[name]))
            for name in THETA_NAMES
        }

    @property
    def estimated(self):
        """Names of the parameters this method estimated."""
        return [name for name in THETA_NAMES if self.theta_hat[name] is not None]

    @property
    def theta(self):
        """The estimate as a Theta, or None when some parameter is not estimated."""
        if len(self.estimated) != len(THETA_NAMES):
            return None
        return Theta(**self.theta_hat)

    def as_array(self):
        return np.array(
            [np.nan if self.theta_hat[n] is None else self.theta_hat[n] for n in THETA_NAMES]
        )

    def to_dict(self):
        return {
            "method": self.method,
            "theta_hat": self.theta_hat,
            "objective": self.objective_value,
            "iterations": self.diagnostics.get("iterations"),
            "wall_time": self.diagnostics.get("wall_time"),
            "candidates_count": self.diagnostics.get("candidates_count"),
            "diagnostics": jsonable(self.diagnostics),
            "config": jsonable(self.config),
            "receipt": self.receipt.to_dict(orient="records"),
        }

    def to_json(self, fn=None):
        """Serialize to a JSON string, also written to ``fn`` when given."""
        text = json.dumps(self.to_dict(), indent=2)
        if fn is not None:
            if os.path.dirname(fn):
                os.makedirs(os.path.dirname(fn), exist_ok=True)
            with open(fn, "w") as f:
                f.write(text)
        return text

    @classmethod
    def from_json(cls, fn):
        if not os.path.isfile(fn):
            raise IOError(f"{fn} does not exist.")
        with open(fn) as f:
            doc = json.load(f)
        return cls(
            theta_hat=doc["theta_hat"],
            objective_value=doc.get("objective"),
            method=doc.get("method", ""),
            diagnostics=doc.get("diagnostics", {}),
            config=doc.get("config", {}),
            receipt=pd.DataFrame(doc.get("receipt", []), columns=RECEIPT_COL),
        )
