"""
Standard data products of OfbmID
"""

import datetime
import json
import logging
import os
import warnings
from collections import OrderedDict

import numpy as np
import pandas as pd

from core.models.definitions import RECEIPT_COL
from core.tools.provenance import git_info

logger = logging.getLogger(__name__)


def jsonable(value):
    """Convert numpy scalars/arrays inside metadata to plain Python objects."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def append_receipt(receipt, module, status):
    """Return ``receipt`` with one more row stamped with time and git information."""
    row = {"Time": datetime.datetime.now().isoformat(), **git_info()}
    row["Module_Name"] = module
    row["Status"] = status
    entry = pd.DataFrame([row], columns=RECEIPT_COL)
    if receipt is None or receipt.empty:
        return entry
    return pd.concat([receipt, entry], ignore_index=True)


class OfbmDataModel(object):
    """The base class for all OfbmID data products.

    Warning:
        This class (OfbmDataModel) should not be used directly.
        Use the product specific data model (e.g. ``Path`` or ``SampleSpectrum``).

    A data product is a table written as CSV plus a JSON sidecar next to it
    (same name, ``.json`` suffix) holding metadata and the receipt. Product
    specific models inherit from this class, so any attribute and method listed
    here applies to all data products.

    Attributes:
        kind (str): product name written to the sidecar, set in each derived class
        data (pandas.DataFrame): the table, with the columns of ``columns``
        meta (OrderedDict): product metadata (true parameters, analysis settings...)
        receipt (pandas.DataFrame): a table that records the history of this data

            Anything that modifies the content of a data product is expected to also
            write to the receipt, with the module name and a status. The receipt
            fills in the time of execution, code release, commit and branch.

            It is not recommended to modify the receipt DataFrame directly. Use the
            provided methods instead:
                >>> from core.models.path import Path
                >>> data = Path()
                >>> data.receipt_add_entry('synthesize', 'PASS')
    """

    columns = []

    def __init__(self):
        self.filename: str = None
        self.kind = None  # set in each derived class
        self.data = pd.DataFrame(columns=self.columns)
        self.meta = OrderedDict()
        self.receipt = pd.DataFrame([], columns=RECEIPT_COL)

    # =============================================================================
    # I/O related methods
    @staticmethod
    def sidecar_name(fn):
        return os.path.splitext(fn)[0] + ".json"

    @classmethod
    def from_csv(cls, fn):
        """Create a data instance from a file

        Args:
            fn (str): path of the CSV table; the sidecar is read when present

        Returns:
            cls (data model class): the data instance containing the file content
        """
        this_data = cls()
        if not os.path.isfile(fn):
            raise IOError(f"{fn} does not exist.")
        this_data.read(fn)
        return this_data

    def read(self, fn):
        """Read a CSV data product and its sidecar and populate this instance.

        Args:
            fn (str): file path

        Raises:
            IOError: when the file is not a CSV table or misses columns
        """
        fn = str(fn)
        if not fn.endswith(".csv"):
            raise IOError("input files must be CSV files")

        self.filename = os.path.basename(fn)
        data = pd.read_csv(fn, comment="#", float_precision="round_trip")
        missing = [c for c in self.columns if c not in data.columns]
        if missing:
            raise IOError(f"{fn} lacks columns {missing}")

        meta = OrderedDict()
        sidecar = self.sidecar_name(fn)
        if os.path.isfile(sidecar):
            with open(sidecar) as f:
                doc = json.load(f)
            meta.update(doc.get("meta", {}))
            self.receipt = pd.DataFrame(doc.get("receipt", []), columns=RECEIPT_COL)
        else:
            warnings.warn(f"No sidecar for {fn}; metadata will be incomplete")

        # Leave the interpretation of the table to product specific readers
        self._read(data[self.columns].copy(), meta)
        self.receipt_add_entry("from_csv", "PASS")

    def _read(self, data, meta):
        self.data = data
        self.meta = meta

    def to_csv(self, fn):
        """Write the table as CSV and the metadata/receipt as a JSON sidecar.

        Args:
            fn (str): file path, must end with .csv
        """
        fn = str(fn)
        if not fn.endswith(".csv"):
            raise NameError("filename must end with .csv")
        if os.path.dirname(fn) and not os.path.isdir(os.path.dirname(fn)):
            os.makedirs(os.path.dirname(fn), exist_ok=True)

        self.data.to_csv(fn, index=False, float_format="%.17g")
        doc = {
            "kind": self.kind,
            "meta": jsonable(dict(self.meta)),
            "receipt": self.receipt.to_dict(orient="records"),
        }
        with open(self.sidecar_name(fn), "w") as f:
            json.dump(doc, f, indent=2)
        self.filename = os.path.basename(fn)
        logger.debug(f"wrote {self.kind} to {fn}")

    # =============================================================================
    # Receipt related members
    def receipt_add_entry(self, module, status):
        """
        Add an entry to the receipt

        Args:
            module (str): Name of the module making this entry
            status (str): status to be recorded
        """
        self.receipt = append_receipt(self.receipt, module, status)

    def receipt_info(self):
        """
        Print the short version of the receipt
        """
        print(self.receipt[["Time", "Module_Name", "Status"]])

    def info(self):
        """
        Pretty print information about this data to stdout
        """
        if self.filename is not None:
            print("File name: {}".format(self.filename))
        else:
            print("Empty {:s} Data product".format(self.__class__.__name__))
        head = "|{:20s} |{:40s} \n{:40}".format("Key", "Value", "=" * 62 + "\n")
        for key, value in self.meta.items():
            head += "|{:20s} |{:40s}\n".format(key, str(value)[:40])
        head += "|{:20s} |{:40s}\n".format("rows", str(len(self.data)))
        print(head)
