from pathlib import Path

import numpy as np
import pandas as pd

# Static tables are defined in a series of CSV files in this directory.
config_path = Path(__file__).resolve().parent / "config"

PARAMETER_AXES = pd.read_csv(config_path / "parameter-axes.csv", float_precision="round_trip")
EXPERIMENT_GRID = pd.read_csv(config_path / "experiment-grid.csv", float_precision="round_trip")
RUN_DEFAULTS = pd.read_csv(config_path / "run-defaults.csv", dtype=str)

# Axis order of every 7-vector (Theta, boxes, precisions)
THETA_NAMES = tuple(PARAMETER_AXES["Name"])
SIGMA_AXES = ("sigma_x1", "sigma_x2")
DEFAULT_DELTA = PARAMETER_AXES["DefaultDelta"].to_numpy(dtype=float)

# Wavelet analysis
DEFAULT_N_PSI = 2
ETA_DEPTH = 10
ETA_RESOLUTION = 1.0 / 1024
# peak value of eta_h for the N_psi = 2 least-asymmetric wavelet
SYM2_ETA_PEAK = 0.071
# PyWavelets tabulates the sym filters to a few 1e-12
FILTER_TOLERANCE = 1e-10
MIN_COEFFICIENTS = 4

# Objective guards
LOG_FLOOR = 1e-300
CROSS_DROP_RATIO = 1e-12

# Synthesis
MAX_DOUBLINGS = 8
CLIP_RATIO = 1e-9
MIN_PATH_LENGTH = 2**8

# Interval widening (relative, absolute)
WIDEN_REL = 4 * np.finfo(float).eps
WIDEN_ABS = np.finfo(float).tiny

# Columns of the data-product receipts
RECEIPT_COL = [
    "Time",
    "Code_Release",
    "Branch_Name",
    "Commit_Hash",
    "Module_Name",
    "Status",
]

# Columns of the CSV data products
PATH_COLUMNS = ["t", "y1", "y2"]
SPECTRUM_COLUMNS = ["j", "K_j", "S11", "S12", "S22"]

# Dictionary of estimators. "kind" selects the settings passed to the function:
# "solver" receives a BnbConfig and an eta table, "regression" the weights.
ESTIMATORS = {
    "m": {
        "module": "estimators.mbb",
        "function": "estimate_m",
        "label": "M-BB",
        "kind": "solver",
    },
    "uni": {
        "module": "estimators.univariate",
        "function": "estimate_univariate",
        "label": "univariate",
        "kind": "regression",
    },
    "eig": {
        "module": "estimators.eigen",
        "function": "estimate_eigen",
        "label": "eigenvalue",
        "kind": "regression",
    },
}

# Columns of the Monte Carlo products
RUN_COLUMNS = (
    ["theta", "n", "replication", "seed", "method", "status", "error"]
    + list(THETA_NAMES)
    + [f"{name}_true" for name in THETA_NAMES]
    + ["objective", "iterations", "iteration_pct", "wall_time", "candidates_count", "complete"]
)
SUMMARY_KEYS = ["theta", "n", "method", "coordinate"]
SUMMARY_COLUMNS = SUMMARY_KEYS + [
    "count",
    "failed",
    "true",
    "q25",
    "q50",
    "q75",
    "mean",
    "std",
    "bias",
    "iterations",
    "iteration_pct",
    "wall_time",
    "kl",
]
NORMALITY_COLUMNS = SUMMARY_KEYS + ["count", "kl", "status"]
