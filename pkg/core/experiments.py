"""
Monte Carlo harness

Each replication synthesizes a path, analyzes it and runs every requested
estimator. Replications are independent (seed ``seed_base + replication``) and
are dispatched to a process pool; records are sorted by (theta, n, seed, method)
before they are written, so outputs do not depend on the scheduling. Summaries
are computed from the records alone.
"""

import logging
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from core.errors import DegenerateSampleError
from core.models.definitions import ESTIMATORS, EXPERIMENT_GRID, THETA_NAMES
from core.models.eta import load_eta_table
from core.models.montecarlo import McSummary, NormalityTable, RunRecords
from core.models.theta import Theta
from core.solver.bnb import BnbConfig, precision_for_size
from core.tools.stats import MIN_NORMALITY_SAMPLES, normality_check
from core.tools.synthesis import SynthesisConfig, synthesize
from core.tools.wavelet import AnalysisConfig, analyze
from estimators import run_estimator

logger = logging.getLogger(__name__)


def experiment_grid(labels=None):
    """The packaged parameter settings as an ordered ``label -> Theta`` dict."""
    grid = EXPERIMENT_GRID
    if labels is not None:
        unknown = set(labels) - set(grid["Label"])
        if unknown:
            raise ValueError(f"unknown settings {sorted(unknown)}")
        grid = grid[grid["Label"].isin(labels)]
    return {
        row["Label"]: Theta(**{name: float(row[name]) for name in THETA_NAMES})
        for _, row in grid.iterrows()
    }


@dataclass
class ExperimentPlan:
    """What a Monte Carlo experiment runs.

    Attributes:
        thetas (dict): label -> Theta, in output order
        n_list (list): path lengths (powers of two)
        replications (int): paths per (theta, n)
        methods (list): estimator registry keys
        seed_base (int): seed of replication 0
        restrict (list): coordinates left free for M-BB; the others are frozen at
            their true values. None frees all seven.
        delta (float or list): B&B precision
        scale_delta (bool): scale delta as N^(-1/4) from the first n of ``n_list``
        delta_relax (int): relaxation squares per Hurst axis
        max_iters (int): B&B iteration cap
        workers (int): processes running replications
        analysis (AnalysisConfig): wavelet analysis settings
        weights (str): baseline regression weights
        embedding_factor (int): initial circulant length multiplier
    """

    thetas: dict
    n_list: list
    replications: int = 50
    methods: list = field(default_factory=lambda: list(ESTIMATORS))
    seed_base: int = 0
    restrict: list = None
    delta: object = 0.02
    scale_delta: bool = False
    delta_relax: int = 20
    max_iters: int = 200000
    workers: int = 1
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    weights: str = "ols"
    embedding_factor: int = 2

    def __post_init__(self):
        if not self.thetas:
            raise ValueError("the plan needs at least one parameter setting")
        for theta in self.thetas.values():
            theta.check()
        if int(self.replications) < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        unknown = set(self.methods) - set(ESTIMATORS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}")
        if self.restrict is not None:
            unknown = set(self.restrict) - set(THETA_NAMES)
            if unknown:
                raise ValueError(f"restrict names unknown axes {sorted(unknown)}")
        for n in self.n_list:
            # validates n
            SynthesisConfig(next(iter(self.thetas.values())), int(n))

    @classmethod
    def from_settings(cls, settings, labels=None):
        """Build a plan from resolved settings (see ``core.tools.config``)."""
        return cls(
            thetas=experiment_grid(labels),
            n_list=list(settings["n_list"]),
            replications=settings["replications"],
            methods=list(settings["methods"]),
            seed_base=settings["seed_base"],
            restrict=settings["restrict"],
            delta=settings["delta"],
            scale_delta=settings["scale_delta"],
            delta_relax=settings["delta_relax"],
            max_iters=settings["max_iters"],
            workers=settings["threads"],
            analysis=AnalysisConfig(
                n_psi=settings["n_psi"],
                j1=settings["j1"],
                j2=settings["j2"],
                boundary=settings["boundary"],
            ),
            weights=settings["weights"],
            embedding_factor=settings["embedding_factor"],
        )

    def settings(self):
        """Resolved settings, written with every output."""
        return {
            "thetas": {label: theta.as_dict() for label, theta in self.thetas.items()},
            "n_list": [int(n) for n in self.n_list],
            "replications": int(self.replications),
            "methods": list(self.methods),
            "seed_base": int(self.seed_base),
            "restrict": self.restrict,
            "delta": np.asarray(self.delta, dtype=float).tolist(),
            "scale_delta": bool(self.scale_delta),
            "delta_relax": int(self.delta_relax),
            "max_iters": int(self.max_iters),
            "workers": int(self.workers),
            "n_psi": self.analysis.n_psi,
            "j1": self.analysis.j1,
            "j2": self.analysis.j2,
            "boundary": self.analysis.boundary,
            "weights": self.weights,
            "embedding_factor": int(self.embedding_factor),
        }

    def bnb_config(self, theta, n):
        """Solver settings of one (theta, n) cell."""
        delta = self.delta
        if self.scale_delta:
            delta = precision_for_size(n, delta, self.n_list[0])
        frozen = {}
        if self.restrict is not None:
            values = theta.as_dict()
            frozen = {name: values[name] for name in THETA_NAMES if name not in self.restrict}
        return BnbConfig(
            delta=delta,
            delta_relax=self.delta_relax,
            max_iters=self.max_iters,
            frozen=frozen,
        )

    def tasks(self):
        """(label, n, replication) of every replication, in output order."""
        return [
            (label, int(n), i)
            for label in self.thetas
            for n in self.n_list
            for i in range(int(self.replications))
        ]


def _row(label, theta, n, replication, seed, method):
    row = {
        "theta": label,
        "n": n,
        "replication": replication,
        "seed": seed,
        "method": method,
        "status": "ok",
        "error": "",
    }
    row.update({f"{name}_true": value for name, value in theta.as_dict().items()})
    return row


def run_replication(plan, label, n, replication):
    """Synthesize, analyze and estimate once; failures are recorded, not raised.

    Returns:
        list of dict: one record per method
    """
    theta = plan.thetas[label]
    seed = int(plan.seed_base) + replication
    rows = [_row(label, theta, n, replication, seed, method) for method in plan.methods]
    try:
        path = synthesize(SynthesisConfig(theta, n, seed, plan.embedding_factor))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            spectrum = analyze(path, plan.analysis)
    except Exception as e:
        logger.warning(f"{label}, n={n}, seed={seed}: synthesis/analysis failed: {e}")
        for row in rows:
            row.update(status="failed", error=f"{type(e).__name__}: {e}")
        return rows

    bnb_config = plan.bnb_config(theta, n)
    for row in rows:
        method = row["method"]
        start = time.perf_counter()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                result = run_estimator(method, spectrum, bnb_config, plan.weights)
        except Exception as e:
            logger.warning(f"{label}, n={n}, seed={seed}, {method}: {e}")
            row.update(status="failed", error=f"{type(e).__name__}: {e}")
            continue
        row.update(result.theta_hat)
        diagnostics = result.diagnostics
        row.update(
            objective=result.objective_value,
            iterations=diagnostics.get("iterations"),
            iteration_pct=diagnostics.get("iteration_pct"),
            wall_time=diagnostics.get("wall_time", time.perf_counter() - start),
            candidates_count=diagnostics.get("candidates_count"),
            complete=diagnostics.get("complete"),
        )
    return rows


def run_mc(plan, out_dir=None):
    """Run a Monte Carlo experiment.

    Args:
        plan (ExperimentPlan): what to run
        out_dir (str): when given, ``runs.csv`` and ``summary.csv`` (with their JSON
            sidecars) are written there

    Returns:
        tuple: (RunRecords, McSummary)
    """
    # build the eta table once so that workers only read the cache
    load_eta_table(plan.analysis.wavelet)
    tasks = plan.tasks()
    logger.info(
        f"Monte Carlo: {len(plan.thetas)} settings x {len(plan.n_list)} sizes x "
        f"{plan.replications} replications, methods {plan.methods}"
    )
    rows = []
    if plan.workers > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            futures = [pool.submit(run_replication, plan, *task) for task in tasks]
            for future in as_completed(futures):
                rows.extend(future.result())
    else:
        for task in tasks:
            rows.extend(run_replication(plan, *task))

    order = {label: i for i, label in enumerate(plan.thetas)}
    method_order = {method: i for i, method in enumerate(plan.methods)}
    rows.sort(key=lambda r: (order[r["theta"]], r["n"], r["seed"], method_order[r["method"]]))

    settings = plan.settings()
    records = RunRecords.from_rows(rows, settings=settings)
    records.receipt_add_entry("run_mc", "PASS" if not records.failed else "FAILED-RUNS")
    if records.failed:
        warnings.warn(f"{records.failed} of {len(rows)} runs failed")
    summary = summarize(records)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        records.to_csv(os.path.join(out_dir, "runs.csv"))
        summary.to_csv(os.path.join(out_dir, "summary.csv"))
    return records, summary


def _kl(values, min_samples):
    if values.size < min_samples:
        return np.nan, "too-few"
    try:
        return normality_check(values, min_samples), "ok"
    except DegenerateSampleError:
        return np.nan, "degenerate"


def _groups(records):
    data = records.data
    for (label, n, method), cell in data.groupby(["theta", "n", "method"], sort=False):
        failed = int((cell["status"] != "ok").sum())
        ok = cell[cell["status"] == "ok"]
        for name in THETA_NAMES:
            values = ok[name].astype(float).to_numpy()
            values = values[np.isfinite(values)]
            if values.size == 0:
                continue
            yield (label, int(n), method, name), ok, values, failed


def summarize(records, min_kl_samples=MIN_NORMALITY_SAMPLES):
    """Box-plot statistics per (theta, n, method, coordinate).

    Coordinates a method does not estimate are omitted.

    Args:
        records (RunRecords): per-run records
        min_kl_samples (int): smallest sample size for the KL column

    Returns:
        McSummary
    """
    rows = []
    for (label, n, method, name), ok, values, failed in _groups(records):
        true = float(ok[f"{name}_true"].iloc[0])
        q25, q50, q75 = np.percentile(values, [25, 50, 75])
        kl, _ = _kl(values, min_kl_samples)
        rows.append(
            {
                "theta": label,
                "n": n,
                "method": method,
                "coordinate": name,
                "count": int(values.size),
                "failed": failed,
                "true": true,
                "q25": q25,
                "q50": q50,
                "q75": q75,
                "mean": float(np.mean(values)),
                "std": float(np.std(values, ddof=1)) if values.size > 1 else np.nan,
                "bias": float(np.mean(values)) - true,
                "iterations": float(pd.to_numeric(ok["iterations"]).mean()),
                "iteration_pct": float(pd.to_numeric(ok["iteration_pct"]).mean()),
                "wall_time": float(pd.to_numeric(ok["wall_time"]).mean()),
                "kl": kl,
            }
        )
    summary = McSummary.from_rows(
        rows, settings=records.meta.get("settings", {}), failed=records.failed
    )
    summary.receipt = records.receipt.copy()
    summary.receipt_add_entry("summarize", "PASS")
    return summary


def normality_table(records, min_samples=MIN_NORMALITY_SAMPLES):
    """KL divergence to the best Gaussian fit for every estimated coordinate."""
    rows = []
    for (label, n, method, name), _, values, _ in _groups(records):
        kl, status = _kl(values, min_samples)
        rows.append(
            {
                "theta": label,
                "n": n,
                "method": method,
                "coordinate": name,
                "count": int(values.size),
                "kl": kl,
                "status": status,
            }
        )
    table = NormalityTable.from_rows(rows, min_samples=int(min_samples))
    table.receipt = records.receipt.copy()
    table.receipt_add_entry("normality", "PASS")
    return table
