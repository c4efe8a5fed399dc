"""
Branch & Bound minimization of C_N over the inner relaxation

Best-first search: the region with the lowest certified lower bound is cut in
half along its longest edge (edges are measured in units of the per-axis
precision δ). Each child is bounded below by interval arithmetic and above by
the criterion at the center of the leaf that holds its own center (leaves are the
regions the search would reach at full precision, so the incumbent U is always
the value of some leaf). Children are pruned
when their lower bound exceeds U, when they lie in h1 > h2, or when every edge
has reached the precision (size pruning). Size-pruned regions form the candidate
list, which is pruned by bound once more at the end; the estimate is the center
of the candidate with the lowest upper bound.
"""

import heapq
import itertools
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from core.errors import InfeasibleParameterError
from core.models.definitions import DEFAULT_DELTA, PARAMETER_AXES, THETA_NAMES
from core.models.result import EstimationResult
from core.solver.bounds import bound_many
from core.solver.relaxation import build_relaxation
from core.tools.interval import ParamBox
from estimators.objective import Criterion

logger = logging.getLogger(__name__)

PROGRESS_EVERY = 10000

ACTIVE = "active"
PRUNED_BOUND = "pruned-bound"
PRUNED_SIZE = "pruned-size"
CANDIDATE = "candidate"
INFEASIBLE = "infeasible"


@dataclass
class BnbConfig:
    """Settings of the Branch & Bound solver.

    Attributes:
        delta (float or sequence): precision per axis (scalar or 7 values)
        delta_relax (int): Δ, relaxation squares per Hurst axis
        max_iters (int): iteration cap; the result is flagged incomplete when hit
        frozen (dict): axis name -> value of coordinates kept fixed
        threads (int): regions processed per round (thread pool when > 1)
        trace (bool): record every settled region
        sigma_max (float): overrides the σ axes bound carried by the spectrum
    """

    delta: object = field(default_factory=lambda: DEFAULT_DELTA.copy())
    delta_relax: int = 50
    max_iters: int = 200000
    frozen: dict = field(default_factory=dict)
    threads: int = 1
    trace: bool = False
    sigma_max: float = None

    def __post_init__(self):
        delta = np.broadcast_to(np.asarray(self.delta, dtype=float), (len(THETA_NAMES),))
        if np.any(delta <= 0):
            raise ValueError(f"precisions must be positive, got {delta}")
        self.delta = delta.copy()
        if int(self.delta_relax) < 2:
            raise ValueError(f"delta_relax must be >= 2, got {self.delta_relax}")
        if int(self.max_iters) < 1 or int(self.threads) < 1:
            raise ValueError("max_iters and threads must be positive")
        unknown = set(self.frozen) - set(THETA_NAMES)
        if unknown:
            raise ValueError(f"unknown axes {sorted(unknown)}")

    def as_dict(self):
        return {
            "delta": dict(zip(THETA_NAMES, self.delta.tolist())),
            "delta_relax": int(self.delta_relax),
            "max_iters": int(self.max_iters),
            "frozen": dict(self.frozen),
            "threads": int(self.threads),
            "sigma_max": self.sigma_max,
        }


@dataclass
class Region:
    """A box with its bounds, the unit of work of the solver."""

    box: object
    lower: float
    upper: float
    center: np.ndarray
    weak: bool = False
    status: str = ACTIVE


def precision_for_size(n, delta_ref, n_ref):
    """Precision scaled as N^(-1/4) relative to (n_ref, delta_ref)."""
    return np.asarray(delta_ref, dtype=float) * (float(n) / float(n_ref)) ** -0.25


def axis_ranges(sigma_max):
    """Width of each axis of the outer parameter space."""
    upper = PARAMETER_AXES["Upper"].replace("sigma_max", sigma_max).astype(float)
    return (upper - PARAMETER_AXES["Lower"].astype(float)).to_numpy()


def grid_count(delta, sigma_max, frozen=()):
    """Evaluations of an exhaustive grid at resolution δ over the free axes."""
    ranges = axis_ranges(sigma_max)
    free = [i for i, name in enumerate(THETA_NAMES) if name not in frozen]
    return float(np.prod(np.ceil(ranges[free] / np.asarray(delta, dtype=float)[free])))


def project(center, box=None):
    """Map a point with h1 > h2 to the diagonal, staying inside ``box`` when given."""
    point = np.array(center, dtype=float)
    if point[0] > point[1]:
        t = 0.5 * (point[0] + point[1])
        if box is not None:
            t = min(max(t, box.lo[0], box.lo[1]), box.hi[0], box.hi[1])
        point[0] = point[1] = t
    return point


def leaf_of(box, point, delta):
    """Leaf of the full refinement of ``box`` that contains ``point``.

    Splits are replayed exactly as the search performs them (longest normalized
    edge, halving); on a split boundary the lower half is kept.
    """
    lo = box.lo.copy()
    hi = box.hi.copy()
    delta = np.asarray(delta, dtype=float)
    while np.any((hi - lo) / delta > 1.0):
        axis = int(np.argmax((hi - lo) / delta))
        middle = 0.5 * (lo[axis] + hi[axis])
        if point[axis] <= middle:
            hi[axis] = middle
        else:
            lo[axis] = middle
    return ParamBox(lo, hi)


def leaf_point(box, delta):
    """Point at which the criterion bounds ``box`` from above.

    This is the projected center of the leaf containing the projected center of
    the box, so every incumbent value is the value of some leaf.
    """
    leaf = leaf_of(box, project(box.center, box), delta)
    return project(leaf.center, leaf)


def _infeasible(box):
    return box.lo[0] > box.hi[1]


class _Search:
    """State of one solver run."""

    def __init__(self, criterion, config):
        self.criterion = criterion
        self.config = config
        self.heap = []
        self.counter = itertools.count()
        self.candidates = []
        self.incumbent = None
        self.iterations = 0
        self.weak_count = 0
        self.trace = [] if config.trace else None

    @property
    def upper(self):
        return np.inf if self.incumbent is None else self.incumbent.upper

    def evaluate(self, boxes):
        """Bound a batch of boxes: interval lower bounds, criterion at leaf points."""
        lowers, weak = bound_many(boxes, self.criterion)
        regions = []
        for box, lower, flag in zip(boxes, lowers, weak):
            center = leaf_point(box, self.config.delta)
            upper = self.criterion(center)
            regions.append(Region(box, min(float(lower), upper), upper, center, bool(flag)))
        return regions

    def settle(self, region, status):
        region.status = status
        if self.trace is not None:
            row = {"lower": region.lower, "upper": region.upper, "status": status}
            row.update({f"{n}_lo": v for n, v in zip(THETA_NAMES, region.box.lo)})
            row.update({f"{n}_hi": v for n, v in zip(THETA_NAMES, region.box.hi)})
            self.trace.append(row)

    def offer(self, region):
        """Update the incumbent with a newly bounded region."""
        self.weak_count += int(region.weak)
        if region.upper < self.upper:
            self.incumbent = region

    def place(self, region):
        """Prune a bounded region or queue it."""
        if region.lower > self.upper:
            self.settle(region, PRUNED_BOUND)
        elif np.all(region.box.normalized_edges(self.config.delta) <= 1.0):
            region.status = PRUNED_SIZE
            self.candidates.append(region)
        else:
            entry = (
                region.lower,
                -region.box.normalized_volume(self.config.delta),
                region.box.key(),
                next(self.counter),
                region,
            )
            heapq.heappush(self.heap, entry)

    def pop(self):
        while self.heap:
            region = heapq.heappop(self.heap)[-1]
            if region.lower > self.upper:
                self.settle(region, PRUNED_BOUND)
                continue
            return region
        return None

    def children(self, region):
        out = []
        axis = region.box.longest_axis(self.config.delta)
        for child in region.box.split(axis):
            if _infeasible(child):
                if self.trace is not None:
                    self.settle(Region(child, np.inf, np.inf, child.center), INFEASIBLE)
                continue
            out.append(child)
        return out


def solve(spectrum, config=None, eta_table=None):
    """Global minimization of C_N by Branch & Bound.

    Args:
        spectrum (SampleSpectrum): empirical wavelet spectrum (carries sigma_max)
        config (BnbConfig): solver settings
        eta_table (EtaTable): defaults to the table of the spectrum's wavelet

    Returns:
        EstimationResult: method ``M-BB``; ``diagnostics`` holds iterations,
        wall_time, candidates_count, complete, weak_bounds, cells, grid_count,
        iteration_pct and gap

    Raises:
        InfeasibleParameterError: if the frozen values leave no relaxation cell
    """
    config = config or BnbConfig()
    start = time.perf_counter()
    criterion = (
        spectrum
        if isinstance(spectrum, Criterion)
        else Criterion.from_spectrum(spectrum, eta_table)
    )
    sigma_max = config.sigma_max if config.sigma_max is not None else spectrum.sigma_max
    relaxation = build_relaxation(config.delta_relax, sigma_max, config.frozen)
    if not len(relaxation):
        raise InfeasibleParameterError(f"no feasible cell for frozen values {config.frozen}")

    search = _Search(criterion, config)
    initial = search.evaluate(relaxation.cells)
    for region in initial:
        search.offer(region)
    for region in initial:
        search.place(region)

    pool = ThreadPoolExecutor(max_workers=config.threads) if config.threads > 1 else None
    complete = True
    try:
        while True:
            if search.iterations >= config.max_iters:
                complete = not search.heap
                break
            batch = []
            while len(batch) < config.threads:
                region = search.pop()
                if region is None:
                    break
                batch.append(region)
            if not batch:
                break
            boxes = []
            for region in batch:
                search.iterations += 1
                boxes.extend(search.children(region))
            if pool is None or len(boxes) < 2:
                bounded = search.evaluate(boxes)
            else:
                size = -(-len(boxes) // config.threads)
                chunks = [boxes[i : i + size] for i in range(0, len(boxes), size)]
                bounded = [r for part in pool.map(search.evaluate, chunks) for r in part]
            for region in bounded:
                search.offer(region)
            for region in bounded:
                search.place(region)
            if search.iterations % PROGRESS_EVERY < len(batch):
                logger.debug(
                    f"iteration {search.iterations}: U={search.upper:.6g}, "
                    f"{len(search.heap)} active, {len(search.candidates)} candidates"
                )
    finally:
        if pool is not None:
            pool.shutdown()

    survivors = []
    for region in search.candidates:
        if region.lower > search.upper:
            search.settle(region, PRUNED_BOUND)
        else:
            search.settle(region, CANDIDATE)
            survivors.append(region)
    if not complete:
        logger.warning(
            f"Branch & Bound stopped at max_iters={config.max_iters} with "
            f"{len(search.heap)} active regions; returning the best point so far"
        )
    pool_regions = survivors if survivors else [search.incumbent]
    best = min(pool_regions, key=lambda r: (r.upper, r.box.key()))

    free = [n for n in THETA_NAMES if n not in config.frozen]
    grid = grid_count(config.delta, sigma_max, config.frozen)
    diagnostics = {
        "iterations": search.iterations,
        "wall_time": time.perf_counter() - start,
        "candidates_count": len(survivors),
        "complete": complete,
        "weak_bounds": search.weak_count,
        "cells": len(relaxation),
        "free_axes": free,
        "grid_count": grid,
        "iteration_pct": 100.0 * search.iterations / grid,
        "gap": max((r.upper - r.lower for r in survivors), default=float("nan")),
        "dropped_terms": criterion.dropped,
        "sigma_max": float(sigma_max),
    }
    logger.info(
        f"M-BB: C_N={best.upper:.6g} after {search.iterations} iterations "
        f"({diagnostics['wall_time']:.2f} s, {len(survivors)} candidates)"
    )
    trace = pd.DataFrame(search.trace) if search.trace is not None else None
    return EstimationResult(
        theta_hat=dict(zip(THETA_NAMES, best.center.tolist())),
        objective_value=float(best.upper),
        method="M-BB",
        diagnostics=diagnostics,
        config=config.as_dict(),
        candidates=survivors,
        trace=trace,
    )
