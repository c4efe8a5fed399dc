import logging

import numpy as np
import pytest

from core.errors import InfeasibleParameterError
from core.models.definitions import THETA_NAMES
from core.models.spectrum import SampleSpectrum
from core.models.theta import Theta
from core.solver.bnb import (
    CANDIDATE,
    BnbConfig,
    grid_count,
    leaf_of,
    leaf_point,
    precision_for_size,
    project,
    solve,
)
from core.solver.relaxation import build_relaxation
from core.tools.synthesis import SynthesisConfig, synthesize
from core.tools.wavelet import AnalysisConfig, analyze
from estimators.objective import Criterion
from tests.conftest import LATTICE_THETA


def hurst_only(theta, **changes):
    """Freeze everything except (h1, h2) at the values of ``theta``."""
    values = theta.as_dict()
    frozen = {name: values[name] for name in THETA_NAMES if name not in ("h1", "h2")}
    return BnbConfig(delta=0.01, delta_relax=8, frozen=frozen, **changes)


def grid_search(criterion, config, sigma_max):
    """Evaluate every leaf of the refined relaxation and return the best center."""
    relaxation = build_relaxation(config.delta_relax, sigma_max, config.frozen)
    best = None
    for cell in relaxation.cells:
        side = 2.0**-7
        for a in np.arange(cell.lo[0], cell.hi[0], side):
            for b in np.arange(cell.lo[1], cell.hi[1], side):
                if a > b + side:
                    continue
                lo, hi = cell.lo.copy(), cell.hi.copy()
                lo[:2], hi[:2] = (a, b), (a + side, b + side)
                leaf = type(cell)(lo, hi)
                center = project(leaf.center, leaf)
                value = criterion(center)
                if best is None or value < best[0]:
                    best = (value, center)
    return best


def test_config_validation():
    assert BnbConfig().delta.shape == (7,)
    np.testing.assert_array_equal(BnbConfig(delta=0.05).delta, np.full(7, 0.05))
    with pytest.raises(ValueError):
        BnbConfig(delta=0.0)
    with pytest.raises(ValueError):
        BnbConfig(delta_relax=1)
    with pytest.raises(ValueError):
        BnbConfig(frozen={"alpha": 1.0})
    assert BnbConfig(frozen={"h1": 0.3}).as_dict()["frozen"] == {"h1": 0.3}


def test_precision_scaling_and_grid_count():
    np.testing.assert_allclose(precision_for_size(2**14, 0.02, 2**10), 0.01)
    assert grid_count(np.full(7, 0.5), 1.0) == 2 * 2 * 2 * 2 * 2 * 4 * 4
    frozen = {n: 0.0 for n in THETA_NAMES if n not in ("h1", "h2")}
    assert grid_count(np.full(7, 0.125), 1.0, frozen) == 8 * 8


def test_projection_moves_to_the_diagonal():
    np.testing.assert_array_equal(project([0.6, 0.4, 0, 0, 0, 0, 0])[:2], [0.5, 0.5])
    np.testing.assert_array_equal(project([0.2, 0.4, 0, 0, 0, 0, 0])[:2], [0.2, 0.4])


def test_noiseless_spectrum_recovers_the_lattice_point(noiseless_spectrum, eta_table):
    result = solve(noiseless_spectrum, hurst_only(LATTICE_THETA), eta_table)
    assert result.method == "M-BB"
    assert result.theta_hat["h1"] == pytest.approx(LATTICE_THETA.h1, abs=1e-12)
    assert result.theta_hat["h2"] == pytest.approx(LATTICE_THETA.h2, abs=1e-12)
    assert result.objective_value == pytest.approx(0.0, abs=1e-20)
    assert result.diagnostics["complete"]
    assert result.diagnostics["free_axes"] == ["h1", "h2"]
    assert result.diagnostics["iteration_pct"] < 100.0
    assert all(c.lower <= result.objective_value for c in result.candidates)


def test_agrees_with_exhaustive_leaf_search(real_spectrum, eta_table, theta_mixed):
    config = hurst_only(theta_mixed)
    criterion = Criterion.from_spectrum(real_spectrum, eta_table)
    result = solve(real_spectrum, config, eta_table)
    value, center = grid_search(criterion, config, real_spectrum.sigma_max)
    assert result.diagnostics["complete"]
    # same cell as the exhaustive search
    assert result.objective_value == pytest.approx(value, rel=1e-12, abs=1e-15)
    np.testing.assert_allclose(result.as_array(), center, atol=1e-12)
    assert min(c.lower for c in result.candidates) <= value + 1e-12
    for h in (result.theta_hat["h1"], result.theta_hat["h2"]):
        assert (h * 256 - 1) / 2 == pytest.approx(round((h * 256 - 1) / 2), abs=1e-9)


def test_thread_batches_give_the_same_estimate(noiseless_spectrum, eta_table):
    one = solve(noiseless_spectrum, hurst_only(LATTICE_THETA), eta_table)
    four = solve(noiseless_spectrum, hurst_only(LATTICE_THETA, threads=4), eta_table)
    np.testing.assert_array_equal(one.as_array(), four.as_array())


def test_trace_records_settled_regions(noiseless_spectrum, eta_table):
    result = solve(noiseless_spectrum, hurst_only(LATTICE_THETA, trace=True), eta_table)
    trace = result.trace
    assert {"lower", "upper", "status", "h1_lo", "gamma_hi"} <= set(trace.columns)
    assert (trace["status"] == CANDIDATE).sum() == result.diagnostics["candidates_count"]
    assert (trace["h1_lo"] <= trace["h1_hi"]).all()


def test_iteration_cap_flags_incomplete_runs(real_spectrum, eta_table, caplog):
    config = BnbConfig(delta=0.01, delta_relax=4, max_iters=3)
    with caplog.at_level(logging.WARNING, logger="core.solver.bnb"):
        result = solve(real_spectrum, config, eta_table)
    assert not result.diagnostics["complete"]
    assert result.diagnostics["iterations"] == 3
    assert "max_iters" in caplog.text
    assert result.theta is not None


def test_estimate_lies_in_the_feasible_set(real_spectrum, eta_table):
    config = BnbConfig(delta=0.1, delta_relax=4, max_iters=500)
    result = solve(real_spectrum, config, eta_table)
    theta = result.theta
    assert theta.h1 <= theta.h2
    assert theta.feasible


def test_frozen_values_without_cells(real_spectrum, eta_table):
    with pytest.raises(InfeasibleParameterError):
        solve(real_spectrum, BnbConfig(delta_relax=4, frozen={"rho_x": 1.0}), eta_table)


def test_leaf_of_replays_the_search_splits():
    cell = build_relaxation(4, 1.0).cells[5]
    delta = np.array([0.01, 0.01, 0.2, 0.3, 0.3, 0.5, 0.5])
    point = project(cell.center, cell)
    leaf = leaf_of(cell, point, delta)
    assert np.all(leaf.normalized_edges(delta) <= 1.0)
    assert leaf.contains(point)
    box = cell
    while np.any(box.normalized_edges(delta) > 1.0):
        left, right = box.split(box.longest_axis(delta))
        box = left if left.contains(point) else right
    assert box == leaf
    np.testing.assert_array_equal(leaf_point(leaf, delta), project(leaf.center, leaf))


def test_leaf_point_stays_on_the_feasible_side():
    cell = next(c for c in build_relaxation(4, 1.0).cells if c.lo[0] == c.lo[1] == 0.0)
    point = leaf_point(cell, np.full(7, 0.05))
    assert point[0] <= point[1]
    assert cell.contains(point)


@pytest.mark.slow
def test_grid_oracle_on_synthesized_paths(eta_table, theta_mixed):
    config = hurst_only(theta_mixed)
    for seed in range(10):
        path = synthesize(SynthesisConfig(theta_mixed, 2**14, seed=100 + seed))
        spectrum = analyze(path, AnalysisConfig())
        criterion = Criterion.from_spectrum(spectrum, eta_table)
        result = solve(spectrum, config, eta_table)
        value, center = grid_search(criterion, config, spectrum.sigma_max)
        assert result.diagnostics["complete"]
        assert result.objective_value == pytest.approx(value, rel=1e-12, abs=1e-15)
        np.testing.assert_allclose(result.as_array(), center, atol=1e-12)


@pytest.mark.slow
def test_full_problem_noiseless_recovery(eta_table):
    # every coordinate but rho_x sits on a leaf center of this configuration
    theta = Theta(65 / 160, 129 / 160, 0.45, 1.0, 1.0, 15 / 32, 15 / 32)
    spectrum = SampleSpectrum.from_model(theta, range(1, 11), eta_table, n=2**14)
    delta = np.array([0.02, 0.02, 0.1, 0.1, 0.1, 0.1, 0.1])
    config = BnbConfig(delta=delta, delta_relax=10, max_iters=400000, sigma_max=64 / 31)
    result = solve(spectrum, config, eta_table)
    assert result.diagnostics["complete"]
    assert result.diagnostics["free_axes"] == list(THETA_NAMES)
    assert np.all(np.abs(result.as_array() - theta.as_array()) <= delta)
    assert result.diagnostics["iteration_pct"] < 5.0
