import numpy as np
import pytest

from core.errors import InsufficientOctavesError
from core.models.result import EstimationResult
from core.models.spectrum import SampleSpectrum
from core.models.theta import Theta, max_feasible_rho
from core.solver.bnb import BnbConfig
from estimators import get_estimator, run_estimator
from estimators.eigen import BETA_EXTRACTION, estimate_eigen
from estimators.mbb import estimate_m
from estimators.objective import Criterion, dropped_terms, objective_cn
from estimators.univariate import estimate_univariate
from tests.conftest import LATTICE_THETA


def power_law(js, s11, s22, s12=None):
    js = np.asarray(js)
    s12 = np.zeros(js.size) if s12 is None else s12
    return SampleSpectrum.from_entries(
        js, 2 ** (14 - js), s11, s12, s22, n=2**14, n_psi=2, sigma_max=2.0
    )


def random_theta(rng):
    h1, h2 = np.sort(rng.uniform(0.05, 0.95, 2))
    rho = rng.uniform(0.0, 0.9) * float(max_feasible_rho(h1, h2))
    s1, s2 = rng.uniform(0.5, 2.0, 2)
    beta, gamma = rng.uniform(-0.9, 0.9, 2)
    return Theta(h1, h2, rho, s1, s2, beta, gamma)


def test_criterion_vanishes_at_the_truth(noiseless_spectrum, eta_table):
    assert objective_cn(LATTICE_THETA, noiseless_spectrum, eta_table) == pytest.approx(0.0, abs=1e-20)
    wrong = LATTICE_THETA.replace(sigma_x1=2.0)
    assert objective_cn(wrong, noiseless_spectrum, eta_table) > 0.0


def test_criterion_is_invariant_under_the_sign_flip(rng, real_spectrum, eta_table):
    criterion = Criterion.from_spectrum(real_spectrum, eta_table)
    for _ in range(50):
        theta = random_theta(rng)
        assert objective_cn(theta.sign_flipped(), criterion) == pytest.approx(
            objective_cn(theta, criterion), rel=1e-12
        )


def test_unmixed_uncorrelated_model_drops_cross_terms(eta_table):
    theta = Theta(0.3, 0.7, 0.0, 1.0, 2.0, 0.0, 0.0)
    spectrum = SampleSpectrum.from_model(theta, range(1, 11), eta_table, n=2**14)
    assert dropped_terms(spectrum) == 10
    criterion = Criterion.from_spectrum(spectrum, eta_table)
    assert criterion.dropped == 10
    assert objective_cn(theta, criterion) == pytest.approx(0.0, abs=1e-20)


def test_univariate_on_a_pure_power_law():
    js = np.arange(1, 9)
    spectrum = power_law(js, 2.0 ** (2.2 * js + 1), 2.0 ** (2.2 * js))
    result = estimate_univariate(spectrum)
    assert result.method == "univariate"
    assert result.theta_hat["h1"] == pytest.approx(0.6)
    assert result.theta_hat["h2"] == pytest.approx(0.6)
    assert result.estimated == ["h1", "h2"]
    assert result.theta is None
    assert result.diagnostics["fine_octaves"] == [1, 2, 3, 4]
    assert result.diagnostics["coarse_octaves"] == [5, 6, 7, 8]
    assert estimate_univariate(spectrum, weights="kj").theta_hat["h1"] == pytest.approx(0.6)


def test_univariate_needs_two_octaves_per_range():
    js = np.arange(1, 4)
    with pytest.raises(InsufficientOctavesError):
        estimate_univariate(power_law(js, 2.0**js, 2.0**js))


def test_univariate_is_biased_by_mixing(eta_table, theta_mixed):
    spectrum = SampleSpectrum.from_model(theta_mixed, range(1, 11), eta_table, n=2**14)
    result = estimate_univariate(spectrum)
    assert result.theta_hat["h1"] > theta_mixed.h1 + 0.03


def test_eigen_on_an_unmixed_spectrum():
    js = np.arange(1, 9)
    spectrum = power_law(js, 2.0 ** (1.8 * js), 2.0 ** (2.6 * js + 1))
    result = estimate_eigen(spectrum)
    assert result.method == "eigenvalue"
    assert result.theta_hat["h1"] == pytest.approx(0.4)
    assert result.theta_hat["h2"] == pytest.approx(0.8)
    assert result.theta_hat["beta"] == pytest.approx(0.0, abs=1e-12)
    assert result.diagnostics["beta_extraction"] == BETA_EXTRACTION
    assert result.diagnostics["beta_octave"] == 8
    univariate = estimate_univariate(spectrum)
    assert univariate.theta_hat["h1"] == pytest.approx(result.theta_hat["h1"])
    assert univariate.theta_hat["h2"] == pytest.approx(result.theta_hat["h2"])


def test_eigen_recovers_the_mixing_direction(eta_table):
    theta = Theta(0.2, 0.8, 0.0, 1.0, 1.0, 0.5, 0.5)
    spectrum = SampleSpectrum.from_model(theta, range(1, 11), eta_table, n=2**14)
    result = estimate_eigen(spectrum)
    assert result.theta_hat["beta"] == pytest.approx(0.5, abs=1e-2)
    assert result.theta_hat["h1"] == pytest.approx(0.2, abs=0.02)
    assert result.theta_hat["h2"] == pytest.approx(0.8, abs=0.02)
    assert result.theta_hat["gamma"] is None


def test_eigen_skips_indefinite_octaves():
    js = np.arange(1, 9)
    s12 = np.zeros(js.size)
    s12[0] = 10.0
    spectrum = power_law(js, 2.0 ** (1.8 * js), 2.0 ** (2.6 * js + 1), s12)
    with pytest.warns(UserWarning, match="skipped"):
        result = estimate_eigen(spectrum)
    assert result.diagnostics["skipped_octaves"] == [1]


def test_registry_dispatch(noiseless_spectrum, eta_table):
    assert get_estimator("uni") is estimate_univariate
    assert get_estimator("eig") is estimate_eigen
    with pytest.raises(ValueError):
        get_estimator("mle")
    result = run_estimator("uni", noiseless_spectrum, weights="kj")
    assert result.config == {"weights": "kj"}
    frozen = {k: v for k, v in LATTICE_THETA.as_dict().items() if k not in ("h1", "h2")}
    config = BnbConfig(delta=0.01, delta_relax=8, frozen=frozen)
    m = run_estimator("m", noiseless_spectrum, bnb_config=config, eta_table=eta_table)
    assert m.method == "M-BB"
    assert m.theta_hat["h2"] == pytest.approx(LATTICE_THETA.h2)


def test_m_estimator_extends_the_receipt(noiseless_spectrum, eta_table):
    frozen = {k: v for k, v in LATTICE_THETA.as_dict().items() if k not in ("h1", "h2")}
    result = estimate_m(noiseless_spectrum, BnbConfig(delta=0.01, delta_relax=8, frozen=frozen), eta_table)
    modules = list(result.receipt["Module_Name"])
    assert modules == ["from_model", "estimate_m"]
    assert result.receipt["Status"].iloc[-1] == "PASS"
    # the spectrum itself is untouched
    assert list(noiseless_spectrum.receipt["Module_Name"]) == ["from_model"]


def test_result_json_keeps_missing_parameters(tmp_path, noiseless_spectrum):
    result = estimate_univariate(noiseless_spectrum)
    fn = tmp_path / "out" / "result.json"
    result.to_json(str(fn))
    back = EstimationResult.from_json(str(fn))
    assert back.method == "univariate"
    assert back.theta_hat["beta"] is None
    assert back.theta_hat["h1"] == pytest.approx(result.theta_hat["h1"])
    assert back.diagnostics["fine_octaves"] == result.diagnostics["fine_octaves"]
    assert list(back.receipt["Module_Name"]) == ["from_model", "estimate_univariate"]
    with pytest.raises(IOError):
        EstimationResult.from_json(str(tmp_path / "missing.json"))
