import numpy as np
import pytest

from core.errors import InsufficientOctavesError, ParameterDomainError, ShortPathError
from core.models.spectrum import model_spectrum
from core.models.theta import Theta
from core.tools.synthesis import SynthesisConfig, synthesize_many
from core.tools.wavelet import (
    AnalysisConfig,
    analyze,
    check_filters,
    dwt,
    sample_spectrum,
    sigma_max,
)


@pytest.mark.parametrize("wavelet_id", ["db1", "sym2", "sym3", "sym4", "sym5", "sym8"])
def test_filters_are_orthonormal(wavelet_id):
    assert check_filters(wavelet_id)


def test_config_validation():
    assert AnalysisConfig().wavelet == "sym2"
    assert AnalysisConfig().coarsest(1024) == 7
    with pytest.raises(ParameterDomainError):
        AnalysisConfig(j1=0)
    with pytest.raises(ParameterDomainError):
        AnalysisConfig(j1=4, j2=3)
    with pytest.raises(ParameterDomainError):
        AnalysisConfig(boundary="mirror")
    with pytest.raises(ShortPathError):
        AnalysisConfig(j2=10).coarsest(1024)


def test_periodized_transform_preserves_energy(rng):
    y = rng.standard_normal((1024, 2))
    coeffs = dwt(y, AnalysisConfig(boundary="periodization"))
    assert coeffs.energy() == pytest.approx(float(np.sum(y**2)), rel=1e-10)
    assert sorted(coeffs.details) == list(range(1, 8))
    assert coeffs.details[1].shape == (512, 2)


def test_truncated_transform_counts(rng):
    y = rng.standard_normal((1024, 2))
    coeffs = dwt(y, AnalysisConfig())
    # "valid" convolution with the 4-tap sym2 filters then decimation
    assert coeffs.details[1].shape == (511, 2)
    assert coeffs.details[2].shape == (254, 2)


def test_white_noise_spectrum_is_flat(rng):
    y = rng.standard_normal((2**14, 2))
    spectrum = sample_spectrum(dwt(y, AnalysisConfig(j2=4)), AnalysisConfig(j2=4))
    np.testing.assert_allclose(spectrum.s11, 1.0, atol=0.2)
    np.testing.assert_allclose(spectrum.s22, 1.0, atol=0.2)
    np.testing.assert_allclose(spectrum.s12, 0.0, atol=0.2)


def test_octaves_with_few_coefficients_are_dropped(rng):
    y = rng.standard_normal((256, 2))
    config = AnalysisConfig(j2=7)
    with pytest.warns(UserWarning, match="dropped"):
        spectrum = sample_spectrum(dwt(y, config), config)
    assert spectrum.meta["dropped"] == [6, 7]
    np.testing.assert_array_equal(spectrum.js, [1, 2, 3, 4, 5])
    np.testing.assert_array_equal(spectrum.counts, [127, 62, 30, 14, 6])


def test_all_octaves_dropped(rng):
    y = rng.standard_normal((256, 2))
    config = AnalysisConfig(j1=6, j2=7)
    with pytest.warns(UserWarning):
        with pytest.raises(InsufficientOctavesError):
            sample_spectrum(dwt(y, config), config)


def test_spectrum_needs_two_components(rng):
    y = rng.standard_normal(1024)
    with pytest.raises(TypeError):
        sample_spectrum(dwt(y))


def test_sigma_max_from_increments(rng):
    steps = rng.standard_normal((4096, 2)) * [1.0, 2.0]
    y = np.cumsum(steps, axis=0)
    assert sigma_max(y) == pytest.approx(np.sqrt(5.0), rel=0.05)


def test_analyze_carries_provenance(synthesized_path, real_spectrum):
    assert real_spectrum.meta["sigma_max"] == pytest.approx(sigma_max(synthesized_path))
    assert real_spectrum.meta["theta_true"] == synthesized_path.meta["theta_true"]
    assert real_spectrum.meta["seed"] == 7
    assert real_spectrum.meta["boundary"] == "truncate"
    modules = list(real_spectrum.receipt["Module_Name"])
    assert modules[0] == "synthesize" and modules[-1] == "analyze"


def test_spectrum_of_a_path_grows_with_scale(real_spectrum):
    # both entries are dominated by 2^{j(2 h2 + 1)} at coarse scales
    assert real_spectrum.s22[-1] > 10 * real_spectrum.s22[0]
    assert real_spectrum.s11[-1] > 10 * real_spectrum.s11[0]


@pytest.mark.parametrize("n_psi", [3, 4, 5])
def test_analyze_with_more_vanishing_moments(synthesized_path, n_psi):
    spectrum = analyze(synthesized_path, AnalysisConfig(n_psi=n_psi))
    assert spectrum.wavelet_id == f"sym{n_psi}"
    assert spectrum.js[0] == 1
    assert np.all(spectrum.s11 > 0) and np.all(spectrum.s22 > 0)


@pytest.mark.slow
def test_spectrum_is_unbiased_at_coarse_octaves(eta_table):
    # the sampled transform only reaches the continuous-time model away from the finest octaves
    theta = Theta(0.4, 0.8, 0.1, 1.0, 1.0, 0.5, 0.5)
    config = AnalysisConfig(j1=4, j2=8)
    paths = synthesize_many(SynthesisConfig(theta, 2**13, seed=2000), 500)
    spectra = [analyze(p, config) for p in paths]
    assert list(spectra[0].js) == [4, 5, 6, 7, 8]
    model = model_spectrum(theta, range(4, 9), eta_table)
    scale = np.sqrt(model.e11 * model.e22)
    for entry in ("s11", "s12", "s22"):
        values = np.array([getattr(s, entry) for s in spectra])
        mean = values.mean(axis=0)
        se = values.std(axis=0, ddof=1) / np.sqrt(len(spectra))
        expected = getattr(model, "e" + entry[1:])
        assert np.all(np.abs(mean - expected) <= 4 * se + 0.1 * scale)
