import numpy as np
import pytest

from core.models.eta import load_eta_table
from core.models.spectrum import SampleSpectrum
from core.models.theta import Theta
from core.tools.synthesis import SynthesisConfig, synthesize
from core.tools.wavelet import AnalysisConfig, analyze

# h values on the 2^-7 lattice used by the Branch & Bound leaves of a Δ = 8
# relaxation refined to δ = 0.01
LATTICE_THETA = Theta(103 / 256, 205 / 256, 0.45, 1.0, 1.0, 0.5, 0.5)


@pytest.fixture(scope="session", autouse=True)
def eta_cache(tmp_path_factory):
    """Build eta tables once per session in a private cache directory."""
    directory = tmp_path_factory.mktemp("eta-cache")
    patch = pytest.MonkeyPatch()
    patch.setenv("OFBM_CACHE_DIR", str(directory))
    yield directory
    patch.undo()


@pytest.fixture(scope="session")
def eta_table(eta_cache):
    return load_eta_table("sym2")


@pytest.fixture(scope="session")
def theta_mixed():
    return Theta(0.4, 0.8, 0.45, 1.0, 1.0, 0.5, 0.5)


@pytest.fixture(scope="session")
def noiseless_spectrum(eta_table):
    return SampleSpectrum.from_model(LATTICE_THETA, range(1, 11), eta_table, n=2**14)


@pytest.fixture(scope="session")
def synthesized_path(theta_mixed):
    return synthesize(SynthesisConfig(theta_mixed, 2**12, seed=7))


@pytest.fixture(scope="session")
def real_spectrum(synthesized_path):
    return analyze(synthesized_path, AnalysisConfig())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
