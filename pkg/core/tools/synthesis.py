"""
Exact synthesis of Biv-OfBm sample paths

The latent increments ΔX are a stationary bivariate Gaussian sequence. Their
2x2 covariance sequence is embedded in a circulant of length L (even, symmetric
lags), whose spectral matrices are real and symmetric. Each spectral matrix is
factored through its eigen-decomposition, complex white noise is colored and
brought back by an inverse FFT; the real part has exactly the target covariance.
The observed increments are ΔY = W ΔX and the path is their cumulative sum.
"""

import logging
from dataclasses import dataclass

import numpy as np

from core.errors import EmbeddingError
from core.models.definitions import CLIP_RATIO, MAX_DOUBLINGS, MIN_PATH_LENGTH
from core.models.path import Path
from core.models.theta import Theta, increment_covariance, latent_increment_covariance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynthesisConfig:
    """Settings of one synthesized path.

    Attributes:
        theta (Theta): feasible model parameters
        n (int): number of samples, a power of two >= 2**8
        seed (int): seed of ``numpy.random.default_rng``
        embedding_factor (int): initial circulant length as a multiple of n
    """

    theta: Theta
    n: int
    seed: int = 0
    embedding_factor: int = 2

    def __post_init__(self):
        n = int(self.n)
        if n < MIN_PATH_LENGTH or n & (n - 1):
            raise ValueError(f"n must be a power of two >= {MIN_PATH_LENGTH}, got {self.n}")
        if int(self.embedding_factor) < 2:
            raise ValueError("embedding_factor must be at least 2")
        self.theta.check()


@dataclass(frozen=True)
class Embedding:
    """Factored circulant embedding of the latent increment covariance.

    Attributes:
        length (int): circulant length L
        factors (numpy.ndarray): (L, 2, 2) matrices F with F F* = spectral matrix
        eigenvalues (numpy.ndarray): (L, 2) clipped eigenvalues
        min_eigenvalue (float): most negative eigenvalue before clipping
        clipped (int): number of eigenvalues set to zero
    """

    length: int
    factors: np.ndarray
    eigenvalues: np.ndarray
    min_eigenvalue: float
    clipped: int


def _circulant_lags(length):
    half = length // 2
    return np.concatenate([np.arange(0, half + 1), np.arange(half - 1, 0, -1)])


def embed(theta, m, factor=2):
    """Find a nonnegative-definite circulant embedding for m latent increments.

    The length starts at ``factor`` times the next power of two above m and is
    doubled until every spectral matrix is nonnegative up to the clipping tolerance.

    Raises:
        EmbeddingError: when MAX_DOUBLINGS doublings did not suffice
    """
    length = int(factor) * (1 << int(np.ceil(np.log2(m + 1))))
    worst = 0.0
    for attempt in range(MAX_DOUBLINGS + 1):
        cov = latent_increment_covariance(theta, _circulant_lags(length))
        spectral = np.fft.fft(cov, axis=0).real
        spectral = 0.5 * (spectral + np.swapaxes(spectral, 1, 2))
        lam, vec = np.linalg.eigh(spectral)
        worst = float(lam.min())
        tol = CLIP_RATIO * float(lam.max())
        if worst >= -tol:
            clipped = int(np.count_nonzero(lam < 0))
            lam = np.clip(lam, 0.0, None)
            logger.debug(
                f"embedding of length {length} after {attempt} doublings, "
                f"{clipped} eigenvalues clipped"
            )
            return Embedding(length, vec * np.sqrt(lam)[:, None, :], lam, worst, clipped)
        logger.debug(f"embedding of length {length} is indefinite (min eigenvalue {worst:.3e})")
        length *= 2
    raise EmbeddingError(
        f"circulant embedding still indefinite after {MAX_DOUBLINGS} doublings "
        f"(min eigenvalue {worst:.3e})",
        min_eigenvalue=worst,
        length=length // 2,
    )


def _latent_increments(embedding, m, rng):
    length = embedding.length
    noise = rng.standard_normal((length, 2)) + 1j * rng.standard_normal((length, 2))
    colored = np.einsum("fab,fb->fa", embedding.factors, noise)
    return np.sqrt(length) * np.fft.ifft(colored, axis=0).real[:m]


def _to_path(config, embedding, rng):
    m = config.n - 1
    dx = _latent_increments(embedding, m, rng)
    dy = dx @ config.theta.mixing.w.T
    y = np.vstack([np.zeros((1, 2)), np.cumsum(dy, axis=0)])
    path = Path.from_arrays(
        y[:, 0],
        y[:, 1],
        theta=config.theta,
        seed=config.seed,
        synthesis={
            "embedding_length": embedding.length,
            "clipped": embedding.clipped,
            "min_eigenvalue": embedding.min_eigenvalue,
        },
    )
    path.receipt_add_entry("synthesize", "PASS")
    return path


def synthesize(config):
    """Synthesize one Biv-OfBm path.

    Args:
        config (SynthesisConfig): parameters, length and seed

    Returns:
        Path: ``y1, y2`` of length n with ``y[0] = 0``

    Raises:
        EmbeddingError: if no valid embedding was found
    """
    embedding = embed(config.theta, config.n - 1, config.embedding_factor)
    return _to_path(config, embedding, np.random.default_rng(config.seed))


def synthesize_many(config, replications):
    """Independent paths with seeds ``config.seed + i``, sharing one embedding."""
    embedding = embed(config.theta, config.n - 1, config.embedding_factor)
    paths = []
    for i in range(int(replications)):
        seed = config.seed + i
        rep = SynthesisConfig(config.theta, config.n, seed, config.embedding_factor)
        paths.append(_to_path(rep, embedding, np.random.default_rng(seed)))
    return paths


def embedded_covariance(config):
    """Target and implied covariance sequences of the observed increments.

    The implied sequence is recovered by inverse transform of the clipped
    spectral matrices of the embedding actually used by :func:`synthesize`.

    Returns:
        tuple of numpy.ndarray: (target, implied), both of shape (n - 1, 2, 2)
        indexed by lag
    """
    m = config.n - 1
    embedding = embed(config.theta, m, config.embedding_factor)
    spectral = np.einsum("fab,fcb->fac", embedding.factors, embedding.factors)
    latent = np.fft.ifft(spectral, axis=0).real[:m]
    w = config.theta.mixing.w
    implied = w @ latent @ w.T
    target = increment_covariance(config.theta, np.arange(m))
    return target, implied
