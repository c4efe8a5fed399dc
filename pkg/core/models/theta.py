"""
Parametrization of the bivariate Operator fractional Brownian motion

A Biv-OfBm is ``Y = W X`` where ``X`` is an entry-wise scaling, time-reversible
OfBm with Hurst eigenvalues ``h1 <= h2``, latent standard deviations
``sigma_x1, sigma_x2`` and correlation ``rho_x``, and ``W`` is the mixing matrix
parametrized by ``(beta, gamma)`` with unit-norm columns and positive diagonal.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn

from core.errors import InfeasibleParameterError, ParameterDomainError
from core.models.definitions import THETA_NAMES

SINGULAR_TOLERANCE = 1e-12


def _g_raw(h1, h2, rho):
    h1 = np.asarray(h1, dtype=float)
    h2 = np.asarray(h2, dtype=float)
    rho = np.asarray(rho, dtype=float)
    auto = gamma_fn(2 * h1 + 1) * gamma_fn(2 * h2 + 1) * np.sin(np.pi * h1) * np.sin(np.pi * h2)
    cross = gamma_fn(h1 + h2 + 1) ** 2 * np.sin(np.pi * (h1 + h2) / 2) ** 2
    return auto - rho**2 * cross


def g_condition(h1, h2, rho):
    """Well-posedness function of the entry-wise scaling OfBm.

    The latent process is well defined (positive definite covariance) if and only if
    the returned value is strictly positive.

    Args:
        h1 (float or array): first Hurst eigenvalue, in (0, 1)
        h2 (float or array): second Hurst eigenvalue, in (0, 1)
        rho (float or array): latent correlation, in [-1, 1]

    Returns:
        float or numpy.ndarray: Γ(2h1+1)Γ(2h2+1)sin(πh1)sin(πh2)
        − ρ²Γ(h1+h2+1)²sin²(π(h1+h2)/2)

    Raises:
        ParameterDomainError: if a Hurst value is outside (0, 1) or rho outside [-1, 1]
    """
    for name, h in (("h1", h1), ("h2", h2)):
        h = np.asarray(h, dtype=float)
        if np.any(h <= 0) or np.any(h >= 1):
            raise ParameterDomainError(f"{name} must lie in (0, 1), got {h}")
    if np.any(np.abs(np.asarray(rho, dtype=float)) > 1):
        raise ParameterDomainError(f"rho must lie in [-1, 1], got {rho}")
    g = _g_raw(h1, h2, rho)
    return float(g) if np.ndim(g) == 0 else g


def max_feasible_rho(h1, h2):
    """Supremum of the correlations allowed at (h1, h2), capped at 1.

    g is strictly decreasing in rho on [0, 1], so the feasible correlations are
    [0, rho_max) with rho_max = sqrt(g(h1, h2, 0)) / (Γ(h1+h2+1)|sin(π(h1+h2)/2)|).
    Accepts the closed square [0, 1]^2 so that relaxation cells touching the
    border can be evaluated (rho_max is 0 where a Hurst value is 0 or 1).
    """
    h1 = np.asarray(h1, dtype=float)
    h2 = np.asarray(h2, dtype=float)
    g0 = np.clip(_g_raw(h1, h2, 0.0), 0.0, None)
    denom = gamma_fn(h1 + h2 + 1) * np.abs(np.sin(np.pi * (h1 + h2) / 2))
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(denom > 0, np.sqrt(g0) / denom, 1.0)
    rho = np.minimum(rho, 1.0)
    # sin(π) is not exactly 0 in floating point
    border = (h1 <= 0) | (h1 >= 1) | (h2 <= 0) | (h2 >= 1)
    rho = np.where(border, 0.0, rho)
    return float(rho) if rho.ndim == 0 else rho


@dataclass(frozen=True)
class MixingMatrix:
    """Column-normalized mixing matrix.

    Attributes:
        w (numpy.ndarray): 2x2 matrix with unit-norm columns and positive diagonal
        singular (bool): True when the columns are collinear (1 + beta*gamma = 0)
    """

    w: np.ndarray
    singular: bool = False

    @property
    def determinant(self):
        return float(np.linalg.det(self.w))


def build_mixing(beta, gamma):
    """Build the mixing matrix W(beta, gamma).

    Args:
        beta (float): mixing coefficient of the second column, in [-1, 1]
        gamma (float): mixing coefficient of the first column, in [-1, 1]

    Returns:
        MixingMatrix: ``[[1, beta/sb], [-gamma, 1/sb]]`` with the first column divided
        by sqrt(1 + gamma^2) and the second by sqrt(1 + beta^2); ``singular`` is set
        when the determinant of the unnormalized matrix, 1 + beta*gamma, vanishes.
    """
    if abs(beta) > 1 or abs(gamma) > 1:
        raise ParameterDomainError(
            f"mixing coefficients must lie in [-1, 1], got beta={beta}, gamma={gamma}"
        )
    sg = np.sqrt(1.0 + gamma**2)
    sb = np.sqrt(1.0 + beta**2)
    w = np.array([[1.0 / sg, beta / sb], [-gamma / sg, 1.0 / sb]])
    return MixingMatrix(w=w, singular=abs(1.0 + beta * gamma) < SINGULAR_TOLERANCE)


@dataclass(frozen=True)
class Theta:
    """The 7 parameters identifying a Biv-OfBm.

    Attributes:
        h1 (float): smaller Hurst eigenvalue, in (0, 1)
        h2 (float): larger Hurst eigenvalue, in (0, 1), h1 <= h2
        rho_x (float): latent correlation, in [0, 1]
        sigma_x1 (float): latent standard deviation of component 1, > 0
        sigma_x2 (float): latent standard deviation of component 2, > 0
        beta (float): mixing coefficient, in [-1, 1]
        gamma (float): mixing coefficient, in [-1, 1]

    Construction does not validate; call :meth:`check` (done by every model
    function) or read :attr:`feasible`.
    """

    h1: float
    h2: float
    rho_x: float
    sigma_x1: float = 1.0
    sigma_x2: float = 1.0
    beta: float = 0.0
    gamma: float = 0.0

    @classmethod
    def from_array(cls, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (len(THETA_NAMES),):
            raise ValueError(f"expected {len(THETA_NAMES)} values, got {values.shape}")
        return cls(*(float(v) for v in values))

    def as_array(self):
        return np.array([getattr(self, name) for name in THETA_NAMES])

    def as_dict(self):
        return {name: float(getattr(self, name)) for name in THETA_NAMES}

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def sign_flipped(self):
        """Image under (beta, gamma, rho_x) -> -(beta, gamma, rho_x)."""
        return self.replace(beta=-self.beta, gamma=-self.gamma, rho_x=-self.rho_x)

    def violations(self, convention=True):
        """List the violated invariants (empty when feasible).

        Args:
            convention (bool): also enforce the sign convention rho_x >= 0. The
                model itself only needs |rho_x| <= 1 and g > 0.
        """
        problems = []
        if not (0 < self.h1 < 1 and 0 < self.h2 < 1):
            problems.append("Hurst eigenvalues must lie in (0, 1)")
        elif self.h1 > self.h2:
            problems.append("h1 <= h2 is required")
        if convention and not 0 <= self.rho_x <= 1:
            problems.append("rho_x must lie in [0, 1]")
        elif abs(self.rho_x) > 1:
            problems.append("rho_x must lie in [-1, 1]")
        if self.sigma_x1 <= 0 or self.sigma_x2 <= 0:
            problems.append("latent standard deviations must be positive")
        if abs(self.beta) > 1 or abs(self.gamma) > 1:
            problems.append("beta and gamma must lie in [-1, 1]")
        if not problems and g_condition(self.h1, self.h2, self.rho_x) <= 0:
            problems.append("g(h1, h2, rho_x) > 0 is required")
        return problems

    @property
    def feasible(self):
        return not self.violations()

    def check(self, convention=True):
        """Raise InfeasibleParameterError unless every invariant holds."""
        problems = self.violations(convention)
        if problems:
            raise InfeasibleParameterError(f"{self}: " + "; ".join(problems))
        return self

    @property
    def mixing(self):
        return build_mixing(self.beta, self.gamma)

    @property
    def latent_covariance(self):
        """Point covariance Σ_X = E X(1) X(1)*."""
        c = self.sigma_x1 * self.sigma_x2 * self.rho_x
        return np.array([[self.sigma_x1**2, c], [c, self.sigma_x2**2]])


def _latent_params(theta):
    h = np.array([theta.h1, theta.h2])
    sig = np.array([theta.sigma_x1, theta.sigma_x2])
    corr = np.array([[1.0, theta.rho_x], [theta.rho_x, 1.0]])
    return h[:, None] + h[None, :], np.outer(sig, sig) * corr


def latent_covariance_kernel(theta, t, s):
    """E X(t) X(s)* of the time-reversible latent process.

    Entry (m, n) is (σ_m σ_n ρ_mn / 2)(|t|^H + |s|^H − |t − s|^H) with H = h_m + h_n.
    """
    expo, scale = _latent_params(theta)
    t, s = float(t), float(s)
    return 0.5 * scale * (np.abs(t) ** expo + np.abs(s) ** expo - np.abs(t - s) ** expo)


def latent_increment_covariance(theta, lags, step=1):
    """E ΔX(t) ΔX(t + lag)* for increments ΔX(t) = X(t + step) − X(t).

    Args:
        theta (Theta): model parameters (only the latent ones are used)
        lags (int or array of int): lags in samples
        step (int): increment step in samples

    Returns:
        numpy.ndarray: shape (2, 2) for a scalar lag, (len(lags), 2, 2) otherwise
    """
    expo, scale = _latent_params(theta)
    lags = np.abs(np.asarray(lags, dtype=float))
    k = lags[..., None, None]
    cov = 0.5 * scale * (
        np.abs(k + step) ** expo + np.abs(k - step) ** expo - 2 * np.abs(k) ** expo
    )
    return cov


def increment_covariance(theta, lag, step=1):
    """Covariance E ΔY(t) ΔY(t + lag)* of the unit-step increments of Y = W X.

    Args:
        theta (Theta): feasible model parameters
        lag (int or array of int): lag(s) in samples
        step (int): increment step in samples

    Returns:
        numpy.ndarray: 2x2 matrix (or stack of matrices for an array of lags)

    Raises:
        InfeasibleParameterError: if theta is infeasible
    """
    theta.check()
    w = theta.mixing.w
    return w @ latent_increment_covariance(theta, lag, step) @ w.T


def point_covariance(theta):
    """Σ_Y(1) = W Σ_X W*, the covariance of Y(1) (and of unit increments)."""
    theta.check()
    w = theta.mixing.w
    return w @ theta.latent_covariance @ w.T
